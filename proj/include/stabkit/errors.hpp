#pragma once

#include <stdexcept>
#include <string>

namespace stabkit {

/// Malformed or out-of-contract input. `pointer()` is a JSON pointer into the
/// offending document when the error came from a parsed file, empty otherwise.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what, std::string pointer = {})
        : std::runtime_error(what), pointer_(std::move(pointer)) {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

/// A computation produced non-finite values or could not be carried out
/// at the requested accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The object does not provide the requested capability.
class UnsupportedOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace stabkit
