#pragma once

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stabkit::cli {

enum ExitCode : int { Ok = 0, BadInput = 2, NumericalAbort = 3 };

/// Per-command knobs. Batch manifests carry the same fields under "options".
struct CommandOptions {
    std::uint64_t seed = 0;
    std::optional<double> tol;
    std::optional<int> max_iters;
    std::optional<int> brute_bound;
    int r = 0;
    int anderson = 5;
    std::string c = "1";
    int r_min = 1;
    int r_max = 20;
    int k_max = 0;
    int samples = 16;
    int count = 200;
    int max_total = 8;
    int max_multiplicity = 4;
};

CommandOptions options_from_json(const nlohmann::json& j, CommandOptions base = {});

struct Output {
    nlohmann::json payload;
    std::string csv;
};

/// Runs one command ("hm", "points classify", "slope df", ...) on parsed input.
Output execute(const std::string& command, const nlohmann::json& input, const CommandOptions& opt);
std::vector<std::string> commands();

/// {"schema_version", "command", "seed", "result"}.
nlohmann::json envelope(const std::string& command, const CommandOptions& opt, nlohmann::json result);

/// Full command line entry point. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

nlohmann::json read_json_file(const std::string& path);

} // namespace stabkit::cli
