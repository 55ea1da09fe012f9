#pragma once

#include "ngrc/bench.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ngrc {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitData = 2,
    kExitNumeric = 3,
};

/// "0.001" -> {0.001}; "1e-6:1e2:9" -> 9 log-spaced values; "a,b,c" -> list; "auto" -> default grid.
std::vector<double> parse_lambda_spec(std::string_view text);

/// "lin=1.0,nls=1.8" -> {Lin: 1.0, Nls: 1.8}
std::map<FeatureFamily, double> parse_weight_spec(std::string_view text);

/// Turns `key = value` lines into `--key value` arguments. Blank lines and
/// lines starting with '#' are skipped; a key without a value becomes a bare flag.
std::vector<std::string> read_config_file(const std::filesystem::path& path);

/// Entry point of the `ngrc` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ngrc
