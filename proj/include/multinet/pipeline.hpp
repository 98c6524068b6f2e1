#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multinet/io.hpp"
#include "multinet/metrics.hpp"

namespace multinet {

struct RunOptions {
    std::optional<Direction> direction;  // unset: both where both apply
    bool binary = false;
    bool per_year = false;
    Averaging averaging = Averaging::mean_of_periods;
    std::optional<std::pair<std::string, std::string>> pair;
    std::vector<std::string> exclude_periods;
    fs::path out = "multinet_out";
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<double> rescale_target;
};

struct RunReport {
    std::vector<std::string> artifacts;  // paths relative to the output directory
    std::vector<std::string> failures;   // pairs or layers whose output is missing or NA
    std::vector<std::string> warnings;
    bool non_convergence = false;
};

/// Subcommands understood by run_pipeline, in the order `all` runs them.
const std::vector<std::string>& pipeline_commands();

/// Runs one subcommand (or `all`) and writes its artifacts plus a
/// run_report_<command>.json under options.out.
RunReport run_pipeline(const Manifest& manifest, const std::string& command, const RunOptions& options);

/// "A:B" -> {"A", "B"}.
std::pair<std::string, std::string> parse_pair(const std::string& text);

}  // namespace multinet
