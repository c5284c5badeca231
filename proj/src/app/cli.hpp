#pragma once

#include "app/config.hpp"

#include <string>
#include <utility>
#include <vector>

namespace conekernel::app {

inline constexpr int kSchemaVersion = 1;

/// Settings that may change speed but never results; kept out of the report.
struct RunOptions {
    int threads = 0;
};

struct RunResult {
    int exit_code = 0;  ///< 0 ok, 1 validation failure, 2 numerical failure
    json report;        ///< report object, or an error object on failure
    std::vector<std::pair<std::string, std::string>> files;  ///< file name -> contents (CSV tables)

    /// report.json contents: two-space indented JSON and a trailing newline.
    std::string report_text() const;
};

/// Validates the configuration, runs the command and renders all outputs in memory.
RunResult run(const RunConfig& config, const RunOptions& options = {});

/// Writes report.json (or error.json) and the CSV tables into output_dir.
void write_outputs(const RunResult& result, const std::string& output_dir);

/// Command-line front end; returns the process exit status.
int main_entry(int argc, char** argv);

} // namespace conekernel::app
