#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowset/capture.hpp"
#include "flowset/dataset.hpp"
#include "flowset/flow_table.hpp"

namespace CLI {
class App;
}

namespace flowset {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    std::vector<std::string> inputs;
    double interval = 60;           // seconds, >= 1
    double idle_timeout = 60;       // seconds, > 0
    double active_threshold = 5;    // seconds, > 0
    std::string features = "all";
    std::optional<std::string> ground_truth;
    std::int64_t tz_offset = 0;     // seconds east of UTC for naive ground-truth times
    std::string output;
    std::optional<std::string> summary_output;

    EngineConfig engine() const;
};

/// Registers the pipeline flags (and --config) on `app`, bound to `cfg`.
void add_pipeline_options(CLI::App& app, PipelineConfig& cfg);

/// Throws UsageError when the configuration is unusable.
void validate(const PipelineConfig& cfg);

/// Parses command-line arguments (without the program name). A --config
/// file supplies key=value defaults; flags on the command line win.
/// Throws UsageError.
PipelineConfig parse_config(const std::vector<std::string>& args);

struct RunResult {
    int exit_code = 0;
    std::string error;
    CaptureTotals capture;
    EngineStats engine;
    std::uint64_t records_written = 0;
    DatasetSummary summary;
};

/// decode -> flows -> features -> labels -> CSV (-> summary). Run statistics
/// go to `log`. On failure no output file is left behind.
RunResult run_pipeline(const PipelineConfig& cfg, std::ostream& log);

}  // namespace flowset
