#include "flowset/pipeline.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "flowset/csv.hpp"
#include "flowset/ground_truth.hpp"

namespace flowset {

namespace {

Micros to_micros(double seconds) { return static_cast<Micros>(std::llround(seconds * 1e6)); }

/// Output written to `<path>.tmp` and renamed into place on commit; removed
/// otherwise.
class StagedFile {
public:
    explicit StagedFile(std::string path) : path_(std::move(path)), tmp_(path_ + ".tmp") {
        out_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!out_) throw DatasetError("cannot write " + tmp_);
    }
    StagedFile(const StagedFile&) = delete;
    StagedFile& operator=(const StagedFile&) = delete;
    ~StagedFile() {
        if (!committed_) {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

    std::ostream& stream() { return out_; }

    void commit() {
        out_.flush();
        if (!out_) throw DatasetError("write failed: " + tmp_);
        out_.close();
        std::filesystem::rename(tmp_, path_);
        committed_ = true;
    }

private:
    std::string path_;
    std::string tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

}  // namespace

EngineConfig PipelineConfig::engine() const {
    EngineConfig e;
    e.interval = to_micros(interval);
    e.idle_timeout = to_micros(idle_timeout);
    e.active_threshold = to_micros(active_threshold);
    return e;
}

void add_pipeline_options(CLI::App& app, PipelineConfig& cfg) {
    app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
    app.add_option("--input", cfg.inputs, "capture file (PCAP or PCAPNG); repeatable, processed in order");
    app.add_option("--interval", cfg.interval, "status-record interval in seconds (minimum 1)")->capture_default_str();
    app.add_option("--idle-timeout", cfg.idle_timeout, "evict flows idle this many seconds")->capture_default_str();
    app.add_option("--active-threshold", cfg.active_threshold, "gap in seconds that ends an active period")
        ->capture_default_str();
    app.add_option("--features", cfg.features, "comma-separated feature list, or 'all'")->capture_default_str();
    app.add_option("--ground-truth", cfg.ground_truth, "ground-truth CSV used for labelling");
    app.add_option("--tz-offset", cfg.tz_offset, "seconds east of UTC for ground-truth times without an offset")
        ->capture_default_str();
    app.add_option("--out", cfg.output, "output flow CSV");
    app.add_option("--summary", cfg.summary_output, "optional class-count summary CSV");
}

void validate(const PipelineConfig& cfg) {
    if (cfg.inputs.empty()) throw UsageError("no input captures given (use --input)");
    if (!(cfg.interval >= 1.0))
        throw UsageError(fmt::format("--interval must be at least 1 second (got {})", cfg.interval));
    if (!(cfg.idle_timeout > 0)) throw UsageError("--idle-timeout must be positive");
    if (!(cfg.active_threshold > 0)) throw UsageError("--active-threshold must be positive");
    if (cfg.output.empty()) throw UsageError("no output path given (use --out)");
    try {
        (void)parse_field_selection(cfg.features);
    } catch (const DatasetError& e) {
        throw UsageError(e.what());
    }
}

PipelineConfig parse_config(const std::vector<std::string>& args) {
    PipelineConfig cfg;
    CLI::App app{"flowset"};
    add_pipeline_options(app, cfg);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    validate(cfg);
    return cfg;
}

RunResult run_pipeline(const PipelineConfig& cfg, std::ostream& log) {
    RunResult result;
    try {
        validate(cfg);
        const auto selection = parse_field_selection(cfg.features);
        std::vector<GroundTruthRule> rules;
        if (cfg.ground_truth) rules = parse_ground_truth(*cfg.ground_truth, cfg.tz_offset);

        StagedFile out(cfg.output);
        FlowCsvWriter writer(out.stream(), selection);
        FlowTable table(cfg.engine());
        auto emit = [&](std::vector<FlowRecord>&& records) {
            for (auto& r : records) {
                r.gt_label = match_label(r, rules);
                result.summary.add(r.gt_label);
                writer.write(r);
            }
        };

        Micros last_ts = 0;
        for (const auto& path : cfg.inputs) {
            CaptureReader reader(path);
            while (auto p = reader.next()) {
                last_ts = std::max(last_ts, p->ts);
                emit(table.ingest(*p));
            }
            result.capture += reader.totals();
        }
        emit(table.close_all(last_ts));

        std::optional<StagedFile> summary;
        if (cfg.summary_output) {
            summary.emplace(*cfg.summary_output);
            summary->stream() << "label,count\n";
            for (const auto& [label, n] : result.summary.ordered())
                summary->stream() << csv::escape(label) << ',' << n << '\n';
        }
        out.commit();
        if (summary) summary->commit();

        result.engine = table.stats();
        result.records_written = writer.rows();
        result.summary.name = cfg.output;
    } catch (const std::exception& e) {
        result.exit_code = 1;
        result.error = e.what();
        log << "error: " << e.what() << '\n';
        return result;
    }

    const auto& c = result.capture;
    const auto& s = result.engine;
    log << fmt::format("packets: read={} decoded={} skipped={} (non-ip={} fragments={} malformed={} "
                       "stacked-vlan={} truncated={})\n",
                       c.read, c.decoded, c.skipped, c.non_ip, c.fragments, c.malformed, c.stacked_vlan, c.truncated);
    log << fmt::format("flows: created={} peak-live={} records={}\n", s.flows_created, s.peak_live_flows,
                       result.records_written);
    log << fmt::format("anomalies: timestamp-regressions={} handshake-order={}\n", s.timestamp_anomalies,
                       s.handshake_anomalies);
    log << render_summary_table(result.summary);
    return result;
}

}  // namespace flowset
