// flowset: packet captures -> labelled flow CSV datasets.
//
//   flowset --input day1.pcap --input day2.pcap --interval 60 \
//           --ground-truth attacks.csv --out flows.csv --summary classes.csv
//   flowset summarize flows.csv [--label-column GTLabel]
//   flowset compare ours.csv theirs.csv [--csv comparison.csv]

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

#include "flowset/csv.hpp"
#include "flowset/dataset.hpp"
#include "flowset/pipeline.hpp"

namespace {

using namespace flowset;

// A "label,count" file is read as a summary; anything else is a dataset
// whose label column is counted.
DatasetSummary load_summary(const std::string& path, const std::string& label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open " + path);
    csv::Reader reader(in);
    const auto header = reader.next();
    if (header && header->size() == 2 && (*header)[0] == "label" && (*header)[1] == "count")
        return read_summary_csv(path);
    return summarize_csv(path, label_column);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convert packet captures into labelled flow datasets"};
    PipelineConfig cfg;
    add_pipeline_options(app, cfg);
    app.require_subcommand(0, 1);

    std::string label_column = "GTLabel";
    std::string summarize_path;
    std::string summarize_out;
    auto* summarize_cmd = app.add_subcommand("summarize", "per-class flow counts of a dataset CSV");
    summarize_cmd->add_option("dataset", summarize_path, "flow CSV")->required();
    summarize_cmd->add_option("--label-column", label_column, "label column")->capture_default_str();
    summarize_cmd->add_option("--csv", summarize_out, "also write the summary as label,count CSV");

    std::string compare_a;
    std::string compare_b;
    std::string compare_out;
    auto* compare_cmd = app.add_subcommand("compare", "side-by-side class counts of two datasets (ratio b/a)");
    compare_cmd->add_option("a", compare_a, "dataset or label,count summary (denominator)")->required();
    compare_cmd->add_option("b", compare_b, "dataset or label,count summary")->required();
    compare_cmd->add_option("--label-column", label_column, "label column")->capture_default_str();
    compare_cmd->add_option("--csv", compare_out, "also write the comparison CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*summarize_cmd) {
            const auto s = summarize_csv(summarize_path, label_column);
            std::cout << render_summary_table(s);
            if (!summarize_out.empty()) write_summary_csv(s, summarize_out);
            return 0;
        }
        if (*compare_cmd) {
            const auto c = compare_summaries(load_summary(compare_a, label_column), load_summary(compare_b, label_column));
            std::cout << render_comparison_table(c);
            if (!compare_out.empty()) {
                std::ofstream out(compare_out, std::ios::binary | std::ios::trunc);
                if (!out) throw DatasetError("cannot write " + compare_out);
                out << render_comparison_csv(c);
            }
            return 0;
        }
        validate(cfg);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    return run_pipeline(cfg, std::cerr).exit_code;
}
