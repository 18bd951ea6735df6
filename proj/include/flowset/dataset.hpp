#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flowset/features.hpp"

namespace flowset {

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every column a flow CSV can carry, in default (dictionary) order.
enum class Field : std::uint8_t {
    FlowID,
    Rank,
    SrcAddr,
    Sport,
    DstAddr,
    Dport,
    Proto,
    State,
    Dur,
    SrcBytes,
    DstBytes,
    sTtl,
    dTtl,
    SrcLoss,
    DstLoss,
    SrcLoad,
    DstLoad,
    SrcPkts,
    DstPkts,
    SrcWin,
    DstWin,
    SrcTCPBase,
    DstTCPBase,
    sMeanPktSz,
    dMeanPktSz,
    SrcJitter,
    DstJitter,
    SIntPkt,
    SIntPktMax,
    SIntPktMin,
    DIntPkt,
    DIntPktMax,
    DIntPktMin,
    StartTime,
    LastTime,
    TcpRtt,
    SynAck,
    AckDat,
    Mean,
    StdDev,
    Max,
    Min,
    GTLabel,
};

inline constexpr std::size_t kFieldCount = static_cast<std::size_t>(Field::GTLabel) + 1;

std::string_view field_name(Field f);
std::optional<Field> field_from_name(std::string_view name);
/// All fields in dictionary order.
std::span<const Field> all_fields();
/// Floating-point columns (compared with a tolerance on round trips).
bool is_float_field(Field f);

/// Parses a comma-separated selection, or "all". Throws DatasetError naming
/// the valid fields on an unknown name or an empty selection.
std::vector<Field> parse_field_selection(std::string_view spec);

std::string format_field(const FeatureVector& v, Field f);
/// Throws DatasetError when `text` is not a valid value for `f`.
void parse_field(FeatureVector& v, Field f, std::string_view text);

/// Streaming flow CSV writer. Header is written on construction.
class FlowCsvWriter {
public:
    FlowCsvWriter(std::ostream& out, std::vector<Field> selection);
    void write(const FeatureVector& v);
    std::uint64_t rows() const { return rows_; }

private:
    std::ostream& out_;
    std::vector<Field> selection_;
    std::uint64_t rows_ = 0;
};

/// Writes header + one row per record; returns the row count.
std::uint64_t write_csv(std::span<const FeatureVector> records, std::span<const Field> selection,
                        const std::string& path);

/// Column of a read-back CSV: a known feature or an opaque extra column.
struct ColumnInfo {
    std::string name;
    std::optional<Field> field;
};

struct FlowDataset {
    std::vector<ColumnInfo> columns;
    std::vector<FeatureVector> records;
    /// Values of opaque columns, per record, in column order.
    std::vector<std::vector<std::string>> extras;

    std::optional<std::size_t> column_index(std::string_view name) const;
};

/// Throws DatasetError (with line number) on arity mismatch or bad values.
FlowDataset read_flow_csv(const std::string& path);

struct DatasetSummary {
    std::string name;
    /// label -> count, presented by descending count via `ordered()`
    std::map<std::string, std::uint64_t> class_counts;
    std::uint64_t total = 0;

    /// (label, count) sorted by descending count, ties by label.
    std::vector<std::pair<std::string, std::uint64_t>> ordered() const;
    void add(const std::string& label, std::uint64_t n = 1);
};

DatasetSummary summarize(std::span<const FeatureVector> records, std::string name = {});
/// Counts the values of `label_column` in any CSV with a header row.
/// Throws DatasetError if the column is missing.
DatasetSummary summarize_csv(const std::string& path, std::string_view label_column = "GTLabel");
/// Reads a "label,count" summary file.
DatasetSummary read_summary_csv(const std::string& path);
void write_summary_csv(const DatasetSummary& s, const std::string& path);
std::string render_summary_table(const DatasetSummary& s);

struct ComparisonRow {
    std::string label;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::int64_t diff = 0;  // b - a
    double ratio = 0;       // b / a; +inf when a == 0
};

struct Comparison {
    std::string a_name;
    std::string b_name;
    std::vector<ComparisonRow> rows;  // union of labels, ordered by a's count then b's
    std::optional<std::size_t> largest_divergence;
};

Comparison compare_summaries(const DatasetSummary& a, const DatasetSummary& b);
std::string format_ratio(double ratio);
std::string render_comparison_csv(const Comparison& c);
std::string render_comparison_table(const Comparison& c);

}  // namespace flowset
