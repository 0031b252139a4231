#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swnn/sparse_vector.hpp"

namespace swnn {

/// Sorted, unique label ids attached to one entry. May be empty.
using LabelSet = std::vector<std::uint32_t>;

/// Multi-label dataset in the text format used by the Extreme Classification
/// Repository:
///
///   line 1:          <num_entries> <num_features> <num_labels>
///   following lines: <label,label,...> <feature:value> <feature:value> ...
///
/// The label field is comma separated and may be empty (the line then starts
/// with a space or directly with the first feature:value pair). Feature and
/// label ids are 0-based.
struct Dataset {
    std::uint32_t num_features = 0;  // declared dimension, every feature id < this
    std::uint32_t num_labels = 0;    // declared label count, every label id < this
    std::vector<SparseVector> features;
    std::vector<LabelSet> labels;

    std::size_t size() const { return features.size(); }
};

/// Parse failure with the 1-based line number it was detected on.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Reads a dataset from a stream. Throws ParseError on any malformed input:
/// bad header, out-of-range id, duplicate feature id within a line,
/// non-numeric value, or entry-count mismatch. Features with an exact zero
/// value are dropped; features and labels are normalized to ascending order.
Dataset parse_dataset(std::istream& in);

/// Opens and parses a file; errors carry the path.
Dataset load_dataset(const std::string& path);

/// Writes the canonical form of the format above (ascending ids, shortest
/// round-trippable values).
void write_dataset(std::ostream& out, const Dataset& dataset);

struct FiveNumberSummary {
    double minimum = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double maximum = 0.0;
    double average = 0.0;
};

/// Five-number summary plus mean of a non-empty list of counts. Quartiles use
/// linear interpolation between order statistics (the common "type 7" rule).
FiveNumberSummary summarize(std::span<const std::uint64_t> values);

/// Descriptive statistics of a dataset. Per-label and per-feature occurrence
/// summaries cover only labels/features that occur at least once; the
/// per-entry summaries cover every entry, including label-free or empty ones.
struct DatasetStats {
    FiveNumberSummary label_occurrences;    // entries per observed label
    FiveNumberSummary labels_per_entry;     // |labels| per entry
    FiveNumberSummary feature_activations;  // |Supp(x)| per entry
    FiveNumberSummary feature_occurrences;  // entries per observed feature
};

/// Throws std::invalid_argument on an empty dataset.
DatasetStats dataset_statistics(const Dataset& dataset);

/// Aligned text table, one row per statistic.
void write_stats_table(std::ostream& out, const DatasetStats& stats);

/// JSON object keyed by statistic name, each with min/q1/median/q3/max/avg.
std::string stats_to_json(const DatasetStats& stats);

}  // namespace swnn
