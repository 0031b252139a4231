#include "swnn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string_view>

#include <nlohmann/json.hpp>

namespace swnn {

namespace {

// Whole-token integer parse; returns false on any leftover characters.
bool parse_u32(std::string_view token, std::uint32_t& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !token.empty();
}

bool parse_f64(std::string_view token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !token.empty() && std::isfinite(out);
}

void split_spaces(std::string_view line, std::vector<std::string_view>& tokens) {
    tokens.clear();
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t end = line.find(' ', start);
        if (end == std::string_view::npos) end = line.size();
        tokens.push_back(line.substr(start, end - start));
        start = end + 1;
    }
}

LabelSet parse_label_field(std::string_view field, std::uint32_t num_labels, std::size_t lineno) {
    LabelSet labels;
    if (field.empty()) return labels;
    std::size_t start = 0;
    while (start <= field.size()) {
        std::size_t end = field.find(',', start);
        if (end == std::string_view::npos) end = field.size();
        std::string_view piece = field.substr(start, end - start);
        std::uint32_t id = 0;
        if (!parse_u32(piece, id)) {
            throw ParseError(lineno, "invalid label id '" + std::string(piece) + "'");
        }
        if (id >= num_labels) {
            throw ParseError(lineno, "label id " + std::to_string(id) + " out of range (L=" +
                                         std::to_string(num_labels) + ")");
        }
        labels.push_back(id);
        start = end + 1;
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

FeatureValue parse_feature_token(std::string_view token, std::uint32_t num_features,
                                 std::size_t lineno) {
    const std::size_t colon = token.find(':');
    if (colon == std::string_view::npos) {
        throw ParseError(lineno, "expected feature:value, got '" + std::string(token) + "'");
    }
    FeatureValue fv;
    if (!parse_u32(token.substr(0, colon), fv.id)) {
        throw ParseError(lineno, "invalid feature id in '" + std::string(token) + "'");
    }
    if (fv.id >= num_features) {
        throw ParseError(lineno, "feature id " + std::to_string(fv.id) + " out of range (d=" +
                                     std::to_string(num_features) + ")");
    }
    if (!parse_f64(token.substr(colon + 1), fv.value)) {
        throw ParseError(lineno, "invalid feature value in '" + std::string(token) + "'");
    }
    return fv;
}

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

void append_g17(std::string& out, double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out += buf;
}

double type7_quantile(const std::vector<double>& sorted, double p) {
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

FiveNumberSummary zero_summary() { return FiveNumberSummary{}; }

}  // namespace

Dataset parse_dataset(std::istream& in) {
    std::string line;
    if (!read_line(in, line)) throw ParseError(1, "missing header");

    std::vector<std::string_view> tokens;
    split_spaces(line, tokens);
    std::erase_if(tokens, [](std::string_view t) { return t.empty(); });
    std::uint32_t num_entries = 0;
    Dataset dataset;
    if (tokens.size() != 3 || !parse_u32(tokens[0], num_entries) ||
        !parse_u32(tokens[1], dataset.num_features) || !parse_u32(tokens[2], dataset.num_labels)) {
        throw ParseError(1, "malformed header, expected '<entries> <features> <labels>'");
    }
    dataset.features.reserve(num_entries);
    dataset.labels.reserve(num_entries);

    std::vector<FeatureValue> entry;
    for (std::uint32_t i = 0; i < num_entries; ++i) {
        const std::size_t lineno = static_cast<std::size_t>(i) + 2;
        if (!read_line(in, line)) {
            throw ParseError(lineno, "expected " + std::to_string(num_entries) +
                                         " entries, found only " + std::to_string(i));
        }
        split_spaces(line, tokens);

        // The first token is the comma-separated label field. Some repository
        // files omit the leading space on label-free lines, so a first token
        // containing ':' is treated as a feature instead.
        std::size_t feature_start = 1;
        LabelSet labels;
        if (!tokens.empty() && tokens[0].find(':') != std::string_view::npos) {
            feature_start = 0;
        } else if (!tokens.empty()) {
            labels = parse_label_field(tokens[0], dataset.num_labels, lineno);
        }

        entry.clear();
        for (std::size_t t = feature_start; t < tokens.size(); ++t) {
            if (tokens[t].empty()) continue;
            entry.push_back(parse_feature_token(tokens[t], dataset.num_features, lineno));
        }
        std::sort(entry.begin(), entry.end(),
                  [](const FeatureValue& a, const FeatureValue& b) { return a.id < b.id; });
        for (std::size_t t = 1; t < entry.size(); ++t) {
            if (entry[t - 1].id == entry[t].id) {
                throw ParseError(lineno, "duplicate feature id " + std::to_string(entry[t].id));
            }
        }
        std::erase_if(entry, [](const FeatureValue& fv) { return fv.value == 0.0; });

        dataset.features.push_back(SparseVector::from_sorted(entry));
        dataset.labels.push_back(std::move(labels));
    }

    std::size_t lineno = static_cast<std::size_t>(num_entries) + 2;
    while (read_line(in, line)) {
        if (line.find_first_not_of(" \t") != std::string::npos) {
            throw ParseError(lineno, "expected " + std::to_string(num_entries) +
                                         " entries, found more");
        }
        ++lineno;
    }
    return dataset;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return parse_dataset(in);
    } catch (const ParseError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
    out << dataset.size() << ' ' << dataset.num_features << ' ' << dataset.num_labels << '\n';
    std::string line;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        line.clear();
        const LabelSet& labels = dataset.labels[i];
        for (std::size_t l = 0; l < labels.size(); ++l) {
            if (l > 0) line += ',';
            line += std::to_string(labels[l]);
        }
        for (const FeatureValue& fv : dataset.features[i].entries()) {
            line += ' ';
            line += std::to_string(fv.id);
            line += ':';
            append_g17(line, fv.value);
        }
        line += '\n';
        out << line;
    }
}

FiveNumberSummary summarize(std::span<const std::uint64_t> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty value list");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    FiveNumberSummary s;
    s.minimum = sorted.front();
    s.q1 = type7_quantile(sorted, 0.25);
    s.median = type7_quantile(sorted, 0.50);
    s.q3 = type7_quantile(sorted, 0.75);
    s.maximum = sorted.back();
    s.average = std::accumulate(sorted.begin(), sorted.end(), 0.0) / sorted.size();
    return s;
}

DatasetStats dataset_statistics(const Dataset& dataset) {
    if (dataset.size() == 0) throw std::invalid_argument("dataset_statistics: empty dataset");

    std::vector<std::uint64_t> label_counts(dataset.num_labels, 0);
    std::vector<std::uint64_t> feature_counts(dataset.num_features, 0);
    std::vector<std::uint64_t> labels_per_entry(dataset.size());
    std::vector<std::uint64_t> activations(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        labels_per_entry[i] = dataset.labels[i].size();
        activations[i] = dataset.features[i].support_size();
        for (std::uint32_t l : dataset.labels[i]) ++label_counts[l];
        for (const FeatureValue& fv : dataset.features[i].entries()) ++feature_counts[fv.id];
    }
    std::erase(label_counts, 0);        // observed labels only
    std::erase(feature_counts, 0);      // observed features only

    DatasetStats stats;
    stats.label_occurrences = label_counts.empty() ? zero_summary() : summarize(label_counts);
    stats.labels_per_entry = summarize(labels_per_entry);
    stats.feature_activations = summarize(activations);
    stats.feature_occurrences =
        feature_counts.empty() ? zero_summary() : summarize(feature_counts);
    return stats;
}

namespace {

void write_stats_row(std::ostream& out, const char* name, const FiveNumberSummary& s) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-22s %10g %10g %10g %10g %12g %10.2f\n", name, s.minimum,
                  s.q1, s.median, s.q3, s.maximum, s.average);
    out << buf;
}

nlohmann::ordered_json summary_json(const FiveNumberSummary& s) {
    return {{"min", s.minimum}, {"q1", s.q1},   {"median", s.median},
            {"q3", s.q3},       {"max", s.maximum}, {"avg", s.average}};
}

}  // namespace

void write_stats_table(std::ostream& out, const DatasetStats& stats) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-22s %10s %10s %10s %10s %12s %10s\n", "statistic", "min",
                  "q1", "median", "q3", "max", "avg");
    out << buf;
    write_stats_row(out, "label occurrences", stats.label_occurrences);
    write_stats_row(out, "labels per entry", stats.labels_per_entry);
    write_stats_row(out, "feature activations", stats.feature_activations);
    write_stats_row(out, "feature occurrences", stats.feature_occurrences);
}

std::string stats_to_json(const DatasetStats& stats) {
    nlohmann::ordered_json j;
    j["label_occurrences"] = summary_json(stats.label_occurrences);
    j["labels_per_entry"] = summary_json(stats.labels_per_entry);
    j["feature_activations"] = summary_json(stats.feature_activations);
    j["feature_occurrences"] = summary_json(stats.feature_occurrences);
    return j.dump(2);
}

}  // namespace swnn
