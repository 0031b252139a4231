#include "swnn/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace swnn {

double precision_at_k(std::span<const Prediction> predictions, std::span<const LabelSet> truths,
                      std::uint32_t k) {
    if (k < 1) throw std::invalid_argument("precision_at_k: K must be >= 1");
    if (predictions.size() != truths.size()) {
        throw std::invalid_argument("precision_at_k: prediction/truth length mismatch");
    }
    if (truths.empty()) throw std::invalid_argument("precision_at_k: empty test set");

    double total = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const LabelSet& truth = truths[i];
        const auto& ranked = predictions[i].ranked;
        const std::size_t depth = std::min<std::size_t>(k, ranked.size());
        std::size_t hits = 0;
        for (std::size_t r = 0; r < depth; ++r) {
            if (std::binary_search(truth.begin(), truth.end(), ranked[r].first)) ++hits;
        }
        total += static_cast<double>(hits) / static_cast<double>(k);
    }
    return total / static_cast<double>(truths.size());
}

double max_precision_at_k(std::span<const LabelSet> truths, std::uint32_t k) {
    if (k < 1) throw std::invalid_argument("max_precision_at_k: K must be >= 1");
    if (truths.empty()) throw std::invalid_argument("max_precision_at_k: empty test set");
    double total = 0.0;
    for (const LabelSet& truth : truths) {
        total += static_cast<double>(std::min<std::size_t>(k, truth.size())) /
                 static_cast<double>(k);
    }
    return total / static_cast<double>(truths.size());
}

EvalReport evaluate(const TrainingIndex& index, const Dataset& test, const HyperParams& hp,
                    std::span<const std::uint32_t> ks, unsigned workers,
                    const PredictOptions& options) {
    if (ks.empty()) throw std::invalid_argument("evaluate: no K values given");
    if (test.size() == 0) throw std::invalid_argument("evaluate: empty test set");
    hp.validate();

    std::vector<std::uint32_t> sorted_ks(ks.begin(), ks.end());
    std::sort(sorted_ks.begin(), sorted_ks.end());
    sorted_ks.erase(std::unique(sorted_ks.begin(), sorted_ks.end()), sorted_ks.end());
    if (sorted_ks.front() < 1) throw std::invalid_argument("evaluate: K must be >= 1");

    HyperParams effective = hp;
    effective.top_k = std::max(hp.top_k, sorted_ks.back());
    const BatchResult batch = predict_batch(index, test.features, effective, workers, options);

    EvalReport report;
    report.n_test = test.size();
    report.hp = hp;
    for (std::uint32_t k : sorted_ks) {
        report.precision_at.emplace_back(k, precision_at_k(batch.predictions, test.labels, k));
        report.max_precision_at.emplace_back(k, max_precision_at_k(test.labels, k));
    }
    return report;
}

void write_report_table(std::ostream& out, const EvalReport& report) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "n_test=%zu  S=%u  alpha=%g  beta=%u\n", report.n_test,
                  report.hp.neighborhood_size, report.hp.vote_exponent,
                  report.hp.jaccard_exponent);
    out << buf;
    std::snprintf(buf, sizeof(buf), "%4s %12s %12s\n", "K", "P@K (%)", "max P@K (%)");
    out << buf;
    for (std::size_t i = 0; i < report.precision_at.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%4u %12.2f %12.2f\n", report.precision_at[i].first,
                      100.0 * report.precision_at[i].second,
                      100.0 * report.max_precision_at[i].second);
        out << buf;
    }
    if (report.latency) {
        std::snprintf(buf, sizeof(buf),
                      "latency: mean=%.3f ms  p50=%.3f ms  p99=%.3f ms  %.1f queries/s\n",
                      report.latency->mean_ms, report.latency->p50_ms, report.latency->p99_ms,
                      report.latency->queries_per_sec);
        out << buf;
    }
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["n_test"] = report.n_test;
    j["hyper_params"] = {{"S", report.hp.neighborhood_size},
                         {"alpha", report.hp.vote_exponent},
                         {"beta", report.hp.jaccard_exponent},
                         {"top_k", report.hp.top_k}};
    nlohmann::ordered_json p, m;
    for (const auto& [k, v] : report.precision_at) p[std::to_string(k)] = v;
    for (const auto& [k, v] : report.max_precision_at) m[std::to_string(k)] = v;
    j["precision_at"] = p;
    j["max_precision_at"] = m;
    if (report.latency) {
        j["latency"] = {{"mean_ms", report.latency->mean_ms},
                        {"p50_ms", report.latency->p50_ms},
                        {"p99_ms", report.latency->p99_ms},
                        {"queries_per_sec", report.latency->queries_per_sec},
                        {"queries", report.latency->queries}};
    }
    return j.dump(2);
}

}  // namespace swnn
