#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swnn/dataset.hpp"
#include "swnn/hyper_params.hpp"
#include "swnn/inverted_index.hpp"
#include "swnn/knn.hpp"

namespace swnn {

/// Mean over test entries of (true labels among the top-K predicted) / K.
/// Predictions shorter than K contribute misses for the absent ranks.
/// Throws std::invalid_argument on length mismatch, empty input or K < 1.
double precision_at_k(std::span<const Prediction> predictions, std::span<const LabelSet> truths,
                      std::uint32_t k);

/// Ceiling achievable by any ranker: mean of min(K, |labels|) / K.
double max_precision_at_k(std::span<const LabelSet> truths, std::uint32_t k);

struct EvalReport {
    std::vector<std::pair<std::uint32_t, double>> precision_at;      // by ascending K
    std::vector<std::pair<std::uint32_t, double>> max_precision_at;  // by ascending K
    std::size_t n_test = 0;
    HyperParams hp;
    std::optional<LatencyStats> latency;
};

/// Predicts the whole test set (top max(Ks) labels per query) and scores it.
/// Metrics are independent of the worker count.
EvalReport evaluate(const TrainingIndex& index, const Dataset& test, const HyperParams& hp,
                    std::span<const std::uint32_t> ks, unsigned workers,
                    const PredictOptions& options = {});

/// Aligned text table: one row per K with P@K and max P@K in percent.
void write_report_table(std::ostream& out, const EvalReport& report);

/// JSON with hyper-params, n_test and the metric maps; the latency object is
/// present only when it was measured.
std::string report_to_json(const EvalReport& report);

}  // namespace swnn
