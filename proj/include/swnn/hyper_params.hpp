#pragma once

#include <cstdint>

namespace swnn {

/// Inference hyper-parameters. jaccard_exponent is integral by construction;
/// fractional values must be rejected where configuration is parsed.
struct HyperParams {
    std::uint32_t neighborhood_size = 10;  // S, number of voting neighbors
    double vote_exponent = 1.0;            // alpha, weight = sim^alpha
    std::uint32_t jaccard_exponent = 1;    // beta, Sim = Jaccard^beta * cosine
    std::uint32_t top_k = 5;               // labels returned per query

    /// Throws std::invalid_argument unless S >= 1, alpha >= 0 and finite,
    /// and top_k >= 1.
    void validate() const;
};

}  // namespace swnn
