#include "swnn/hyper_params.hpp"

#include <cmath>
#include <stdexcept>

namespace swnn {

void HyperParams::validate() const {
    if (neighborhood_size < 1) throw std::invalid_argument("neighborhood size must be >= 1");
    if (!(vote_exponent >= 0.0) || !std::isfinite(vote_exponent)) {
        throw std::invalid_argument("vote exponent must be a finite value >= 0");
    }
    if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
}

}  // namespace swnn
