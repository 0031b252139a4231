#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "swnn/sparse_vector.hpp"

namespace swnn {

/// Smallest eigenvalue of the Gram matrix G_ij = sim(v_i, v_j, beta).
/// Intended for kernel positive-definiteness checks on small samples.
/// Throws std::invalid_argument when the sample is empty or larger than cap,
/// std::runtime_error if the eigensolver does not converge.
double gram_min_eigenvalue(std::span<const SparseVector> vectors, std::uint32_t beta,
                           std::size_t cap = 64);

}  // namespace swnn
