#include "swnn/gram.hpp"

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace swnn {

double gram_min_eigenvalue(std::span<const SparseVector> vectors, std::uint32_t beta,
                           std::size_t cap) {
    const std::size_t n = vectors.size();
    if (n < 1 || n > cap) {
        throw std::invalid_argument("gram_min_eigenvalue: sample size " + std::to_string(n) +
                                    " outside [1, " + std::to_string(cap) + "]");
    }
    Eigen::MatrixXd gram(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double s = sim(vectors[i], vectors[j], beta);
            gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
            gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = s;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("gram_min_eigenvalue: eigensolver did not converge");
    }
    return solver.eigenvalues()(0);
}

}  // namespace swnn
