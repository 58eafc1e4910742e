#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "dpinv/block.hpp"
#include "dpinv/error.hpp"
#include "dpinv/sparse.hpp"

namespace dpinv {

struct SubspaceConfig {
    std::size_t ell = 30;
    double tol = 1e-9;
    std::size_t max_iterations = 10000;
    std::uint64_t seed = 0;
};

struct StationaryResult {
    Vector pi;
    double residual = 0.0;  ///< ||P^T pi - pi||_2
    std::size_t iterations = 0;
    std::uint64_t mv_count = 0;
    double wall_time = 0.0;  ///< seconds
    Vector residual_history;
};

/// Raised when the iteration cap is hit; carries the last iterate.
class StationaryConvergenceError : public NumericalError {
public:
    StationaryConvergenceError(const std::string& what, StationaryResult partial)
        : NumericalError(what), partial_(std::move(partial)) {}
    const StationaryResult& partial() const noexcept { return partial_; }

private:
    StationaryResult partial_;
};

/// Stationary distribution of an irreducible row-stochastic P by subspace
/// iteration on P^T with an ordered Schur Rayleigh-Ritz step. Each outer
/// step costs ell + 1 products with P^T. The block size is clamped to n.
StationaryResult stationary_distribution(const SparseMatrix& P, const SubspaceConfig& cfg = {});

/// ||P^T x - x||_2
double stationary_residual(const SparseMatrix& P, std::span<const double> x);

/// Throws InputError unless P is square, nonnegative and every row sums to 1
/// within `tol`.
void require_stochastic(const SparseMatrix& P, double tol = 1e-12);

}  // namespace dpinv
