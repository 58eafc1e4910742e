#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dpinv/block.hpp"
#include "dpinv/dense.hpp"
#include "dpinv/error.hpp"
#include "dpinv/sparse.hpp"

namespace dpinv {

/// x -> A x on R^n. Copies share the underlying data; applying is const and
/// safe from several threads at once.
class LinearOperator {
public:
    using Apply = std::function<void(std::span<const double>, std::span<double>)>;

    LinearOperator(std::size_t dimension, Apply apply);

    std::size_t dimension() const noexcept { return n_; }
    void apply(std::span<const double> x, std::span<double> y) const;
    Vector apply(std::span<const double> x) const;

    static LinearOperator from_sparse(SparseMatrix m);
    static LinearOperator from_dense(DenseMatrix m);

private:
    std::size_t n_;
    Apply apply_;
};

/// x -> L x + alpha u (v^T x), without forming u v^T.
LinearOperator rank_one_shifted(SparseMatrix base, Vector u, Vector v, double alpha);

struct GmresConfig {
    std::size_t restart = 30;
    double tol = 1e-9;
    std::size_t max_outer = 10000;
};

struct SolveReport {
    std::size_t outer_iterations = 0;
    std::size_t inner_iterations_total = 0;
    std::vector<std::size_t> inner_per_outer;
    std::uint64_t mv_count = 0;
    std::size_t explicit_checks = 0;  ///< true-residual recomputations, one Mv each
    double initial_residual = 0.0;
    double final_residual = 0.0;  ///< explicitly recomputed on acceptance
    Vector residual_history;      ///< one entry per outer step
    double wall_time = 0.0;       ///< seconds
};

class GmresConvergenceError : public NumericalError {
public:
    GmresConvergenceError(const std::string& what, SolveReport report)
        : NumericalError(what), report_(std::move(report)) {}
    const SolveReport& report() const noexcept { return report_; }

private:
    SolveReport report_;
};

struct ArnoldiResult {
    ColumnBlock V;  ///< n x (k+1), or n x k after a breakdown
    DenseMatrix H;  ///< (k+1) x k, or k x k after a breakdown
    std::size_t k = 0;
    std::optional<std::size_t> breakdown;  ///< step at which the space became invariant
};

/// Arnoldi with modified Gram-Schmidt and one reorthogonalization pass.
ArnoldiResult arnoldi(const LinearOperator& op, std::span<const double> v1, std::size_t ell);

struct GmresResult {
    Vector x;
    SolveReport report;
};

/// Restarted GMRES(restart). An empty x0 means the zero vector.
GmresResult gmres_restarted(const LinearOperator& op, std::span<const double> b,
                            std::span<const double> x0 = {}, const GmresConfig& cfg = {});

struct RichardsonStep {
    double alpha = 0.0;
    Vector r_next;
};

/// One minimal-residual step r -> r - alpha A r.
RichardsonStep richardson_step(const LinearOperator& op, std::span<const double> r);

}  // namespace dpinv
