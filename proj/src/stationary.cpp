#include "dpinv/stationary.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "dpinv/dense.hpp"
#include "dpinv/kernels.hpp"
#include "dpinv/rng.hpp"

namespace dpinv {

void require_stochastic(const SparseMatrix& P, double tol) {
    require_dims(P.rows() == P.cols(), "transition matrix must be square");
    for (std::size_t i = 0; i < P.rows(); ++i) {
        double s = 0.0;
        for (double v : P.row_values(i)) {
            if (!(v >= 0.0)) throw InputError("transition matrix has a negative entry in row " + std::to_string(i));
            s += v;
        }
        if (std::abs(s - 1.0) > tol)
            throw InputError("transition matrix row " + std::to_string(i) + " sums to " +
                             std::to_string(s) + ", not 1");
    }
}

double stationary_residual(const SparseMatrix& P, std::span<const double> x) {
    require_dims(P.rows() == x.size() && P.cols() == x.size(), "stationary residual length");
    Vector y = matvec_transpose(P, x);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - x[i]) * (y[i] - x[i]);
    return std::sqrt(s);
}

StationaryResult stationary_distribution(const SparseMatrix& P, const SubspaceConfig& cfg) {
    if (cfg.ell < 2) throw InputError("subspace block size must be at least 2");
    if (!(cfg.tol > 0.0)) throw InputError("subspace tolerance must be positive");
    require_stochastic(P);
    const auto start = std::chrono::steady_clock::now();
    const auto& k = kernels::active();
    const std::size_t n = P.rows();
    StationaryResult res;
    if (n == 0) throw InputError("empty transition matrix");
    if (n == 1) {
        res.pi = {1.0};
        return res;
    }
    const std::size_t ell = std::min(cfg.ell, n);

    Rng rng(cfg.seed, RngStream::subspace_start);
    const ColumnReseeder reseed = [&rng](std::size_t, std::span<double> col) {
        for (double& v : col) v = rng.normal();
    };

    ColumnBlock q(n, ell);
    for (std::size_t i = 0; i < n; ++i) q(i, 0) = 0.5 + rng.uniform();
    for (std::size_t c = 1; c < ell; ++c)
        for (std::size_t i = 0; i < n; ++i) q(i, c) = rng.normal();
    orthonormalize(q, reseed);

    MvCounter mv;
    ColumnBlock aq(n, ell);
    ColumnBlock w(n, ell);
    DenseMatrix b(ell, ell);
    Vector coeff(ell);
    Vector z(n);
    Vector pz(n);

    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        for (std::size_t c = 0; c < ell; ++c) matvec_transpose(P, q.col(c), aq.col(c), &mv);
        for (std::size_t c = 0; c < ell; ++c) {
            k.gemv_t(q.data(), n, n, ell, aq.col(c).data(), coeff.data());
            for (std::size_t r = 0; r < ell; ++r) b(r, c) = coeff[r];
        }
        for (double v : b.values())
            if (!std::isfinite(v)) throw NumericalError("subspace iteration produced non-finite values");
        const SchurForm s = ordered_schur_leading(b, 1.0, LeadingPolicy::nearest_real);

        for (std::size_t c = 0; c < ell; ++c) {
            for (std::size_t r = 0; r < ell; ++r) coeff[r] = s.U(r, c);
            auto wc = w.col(c);
            std::fill(wc.begin(), wc.end(), 0.0);
            k.gemv_n(aq.data(), n, n, ell, coeff.data(), wc.data());
            if (c == 0) {
                std::fill(z.begin(), z.end(), 0.0);
                k.gemv_n(q.data(), n, n, ell, coeff.data(), z.data());
            }
        }

        double sum = 0.0;
        for (double v : z) sum += v;
        if (sum < 0.0) {
            for (double& v : z) v = -v;
            sum = -sum;
        }
        bool positive = sum > 0.0;
        if (positive) {
            for (double& v : z) {
                v /= sum;
                positive = positive && v > 0.0;
            }
        }
        matvec_transpose(P, z, pz, &mv);
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) r2 += (pz[i] - z[i]) * (pz[i] - z[i]);
        const double residual = std::sqrt(r2);
        if (!std::isfinite(residual)) throw NumericalError("subspace iteration residual is not finite");

        res.pi = z;
        res.residual = residual;
        res.iterations = it;
        res.mv_count = mv.count;
        res.residual_history.push_back(residual);
        if (positive && residual <= cfg.tol) {
            res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            return res;
        }

        std::swap(q, w);
        orthonormalize(q, reseed);
    }
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    throw StationaryConvergenceError(
        "subspace iteration did not reach tolerance in " + std::to_string(cfg.max_iterations) +
            " iterations (residual " + std::to_string(res.residual) +
            "); the block size may not exceed the period of the chain",
        res);
}

}  // namespace dpinv
