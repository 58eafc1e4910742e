#include "dpinv/krylov.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "dpinv/kernels.hpp"

namespace dpinv {

LinearOperator::LinearOperator(std::size_t dimension, Apply apply)
    : n_(dimension), apply_(std::move(apply)) {
    if (!apply_) throw InputError("linear operator needs an apply function");
}

void LinearOperator::apply(std::span<const double> x, std::span<double> y) const {
    require_dims(x.size() == n_ && y.size() == n_, "operator apply length");
    apply_(x, y);
}

Vector LinearOperator::apply(std::span<const double> x) const {
    Vector y(n_);
    apply(x, y);
    return y;
}

LinearOperator LinearOperator::from_sparse(SparseMatrix m) {
    require_dims(m.rows() == m.cols(), "operator matrix must be square");
    auto held = std::make_shared<const SparseMatrix>(std::move(m));
    const std::size_t n = held->rows();
    return LinearOperator(n, [held](std::span<const double> x, std::span<double> y) {
        matvec(*held, x, y);
    });
}

LinearOperator LinearOperator::from_dense(DenseMatrix m) {
    require_dims(m.rows() == m.cols(), "operator matrix must be square");
    auto held = std::make_shared<const DenseMatrix>(std::move(m));
    const std::size_t n = held->rows();
    return LinearOperator(n, [held](std::span<const double> x, std::span<double> y) {
        const auto& k = kernels::active();
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = k.dot(held->row(i).data(), x.data(), x.size());
    });
}

namespace {

struct ShiftData {
    SparseMatrix base;
    Vector u;
    Vector v;
    double alpha;
};

double norm2(std::span<const double> x) {
    return std::sqrt(kernels::active().dot(x.data(), x.data(), x.size()));
}

void require_finite(double v, const char* where) {
    if (!std::isfinite(v)) throw NumericalError(std::string("non-finite value in ") + where);
}

}  // namespace

LinearOperator rank_one_shifted(SparseMatrix base, Vector u, Vector v, double alpha) {
    require_dims(base.rows() == base.cols(), "shifted operator base must be square");
    require_dims(u.size() == base.rows() && v.size() == base.rows(), "shift vector length");
    auto d = std::make_shared<const ShiftData>(ShiftData{std::move(base), std::move(u), std::move(v), alpha});
    const std::size_t n = d->base.rows();
    return LinearOperator(n, [d](std::span<const double> x, std::span<double> y) {
        const auto& k = kernels::active();
        matvec(d->base, x, y);
        const double s = d->alpha * k.dot(d->v.data(), x.data(), x.size());
        k.axpy(s, d->u.data(), y.data(), y.size());
    });
}

namespace {

struct Cycle {
    ColumnBlock V;
    DenseMatrix H;
    std::size_t k = 0;
    bool breakdown = false;
};

// One Arnoldi cycle started from r / beta. With stop_below > 0 the cycle ends
// as soon as the Givens-updated residual estimate drops under it.
Cycle run_cycle(const LinearOperator& op, std::span<const double> r, double beta, std::size_t ell,
                double stop_below, std::uint64_t& mv) {
    const auto& kt = kernels::active();
    const std::size_t n = op.dimension();
    Cycle c;
    c.V = ColumnBlock(n, ell + 1);
    c.H = DenseMatrix(ell + 1, ell);
    for (std::size_t i = 0; i < n; ++i) c.V(i, 0) = r[i] / beta;

    Vector cs(ell), sn(ell), g(ell + 1, 0.0), h(ell + 1);
    g[0] = beta;
    Vector w(n);
    for (std::size_t j = 0; j < ell; ++j) {
        op.apply(c.V.col(j), w);
        ++mv;
        const double wnorm = norm2(w);
        require_finite(wnorm, "Arnoldi");
        std::fill(h.begin(), h.end(), 0.0);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t i = 0; i <= j; ++i) {
                const double hij = kt.dot(c.V.col(i).data(), w.data(), n);
                kt.axpy(-hij, c.V.col(i).data(), w.data(), n);
                h[i] += hij;
            }
        const double hnext = norm2(w);
        for (std::size_t i = 0; i <= j; ++i) c.H(i, j) = h[i];
        c.H(j + 1, j) = hnext;

        // Givens bookkeeping for the running residual estimate.
        for (std::size_t i = 0; i < j; ++i) {
            const double t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        const double rho = std::hypot(h[j], hnext);
        cs[j] = rho > 0 ? h[j] / rho : 1.0;
        sn[j] = rho > 0 ? hnext / rho : 0.0;
        g[j + 1] = -sn[j] * g[j];
        g[j] = cs[j] * g[j];

        c.k = j + 1;
        if (hnext <= 1e-14 * wnorm) {
            c.breakdown = true;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) c.V(i, j + 1) = w[i] / hnext;
        if (stop_below > 0.0 && std::abs(g[j + 1]) < stop_below) break;
    }
    const std::size_t k = c.k;
    const std::size_t hr = c.breakdown ? k : k + 1;
    DenseMatrix hk(hr, k);
    for (std::size_t i = 0; i < hr; ++i)
        for (std::size_t j = 0; j < k; ++j) hk(i, j) = c.H(i, j);
    c.H = std::move(hk);
    c.V.truncate_cols(hr);
    return c;
}

}  // namespace

ArnoldiResult arnoldi(const LinearOperator& op, std::span<const double> v1, std::size_t ell) {
    require_dims(v1.size() == op.dimension(), "Arnoldi start vector length");
    if (ell == 0) throw InputError("Arnoldi needs at least one step");
    const double nv = norm2(v1);
    if (std::abs(nv - 1.0) > 1e-12) throw InputError("Arnoldi start vector must have unit norm");
    std::uint64_t mv = 0;
    Cycle c = run_cycle(op, v1, 1.0, ell, 0.0, mv);
    ArnoldiResult out;
    out.V = std::move(c.V);
    out.H = std::move(c.H);
    out.k = c.k;
    if (c.breakdown) out.breakdown = c.k;
    return out;
}

GmresResult gmres_restarted(const LinearOperator& op, std::span<const double> b,
                            std::span<const double> x0, const GmresConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const auto& kt = kernels::active();
    const std::size_t n = op.dimension();
    require_dims(b.size() == n, "GMRES right-hand side length");
    require_dims(x0.empty() || x0.size() == n, "GMRES initial guess length");
    if (cfg.restart == 0) throw InputError("GMRES restart length must be at least 1");
    if (!(cfg.tol > 0.0)) throw InputError("GMRES tolerance must be positive");

    GmresResult out;
    SolveReport& rep = out.report;
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    Vector r(b.begin(), b.end());
    if (x0.empty()) {
        out.x.assign(n, 0.0);
    } else {
        out.x.assign(x0.begin(), x0.end());
        Vector ax = op.apply(out.x);
        ++rep.mv_count;
        for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
    }
    double beta = norm2(r);
    require_finite(beta, "GMRES residual");
    rep.initial_residual = beta;
    rep.final_residual = beta;
    const std::size_t ell = std::min(cfg.restart, std::max<std::size_t>(n, 1));

    while (beta >= cfg.tol) {
        if (rep.outer_iterations >= cfg.max_outer) {
            rep.wall_time = elapsed();
            throw GmresConvergenceError("GMRES did not converge in " + std::to_string(cfg.max_outer) +
                                            " restarts (residual " + std::to_string(beta) + ")",
                                        rep);
        }
        Cycle c = run_cycle(op, r, beta, ell, cfg.tol, rep.mv_count);
        const LeastSquaresSolution ls = hessenberg_lsq(c.H, beta);
        for (double v : ls.y) require_finite(v, "GMRES least-squares solution");
        kt.gemv_n(c.V.data(), n, n, c.k, ls.y.data(), out.x.data());

        ++rep.outer_iterations;
        rep.inner_iterations_total += c.k;
        rep.inner_per_outer.push_back(c.k);
        const double est = ls.residual;

        if (est < cfg.tol || c.breakdown) {
            Vector ax = op.apply(out.x);
            ++rep.mv_count;
            ++rep.explicit_checks;
            for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
            beta = norm2(r);
            require_finite(beta, "GMRES residual");
            rep.residual_history.push_back(est);
            continue;
        }
        // r = V_{k+1} (beta e1 - H y)
        Vector g(c.H.rows(), 0.0);
        g[0] = beta;
        for (std::size_t i = 0; i < c.H.rows(); ++i)
            for (std::size_t j = 0; j < c.k; ++j) g[i] -= c.H(i, j) * ls.y[j];
        std::fill(r.begin(), r.end(), 0.0);
        kt.gemv_n(c.V.data(), n, n, c.H.rows(), g.data(), r.data());
        beta = norm2(r);
        require_finite(beta, "GMRES residual");
        rep.residual_history.push_back(beta);
    }
    rep.final_residual = beta;
    rep.wall_time = elapsed();
    return out;
}

RichardsonStep richardson_step(const LinearOperator& op, std::span<const double> r) {
    const auto& kt = kernels::active();
    require_dims(r.size() == op.dimension(), "Richardson residual length");
    const Vector ar = op.apply(r);
    const double aa = kt.dot(ar.data(), ar.data(), ar.size());
    if (!(aa > 0.0)) throw NumericalError("Richardson step: A r vanishes");
    RichardsonStep s;
    s.alpha = kt.dot(ar.data(), r.data(), r.size()) / aa;
    s.r_next.assign(r.begin(), r.end());
    kt.axpy(-s.alpha, ar.data(), s.r_next.data(), s.r_next.size());
    return s;
}

}  // namespace dpinv
