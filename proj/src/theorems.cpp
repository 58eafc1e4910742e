#include <cmath>
#include <memory>
#include <string>

#include "dpinv/laplacian.hpp"

namespace dpinv {

namespace {

std::size_t resolve_pivot(std::size_t n, std::optional<std::size_t> pivot) {
    if (n == 0) throw InputError("empty matrix");
    const std::size_t p = pivot.value_or(n - 1);
    if (p >= n) throw InputError("pivot " + std::to_string(p) + " out of range");
    return p;
}

std::vector<std::size_t> others(std::size_t n, std::size_t p) {
    std::vector<std::size_t> o;
    o.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        if (i != p) o.push_back(i);
    return o;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void require_pivot_positive(std::span<const double> u, std::span<const double> v, std::size_t p) {
    if (!(u[p] > 0.0) || !(v[p] > 0.0))
        throw InputError("null vector components at the pivot must be positive");
}

}  // namespace

DenseMatrix reduced_from_pinv_general(const DenseMatrix& B, std::span<const double> u,
                                      std::span<const double> v, std::optional<std::size_t> pivot) {
    const std::size_t n = B.rows();
    require_dims(B.cols() == n && u.size() == n && v.size() == n, "reduced inverse dimensions");
    const std::size_t p = resolve_pivot(n, pivot);
    require_pivot_positive(u, v, p);
    const auto o = others(n, p);
    const double un = u[p], vn = v[p], bnn = B(p, p);
    DenseMatrix g(n - 1, n - 1);
    for (std::size_t a = 0; a + 1 < n; ++a)
        for (std::size_t b = 0; b + 1 < n; ++b) {
            const std::size_t i = o[a], j = o[b];
            g(a, b) = B(i, j) - u[i] / un * B(p, j) - B(i, p) * v[j] / vn +
                      bnn / (un * vn) * u[i] * v[j];
        }
    return g;
}

DenseMatrix pinv_from_reduced_general(const DenseMatrix& A11_inv, std::span<const double> u,
                                      std::span<const double> v, std::optional<std::size_t> pivot) {
    const std::size_t m = A11_inv.rows();
    const std::size_t n = m + 1;
    require_dims(A11_inv.cols() == m && u.size() == n && v.size() == n, "bordered inverse dimensions");
    const std::size_t p = resolve_pivot(n, pivot);
    require_pivot_positive(u, v, p);
    const auto o = others(n, p);
    const double uu = dot(u, u), vv = dot(v, v), un = u[p], vn = v[p];
    Vector u1(m), v1(m);
    for (std::size_t a = 0; a < m; ++a) {
        u1[a] = u[o[a]];
        v1[a] = v[o[a]];
    }
    Vector w = A11_inv * std::span<const double>(v1);
    for (double& x : w) x /= vv;
    Vector t = A11_inv.transposed() * std::span<const double>(u1);
    for (double& x : t) x /= uu;
    const double s = dot(u1, w) / uu;

    DenseMatrix B(n, n);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b)
            B(o[a], o[b]) = A11_inv(a, b) - u1[a] * t[b] - w[a] * v1[b] + s * u1[a] * v1[b];
        B(o[a], p) = vn * s * u1[a] - vn * w[a];
        B(p, o[a]) = un * s * v1[a] - un * t[a];
    }
    B(p, p) = un * vn * s;
    return B;
}

DenseMatrix reduced_inverse_from_pinv(const DenseMatrix& B, std::span<const double> u,
                                      std::optional<std::size_t> pivot) {
    return reduced_from_pinv_general(B, u, u, pivot);
}

DenseMatrix pinv_from_reduced(const DenseMatrix& A11_inv, std::span<const double> u,
                              std::optional<std::size_t> pivot) {
    const double nu = std::sqrt(dot(u, u));
    if (!(nu > 0.0)) throw InputError("null vector must be nonzero");
    Vector un(u.begin(), u.end());
    for (double& x : un) x /= nu;
    return pinv_from_reduced_general(A11_inv, un, un, pivot);
}

RankOneSolver dense_rank_one_solver(const DenseMatrix& L, std::span<const double> u,
                                    std::span<const double> v, double alpha) {
    const std::size_t n = L.rows();
    require_dims(L.cols() == n && u.size() == n && v.size() == n, "rank-one solver dimensions");
    DenseMatrix c = L;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c(i, j) += alpha * u[i] * v[j];
    auto lu = std::make_shared<const LuFactorization>(std::move(c));
    RankOneSolver s;
    s.n = n;
    s.solve = [lu](std::span<const double> b) { return lu->solve(b); };
    s.solve_transpose = [lu](std::span<const double> b) { return lu->solve_transpose(b); };
    return s;
}

RankOneSolver iterative_rank_one_solver(const SparseMatrix& L, std::span<const double> u,
                                        std::span<const double> v, double alpha,
                                        const GmresConfig& cfg) {
    const std::size_t n = L.rows();
    require_dims(L.cols() == n && u.size() == n && v.size() == n, "rank-one solver dimensions");
    const Vector uu(u.begin(), u.end()), vv(v.begin(), v.end());
    const LinearOperator op = rank_one_shifted(L, uu, vv, alpha);
    const LinearOperator opt = rank_one_shifted(transpose(L), vv, uu, alpha);
    RankOneSolver s;
    s.n = n;
    s.solve = [op, cfg](std::span<const double> b) { return gmres_restarted(op, b, {}, cfg).x; };
    s.solve_transpose = [opt, cfg](std::span<const double> b) {
        return gmres_restarted(opt, b, {}, cfg).x;
    };
    return s;
}

DenseMatrix pinv_rank1_general(const RankOneSolver& solver, std::span<const double> u,
                               std::span<const double> v, std::span<const NodeId> J) {
    const std::size_t n = solver.n;
    require_dims(u.size() == n && v.size() == n, "null vector lengths");
    for (NodeId j : J)
        if (j >= n) throw InputError("column " + std::to_string(j) + " out of range");
    const double uu = dot(u, u), vv = dot(v, v);
    if (!(uu > 0.0) || !(vv > 0.0)) throw InputError("null vectors must be nonzero");
    const Vector x = solver.solve(v);
    const Vector y = solver.solve_transpose(u);
    const double ux = dot(u, x);
    DenseMatrix out(n, J.size());
    Vector e(n, 0.0);
    for (std::size_t c = 0; c < J.size(); ++c) {
        const NodeId j = J[c];
        e[j] = 1.0;
        const Vector col = solver.solve(e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            out(i, c) = col[i] - u[i] * y[j] / uu - x[i] * v[j] / vv + ux / (uu * vv) * u[i] * v[j];
    }
    return out;
}

DenseMatrix pinv_rank1_general(const RankOneSolver& solver, std::span<const double> u,
                               std::span<const double> v) {
    std::vector<NodeId> all(solver.n);
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return pinv_rank1_general(solver, u, v, all);
}

}  // namespace dpinv
