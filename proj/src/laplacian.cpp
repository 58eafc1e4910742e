#include "dpinv/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "dpinv/kernels.hpp"
#include "dpinv/parallel.hpp"

namespace dpinv {

LaplacianKind parse_laplacian_kind(std::string_view code) {
    if (code == "r") return LaplacianKind::random_walk;
    if (code == "d") return LaplacianKind::diag_scaled;
    if (code == "p") return LaplacianKind::normalized;
    if (code == "a") return LaplacianKind::unnormalized;
    throw InputError("unknown Laplacian kind '" + std::string(code) + "' (expected r, d, p or a)");
}

std::string_view kind_code(LaplacianKind kind) {
    switch (kind) {
        case LaplacianKind::random_walk: return "r";
        case LaplacianKind::diag_scaled: return "d";
        case LaplacianKind::normalized: return "p";
        case LaplacianKind::unnormalized: return "a";
    }
    return "?";
}

namespace {

void require_positive(std::span<const double> v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!(v[i] > 0.0))
            throw InputError(std::string(what) + " must be strictly positive (entry " +
                             std::to_string(i) + ")");
}

}  // namespace

SparseMatrix build_laplacian(const SparseMatrix& P, std::span<const double> pi,
                             std::span<const double> d, LaplacianKind kind) {
    const std::size_t n = P.rows();
    require_dims(P.cols() == n, "Laplacian needs a square transition matrix");
    const Vector ones(n, 1.0);
    switch (kind) {
        case LaplacianKind::normalized:
            return diagonal_minus(ones, P);
        case LaplacianKind::random_walk:
            require_dims(pi.size() == n, "stationary vector length");
            require_positive(pi, "stationary vector");
            return diagonal_minus(pi, scale_rows_cols(P, pi, ones));
        case LaplacianKind::unnormalized:
            require_dims(d.size() == n, "out-degree vector length");
            require_positive(d, "out-degree vector");
            return diagonal_minus(d, scale_rows_cols(P, d, ones));
        case LaplacianKind::diag_scaled: {
            require_dims(pi.size() == n, "stationary vector length");
            require_positive(pi, "stationary vector");
            Vector s(n), sinv(n);
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = std::sqrt(pi[i]);
                sinv[i] = 1.0 / s[i];
            }
            return diagonal_minus(ones, scale_rows_cols(P, s, sinv));
        }
    }
    throw InputError("unknown Laplacian kind");
}

EulerianCheck check_eulerian(const SparseMatrix& L, std::span<const double> w) {
    require_dims(L.rows() == L.cols() && w.size() == L.rows(), "Eulerian check dimensions");
    EulerianCheck c;
    const Vector lw = matvec(L, w);
    const Vector ltw = matvec_transpose(L, w);
    for (double v : lw) c.right_residual = std::max(c.right_residual, std::abs(v));
    for (double v : ltw) c.left_residual = std::max(c.left_residual, std::abs(v));
    double lmax = 0.0, wmax = 0.0;
    for (double v : L.values()) lmax = std::max(lmax, std::abs(v));
    for (double v : w) wmax = std::max(wmax, std::abs(v));
    c.ok = std::max(c.right_residual, c.left_residual) <= 1e-8 * lmax * wmax;
    return c;
}

double eulerian_backward_error(const SparseMatrix& L, std::span<const double> w) {
    require_dims(L.rows() == L.cols() && w.size() == L.rows(), "Eulerian check dimensions");
    const auto& k = kernels::active();
    const Vector lw = matvec(L, w);
    const Vector ltw = matvec_transpose(L, w);
    const double r = std::max(std::sqrt(k.dot(lw.data(), lw.data(), lw.size())),
                              std::sqrt(k.dot(ltw.data(), ltw.data(), ltw.size())));
    const auto vals = L.values();
    const double scale = std::sqrt(k.dot(vals.data(), vals.data(), vals.size())) *
                         std::sqrt(k.dot(w.data(), w.data(), w.size()));
    return scale > 0.0 ? r / scale : r;
}

namespace {

std::string fmt_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

Vector eulerian_null_vector(LaplacianKind kind, std::span<const double> pi) {
    const std::size_t n = pi.size();
    Vector u(n);
    if (kind == LaplacianKind::random_walk) {
        std::fill(u.begin(), u.end(), 1.0 / std::sqrt(static_cast<double>(n)));
        return u;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = std::sqrt(pi[i]);
        s += u[i] * u[i];
    }
    s = std::sqrt(s);
    for (double& v : u) v /= s;
    return u;
}

SparseMatrix eulerian_laplacian(const SparseMatrix& P, std::span<const double> pi,
                                LaplacianKind kind) {
    if (kind != LaplacianKind::random_walk && kind != LaplacianKind::diag_scaled)
        throw InputError("Eulerian systems are built for kinds r and d only");
    return build_laplacian(P, pi, {}, kind);
}

}  // namespace

EulerianSystem::EulerianSystem(const SparseMatrix& P, Vector pi, LaplacianKind kind,
                               double shift_alpha)
    : kind_(kind),
      L_(eulerian_laplacian(P, pi, kind)),
      u_(eulerian_null_vector(kind, pi)),
      pi_(std::move(pi)),
      alpha_(shift_alpha),
      op_(rank_one_shifted(L_, u_, u_, shift_alpha)) {
    if (shift_alpha == 0.0 || !std::isfinite(shift_alpha))
        throw InputError("rank-one shift must be finite and nonzero");
    const EulerianCheck c = check_eulerian(L_, u_);
    if (!c.ok && !(eulerian_backward_error(L_, u_) <= 1e-8))
        throw InputError("Laplacian is not Eulerian for the given stationary vector (residuals " +
                         fmt_sci(c.right_residual) + ", " + fmt_sci(c.left_residual) + ")");
}

ColumnSolve pinv_apply(const EulerianSystem& sys, std::span<const double> z, const GmresConfig& cfg) {
    require_dims(z.size() == sys.size(), "pseudo-inverse apply length");
    GmresResult g = gmres_restarted(sys.shifted(), z, {}, cfg);
    const auto& u = sys.u();
    const double c = kernels::active().dot(u.data(), z.data(), z.size()) / sys.shift_alpha();
    kernels::active().axpy(-c, u.data(), g.x.data(), g.x.size());
    return {std::move(g.x), std::move(g.report)};
}

ColumnSolve pinv_column(const EulerianSystem& sys, NodeId j, const GmresConfig& cfg) {
    if (j >= sys.size())
        throw InputError("column " + std::to_string(j) + " out of range for n = " +
                         std::to_string(sys.size()));
    Vector e(sys.size(), 0.0);
    e[j] = 1.0;
    return pinv_apply(sys, e, cfg);
}

PinvBlock pinv_columns(const EulerianSystem& sys, std::span<const NodeId> J, const GmresConfig& cfg,
                       std::size_t threads) {
    for (NodeId j : J)
        if (j >= sys.size())
            throw InputError("column " + std::to_string(j) + " out of range for n = " +
                             std::to_string(sys.size()));
    PinvBlock out;
    out.columns.assign(J.begin(), J.end());
    out.values = ColumnBlock(sys.size(), J.size());
    out.reports.resize(J.size());
    parallel_for(J.size(), threads, [&](std::size_t c) {
        ColumnSolve s = pinv_column(sys, J[c], cfg);
        std::copy(s.column.begin(), s.column.end(), out.values.col(c).begin());
        out.reports[c] = std::move(s.report);
    });
    return out;
}

}  // namespace dpinv
