#include <algorithm>
#include <cmath>
#include <string>

#include "dpinv/laplacian.hpp"
#include "dpinv/parallel.hpp"

namespace dpinv {

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void check_sign_pattern(const SparseMatrix& L, PropertyReport& r) {
    r.sign_pattern = true;
    for (std::size_t i = 0; i < L.rows() && r.sign_pattern; ++i) {
        if (!(L.coeff(i, i) > 0.0)) {
            r.sign_pattern = false;
            r.failures.push_back("(Pb) violated: diagonal entry " + std::to_string(i) +
                                 " is not strictly positive");
            break;
        }
        const auto cols = L.row_cols(i);
        const auto vals = L.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (static_cast<std::size_t>(cols[k]) != i && vals[k] > 0.0) {
                r.sign_pattern = false;
                r.failures.push_back("(Pb) violated: off-diagonal entry (" + std::to_string(i) +
                                     ", " + std::to_string(cols[k]) + ") is positive");
                break;
            }
    }
}

void check_irreducible(const SparseMatrix& L, PropertyReport& r) {
    r.irreducible = is_irreducible(L);
    if (!r.irreducible) r.failures.push_back("(Pa) violated: matrix is reducible");
}

bool all_positive(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

}  // namespace

PropertyReport check_properties(const SparseMatrix& L, std::span<const double> x) {
    require_dims(L.rows() == L.cols(), "property check needs a square matrix");
    PropertyReport r;
    check_irreducible(L, r);
    check_sign_pattern(L, r);
    if (!x.empty()) {
        require_dims(x.size() == L.rows(), "null vector length");
        const Vector lx = matvec(L, x);
        r.null_residual = max_abs(lx);
        const double tol = 1e-8 * max_abs(L.values()) * max_abs(x);
        r.null_vector = all_positive(x) && r.null_residual <= tol;
        if (!*r.null_vector)
            r.failures.push_back(all_positive(x)
                                     ? "(Pc) violated: ||L x|| = " + std::to_string(r.null_residual)
                                     : std::string("(Pc) violated: x is not strictly positive"));
    }
    return r;
}

PropertyReport check_mmatrix_properties(const SparseMatrix& L11, std::span<const double> w) {
    require_dims(L11.rows() == L11.cols() && w.size() == L11.rows(), "M-matrix check dimensions");
    PropertyReport r;
    check_irreducible(L11, r);
    check_sign_pattern(L11, r);
    const Vector lw = matvec(L11, w);
    r.mmatrix_vector = all_positive(w) && all_positive(lw);
    if (!*r.mmatrix_vector) r.failures.push_back("(Pc') violated: need w > 0 and L11 w > 0");
    return r;
}

GeneralLaplacian::GeneralLaplacian(SparseMatrix L, Vector x) : L_(std::move(L)), x_(std::move(x)) {
    require_dims(L_.rows() == L_.cols(), "Laplacian must be square");
    require_dims(x_.size() == L_.rows(), "null vector length");
    if (L_.rows() < 2) throw InputError("Laplacian needs at least two nodes");
    const PropertyReport r = check_properties(L_, x_);
    if (!r.ok()) throw InputError(r.failures.front());
}

GeneralLaplacian embed_mmatrix(const SparseMatrix& L11, std::span<const double> w,
                               std::span<const double> v1) {
    const std::size_t m = L11.rows();
    if (m == 0) throw InputError("empty block");
    const PropertyReport r = check_mmatrix_properties(L11, w);
    if (!r.ok()) throw InputError(r.failures.front());
    Vector left(m, 1.0);
    if (!v1.empty()) {
        require_dims(v1.size() == m, "left weight length");
        if (!all_positive(v1)) throw InputError("left weight must be strictly positive");
        left.assign(v1.begin(), v1.end());
    }
    const Vector lw = matvec(L11, w);
    const Vector vl = matvec_transpose(L11, left);
    for (std::size_t j = 0; j < m; ++j)
        if (vl[j] < 0.0)
            throw InputError("(Pb) violated in the border row: column " + std::to_string(j) +
                             " has negative weighted sum; pass a left weight v1 with v1^T L11 >= 0");
    double corner = 0.0;
    for (std::size_t i = 0; i < m; ++i) corner += left[i] * lw[i];

    std::vector<Triplet> t;
    t.reserve(L11.nnz() + 2 * m + 1);
    for (std::size_t i = 0; i < m; ++i) {
        const auto cols = L11.row_cols(i);
        const auto vals = L11.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            t.push_back({i, static_cast<std::size_t>(cols[k]), vals[k]});
        t.push_back({i, m, -lw[i]});
        if (vl[i] != 0.0) t.push_back({m, i, -vl[i]});
    }
    t.push_back({m, m, corner});
    Vector x(w.begin(), w.end());
    x.push_back(1.0);
    return GeneralLaplacian(SparseMatrix::from_triplets(m + 1, m + 1, std::move(t)), std::move(x));
}

GeneralPinvResult general_pinv(const GeneralLaplacian& lt, std::span<const NodeId> J,
                               const GeneralPinvOptions& opt) {
    const SparseMatrix& L = lt.L();
    const Vector& x = lt.x();
    const std::size_t n = L.rows();
    for (NodeId j : J)
        if (j >= n)
            throw InputError("column " + std::to_string(j) + " out of range for n = " + std::to_string(n));

    // Rescale to unit right null vector, then to a random walk.
    const SparseMatrix lhat = scale_rows_cols(L, Vector(n, 1.0), x);
    const Vector dhat = diagonal(lhat);
    std::vector<Triplet> pt;
    pt.reserve(lhat.nnz());
    for (std::size_t i = 0; i < n; ++i) {
        const auto cols = lhat.row_cols(i);
        const auto vals = lhat.row_values(i);
        double off = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (static_cast<std::size_t>(cols[k]) != i) off -= vals[k];
        if (!(off > 0.0)) throw InputError("row " + std::to_string(i) + " has no off-diagonal weight");
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (static_cast<std::size_t>(cols[k]) != i && vals[k] != 0.0)
                pt.push_back({i, static_cast<std::size_t>(cols[k]), -vals[k] / off});
    }
    const SparseMatrix phat = SparseMatrix::from_triplets(n, n, std::move(pt));

    GeneralPinvResult res;
    res.stationary = stationary_distribution(phat, opt.subspace);
    res.pi = res.stationary.pi;
    const EulerianSystem sys(phat, res.pi, LaplacianKind::diag_scaled);

    const std::size_t p =
        opt.pivot.value_or(static_cast<std::size_t>(std::max_element(res.pi.begin(), res.pi.end()) - res.pi.begin()));
    if (p >= n) throw InputError("pivot out of range");
    res.pivot = p;

    Vector sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = std::sqrt(res.pi[i]);

    res.u = x;
    res.v.resize(n);
    double vu = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        res.v[i] = res.pi[i] / dhat[i];
        vu += res.v[i] * x[i];
    }
    for (double& e : res.v) e /= vu;
    const Vector& u = res.u;
    const Vector& v = res.v;

    // Inverse of the reduced diagonally scaled block applied to z1 (zero at
    // the pivot), mapped back to the original scaling. Returns a full-length
    // vector whose pivot entry is zero.
    auto reduced_solve = [&](Vector z, SolveReport& rep) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != p) s += sq[i] * z[i];
        z[p] = -s / sq[p];
        ColumnSolve y = pinv_apply(sys, z, opt.gmres);
        rep = std::move(y.report);
        Vector g(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            if (i != p) g[i] = x[i] / sq[i] * (y.column[i] - sq[i] / sq[p] * y.column[p]);
        return g;
    };

    std::vector<NodeId> cols(J.begin(), J.end());
    std::vector<Vector> gcols(cols.size());
    res.reports.resize(cols.size());
    Vector w;
    parallel_for(cols.size() + 1, opt.threads, [&](std::size_t task) {
        if (task == cols.size()) {
            Vector z1(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                if (i != p) z1[i] = sq[i] / dhat[i] * v[i];
            w = reduced_solve(std::move(z1), res.w_report);
            return;
        }
        const NodeId j = cols[task];
        if (j == p) return;
        Vector z1(n, 0.0);
        z1[j] = sq[j] / dhat[j];
        gcols[task] = reduced_solve(std::move(z1), res.reports[task]);
    });

    double uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    for (double& e : w) e /= vv;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (i != p) s += u[i] * w[i];
    s /= uu;

    res.columns = cols;
    res.values = ColumnBlock(n, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const NodeId j = cols[c];
        auto out = res.values.col(c);
        if (j == p) {
            for (std::size_t i = 0; i < n; ++i)
                out[i] = i == p ? u[p] * v[p] * s : v[p] * s * u[i] - v[p] * w[i];
            continue;
        }
        const Vector& g = gcols[c];
        double t = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != p) t += u[i] * g[i];
        t /= uu;
        for (std::size_t i = 0; i < n; ++i)
            out[i] = i == p ? u[p] * s * v[j] - u[p] * t
                            : g[i] - u[i] * t - w[i] * v[j] + s * u[i] * v[j];
    }
    return res;
}

}  // namespace dpinv
