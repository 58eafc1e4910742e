#include "dpinv/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "dpinv/rng.hpp"

namespace dpinv::oracle {

namespace {

std::vector<std::size_t> others(std::size_t n, std::size_t k) {
    std::vector<std::size_t> o;
    for (std::size_t i = 0; i < n; ++i)
        if (i != k) o.push_back(i);
    return o;
}

DenseMatrix reduced_identity_minus(const DenseMatrix& P, std::size_t k) {
    const auto o = others(P.rows(), k);
    DenseMatrix m(o.size(), o.size());
    for (std::size_t a = 0; a < o.size(); ++a)
        for (std::size_t b = 0; b < o.size(); ++b) m(a, b) = (a == b ? 1.0 : 0.0) - P(o[a], o[b]);
    return m;
}

double rel(const DenseMatrix& diff, const DenseMatrix& ref) {
    const double d = diff.frobenius();
    const double r = ref.frobenius();
    return r > 0.0 ? d / r : d;
}

}  // namespace

Vector stationary_direct(const DenseMatrix& P) {
    const std::size_t n = P.rows();
    require_dims(P.cols() == n && n >= 1, "stationary_direct needs a square matrix");
    if (n == 1) return {1.0};
    const std::size_t m = n - 1;
    DenseMatrix a(m, m);
    Vector rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - P(j, i);
        rhs[i] = P(m, i);
    }
    Vector v = lu_solve(a, rhs);
    v.push_back(1.0);
    double s = 0.0;
    for (double x : v) s += x;
    for (double& x : v) x /= s;
    return v;
}

double PenroseReport::worst() const { return std::max({aba, bab, ab_sym, ba_sym}); }

PenroseReport penrose_check(const DenseMatrix& A, const DenseMatrix& B, double tol) {
    require_dims(A.rows() == B.cols() && A.cols() == B.rows(), "Penrose check shapes");
    const DenseMatrix ab = A * B;
    const DenseMatrix ba = B * A;
    PenroseReport r;
    r.tol = tol;
    r.aba = rel(ab * A - A, A);
    r.bab = rel(B * ab - B, B);
    r.ab_sym = rel(ab - ab.transposed(), ab);
    r.ba_sym = rel(ba - ba.transposed(), ba);
    r.pass = r.worst() <= tol;
    return r;
}

Vector hitting_times_direct(const DenseMatrix& P, std::size_t k) {
    const std::size_t n = P.rows();
    require_dims(P.cols() == n && k < n, "hitting_times_direct arguments");
    const auto o = others(n, k);
    const Vector h1 = lu_solve(reduced_identity_minus(P, k), Vector(o.size(), 1.0));
    Vector h(n, 0.0);
    for (std::size_t a = 0; a < o.size(); ++a) h[o[a]] = h1[a];
    return h;
}

DenseMatrix visits_direct(const DenseMatrix& P, std::size_t k) {
    const std::size_t n = P.rows();
    require_dims(P.cols() == n && k < n, "visits_direct arguments");
    const auto o = others(n, k);
    const DenseMatrix inv = LuFactorization(reduced_identity_minus(P, k)).inverse();
    DenseMatrix out(n, n);
    for (std::size_t a = 0; a < o.size(); ++a)
        for (std::size_t b = 0; b < o.size(); ++b) out(o[a], o[b]) = inv(a, b);
    return out;
}

MonteCarloResult monte_carlo_walk(const SparseMatrix& P, std::size_t i, std::size_t k,
                                  std::size_t trials, std::uint64_t seed) {
    const std::size_t n = P.rows();
    require_dims(P.cols() == n && i < n && k < n, "Monte Carlo arguments");
    if (trials < 2) throw InputError("Monte Carlo needs at least two trials");
    constexpr std::size_t kCap = 10'000'000;

    // Cumulative row distributions for inverse-CDF sampling.
    std::vector<Vector> cum(n);
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (double v : P.row_values(r)) cum[r].push_back(s += v);
        if (!(s > 0.0)) throw InputError("row " + std::to_string(r) + " has no outgoing probability");
    }
    Rng rng(seed, RngStream::monte_carlo);
    auto step = [&](std::size_t at) {
        const Vector& c = cum[at];
        const double x = rng.uniform() * c.back();
        const std::size_t pos = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), x) - c.begin());
        return static_cast<std::size_t>(P.row_cols(at)[std::min(pos, c.size() - 1)]);
    };
    auto walk = [&](std::size_t from, std::size_t to, std::vector<std::size_t>* counts) {
        std::size_t at = from, steps = 0;
        while (at != to) {
            if (counts) ++(*counts)[at];
            at = step(at);
            if (++steps > kCap)
                throw NumericalError("Monte Carlo walk from " + std::to_string(from) + " to " +
                                     std::to_string(to) + " exceeded 1e7 steps");
        }
        return static_cast<double>(steps);
    };

    MonteCarloResult r;
    r.trials = trials;
    double hs = 0, hs2 = 0, cs = 0, cs2 = 0;
    Vector vs(n, 0.0), vs2(n, 0.0);
    std::vector<std::size_t> counts(n);
    for (std::size_t t = 0; t < trials; ++t) {
        std::fill(counts.begin(), counts.end(), 0);
        const double h = walk(i, k, &counts);
        const double c = h + walk(k, i, nullptr);
        hs += h;
        hs2 += h * h;
        cs += c;
        cs2 += c * c;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = static_cast<double>(counts[j]);
            vs[j] += v;
            vs2[j] += v * v;
        }
    }
    const double T = static_cast<double>(trials);
    auto se = [T](double s, double s2) {
        const double mean = s / T;
        const double var = std::max(0.0, (s2 - T * mean * mean) / (T - 1.0));
        return std::sqrt(var / T);
    };
    r.hitting = hs / T;
    r.hitting_se = se(hs, hs2);
    r.commute = cs / T;
    r.commute_se = se(cs, cs2);
    r.visits.resize(n);
    r.visits_se.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        r.visits[j] = vs[j] / T;
        r.visits_se[j] = se(vs[j], vs2[j]);
    }
    return r;
}

Vector jacobi_eigenvalues(const DenseMatrix& S) {
    const std::size_t n = S.rows();
    require_dims(S.cols() == n, "Jacobi needs a square matrix");
    DenseMatrix a = S;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                total += a(i, j) * a(i, j);
                if (i != j) off += a(i, j) * a(i, j);
            }
        if (off <= 1e-30 * total || off == 0.0) {
            Vector ev(n);
            for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
            std::sort(ev.begin(), ev.end());
            return ev;
        }
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    throw NumericalError("Jacobi eigenvalue iteration hit its sweep cap");
}

SymmetricPartExtremes symmetric_part_extremes(const DenseMatrix& A) {
    const std::size_t n = A.rows();
    require_dims(A.cols() == n && n > 0, "symmetric part needs a square matrix");
    DenseMatrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (A(i, j) + A(j, i));
    SymmetricPartExtremes out;
    out.lambda_min_s = jacobi_eigenvalues(s).front();

    const DenseMatrix at = A.transposed();
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * std::sin(static_cast<double>(i) + 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 20000; ++it) {
        double nx = 0.0;
        for (double v : x) nx += v * v;
        nx = std::sqrt(nx);
        if (nx == 0.0) break;
        for (double& v : x) v /= nx;
        const Vector y = at * std::span<const double>(A * std::span<const double>(x));
        double next = 0.0;
        for (std::size_t i = 0; i < n; ++i) next += x[i] * y[i];
        x = y;
        const bool done = it > 10 && std::abs(next - lambda) <= 1e-13 * next;
        lambda = next;
        if (done) break;
    }
    out.two_norm = std::sqrt(lambda);
    return out;
}

DenseMatrix dense_pinv_reference(const DenseMatrix& L, std::span<const double> u,
                                 std::span<const double> v, double alpha) {
    const std::size_t n = L.rows();
    require_dims(L.cols() == n && u.size() == n && v.size() == n, "dense pseudo-inverse dimensions");
    DenseMatrix c = L;
    double uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        uu += u[i] * u[i];
        vv += v[i] * v[i];
        for (std::size_t j = 0; j < n; ++j) c(i, j) += alpha * u[i] * v[j];
    }
    const DenseMatrix cinv = LuFactorization(c).inverse();
    DenseMatrix pu = DenseMatrix::identity(n), pv = DenseMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            pu(i, j) -= u[i] * u[j] / uu;
            pv(i, j) -= v[i] * v[j] / vv;
        }
    return pu * cinv * pv;
}

Vector spectrum_moduli(const DenseMatrix& A) {
    const std::size_t n = A.rows();
    require_dims(A.cols() == n, "spectrum needs a square matrix");
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = A(i, j);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigenvalue solver failed");
    Vector mod(n);
    for (std::size_t i = 0; i < n; ++i) mod[i] = std::abs(es.eigenvalues()[static_cast<Eigen::Index>(i)]);
    std::sort(mod.begin(), mod.end(), std::greater<>());
    return mod;
}

}  // namespace dpinv::oracle
