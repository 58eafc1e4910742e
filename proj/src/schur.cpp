#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "dpinv/dense.hpp"

namespace dpinv {

namespace {

// Householder reduction to upper Hessenberg form, accumulating into u.
void hessenberg(DenseMatrix& h, DenseMatrix& u) {
    const std::size_t n = h.rows();
    Vector v(n);
    for (std::size_t m = 1; m + 1 < n; ++m) {
        double scale = 0.0;
        for (std::size_t i = m; i < n; ++i) scale += std::abs(h(i, m - 1));
        if (scale == 0.0) continue;
        double norm2 = 0.0;
        for (std::size_t i = m; i < n; ++i) {
            v[i] = h(i, m - 1) / scale;
            norm2 += v[i] * v[i];
        }
        double g = std::sqrt(norm2);
        if (v[m] > 0) g = -g;
        const double hh = norm2 - v[m] * g;
        v[m] -= g;
        for (std::size_t j = 0; j < n; ++j) {
            double f = 0.0;
            for (std::size_t i = m; i < n; ++i) f += v[i] * h(i, j);
            f /= hh;
            for (std::size_t i = m; i < n; ++i) h(i, j) -= f * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double f = 0.0;
            for (std::size_t j = m; j < n; ++j) f += v[j] * h(i, j);
            f /= hh;
            for (std::size_t j = m; j < n; ++j) h(i, j) -= f * v[j];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double f = 0.0;
            for (std::size_t j = m; j < n; ++j) f += v[j] * u(i, j);
            f /= hh;
            for (std::size_t j = m; j < n; ++j) u(i, j) -= f * v[j];
        }
        h(m, m - 1) = scale * g;
        for (std::size_t i = m + 1; i < n; ++i) h(i, m - 1) = 0.0;
    }
}

// Francis double-shift QR on a Hessenberg matrix with full Schur updates.
void francis(DenseMatrix& h, DenseMatrix& u) {
    const int nn = static_cast<int>(h.rows());
    if (nn == 0) return;
    const double eps = std::numeric_limits<double>::epsilon();
    const long max_iter = 30L * std::max(nn, 1);
    long total = 0;
    double exshift = 0.0;
    double p = 0, q = 0, r = 0, s = 0, z = 0, w, x, y;

    double norm = 0.0;
    for (int i = 0; i < nn; ++i)
        for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(h(i, j));

    int n = nn - 1;
    int iter = 0;
    while (n >= 0) {
        int l = n;
        while (l > 0) {
            s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (s == 0.0) s = norm;
            if (std::abs(h(l, l - 1)) < eps * s) break;
            --l;
        }
        if (l == n) {
            h(n, n) += exshift;
            if (n > 0) h(n, n - 1) = 0.0;
            --n;
            iter = 0;
        } else if (l == n - 1) {
            w = h(n, n - 1) * h(n - 1, n);
            p = (h(n - 1, n - 1) - h(n, n)) / 2.0;
            q = p * p + w;
            z = std::sqrt(std::abs(q));
            h(n, n) += exshift;
            h(n - 1, n - 1) += exshift;
            if (l > 0) h(l, l - 1) = 0.0;
            if (q >= 0) {
                z = p >= 0 ? p + z : p - z;
                x = h(n, n - 1);
                s = std::abs(x) + std::abs(z);
                p = x / s;
                q = z / s;
                r = std::sqrt(p * p + q * q);
                p /= r;
                q /= r;
                for (int j = n - 1; j < nn; ++j) {
                    z = h(n - 1, j);
                    h(n - 1, j) = q * z + p * h(n, j);
                    h(n, j) = q * h(n, j) - p * z;
                }
                for (int i = 0; i <= n; ++i) {
                    z = h(i, n - 1);
                    h(i, n - 1) = q * z + p * h(i, n);
                    h(i, n) = q * h(i, n) - p * z;
                }
                for (int i = 0; i < nn; ++i) {
                    z = u(i, n - 1);
                    u(i, n - 1) = q * z + p * u(i, n);
                    u(i, n) = q * u(i, n) - p * z;
                }
                h(n, n - 1) = 0.0;
            }
            n -= 2;
            iter = 0;
        } else {
            if (++total > max_iter)
                throw NumericalError("real Schur: QR iteration did not converge in " +
                                     std::to_string(max_iter) + " sweeps");
            x = h(n, n);
            y = h(n - 1, n - 1);
            w = h(n, n - 1) * h(n - 1, n);
            if (iter == 10) {
                exshift += x;
                for (int i = 0; i <= n; ++i) h(i, i) -= x;
                s = std::abs(h(n, n - 1)) + std::abs(h(n - 1, n - 2));
                x = y = 0.75 * s;
                w = -0.4375 * s * s;
            }
            if (iter == 30) {
                s = (y - x) / 2.0;
                s = s * s + w;
                if (s > 0) {
                    s = std::sqrt(s);
                    if (y < x) s = -s;
                    s = x - w / ((y - x) / 2.0 + s);
                    for (int i = 0; i <= n; ++i) h(i, i) -= s;
                    exshift += s;
                    x = y = w = 0.964;
                }
            }
            ++iter;

            int m = n - 2;
            while (m >= l) {
                z = h(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
                q = h(m + 1, m + 1) - z - r - s;
                r = h(m + 2, m + 1);
                s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                if (std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r)) <
                    eps * (std::abs(p) *
                           (std::abs(h(m - 1, m - 1)) + std::abs(z) + std::abs(h(m + 1, m + 1)))))
                    break;
                --m;
            }
            for (int i = m + 2; i <= n; ++i) {
                h(i, i - 2) = 0.0;
                if (i > m + 2) h(i, i - 3) = 0.0;
            }
            for (int k = m; k <= n - 1; ++k) {
                const bool notlast = k != n - 1;
                if (k != m) {
                    p = h(k, k - 1);
                    q = h(k + 1, k - 1);
                    r = notlast ? h(k + 2, k - 1) : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x == 0.0) continue;
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = std::sqrt(p * p + q * q + r * r);
                if (p < 0) s = -s;
                if (s == 0.0) continue;
                if (k != m)
                    h(k, k - 1) = -s * x;
                else if (l != m)
                    h(k, k - 1) = -h(k, k - 1);
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;
                for (int j = k; j < nn; ++j) {
                    p = h(k, j) + q * h(k + 1, j);
                    if (notlast) {
                        p += r * h(k + 2, j);
                        h(k + 2, j) -= p * z;
                    }
                    h(k, j) -= p * x;
                    h(k + 1, j) -= p * y;
                }
                for (int i = 0; i <= std::min(n, k + 3); ++i) {
                    p = x * h(i, k) + y * h(i, k + 1);
                    if (notlast) {
                        p += z * h(i, k + 2);
                        h(i, k + 2) -= p * r;
                    }
                    h(i, k) -= p;
                    h(i, k + 1) -= p * q;
                }
                for (int i = 0; i < nn; ++i) {
                    p = x * u(i, k) + y * u(i, k + 1);
                    if (notlast) {
                        p += z * u(i, k + 2);
                        u(i, k + 2) -= p * r;
                    }
                    u(i, k) -= p;
                    u(i, k + 1) -= p * q;
                }
            }
        }
    }
    for (int i = 0; i < nn; ++i)
        for (int j = 0; j + 1 < i; ++j) h(i, j) = 0.0;
}

std::size_t block_size(const DenseMatrix& t, std::size_t i) {
    return (i + 1 < t.rows() && t(i + 1, i) != 0.0) ? 2 : 1;
}

// Swaps the block starting at k (size p) with the 1x1 block at k + p.
void swap_up(DenseMatrix& t, DenseMatrix& u, std::size_t k, std::size_t p) {
    const std::size_t n = t.rows();
    const std::size_t m = p + 1;
    const double lambda = t(k + p, k + p);
    DenseMatrix a(p, p);
    Vector rhs(p);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) a(i, j) = t(k + i, k + j);
        a(i, i) -= lambda;
        rhs[i] = -t(k + i, k + p);
    }
    Vector x(m, 1.0);
    const Vector x1 = lu_solve(a, rhs);
    std::copy(x1.begin(), x1.end(), x.begin());

    // Householder v with (I - 2 v v^T / v^T v) x = -sign(x0) |x| e1.
    double nx = 0.0;
    for (double xi : x) nx += xi * xi;
    nx = std::sqrt(nx);
    Vector v = x;
    v[0] += x[0] >= 0 ? nx : -nx;
    double vv = 0.0;
    for (double vi : v) vv += vi * vi;

    for (std::size_t j = k; j < n; ++j) {
        double f = 0.0;
        for (std::size_t i = 0; i < m; ++i) f += v[i] * t(k + i, j);
        f = 2.0 * f / vv;
        for (std::size_t i = 0; i < m; ++i) t(k + i, j) -= f * v[i];
    }
    for (std::size_t i = 0; i < std::min(n, k + m); ++i) {
        double f = 0.0;
        for (std::size_t j = 0; j < m; ++j) f += v[j] * t(i, k + j);
        f = 2.0 * f / vv;
        for (std::size_t j = 0; j < m; ++j) t(i, k + j) -= f * v[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
        double f = 0.0;
        for (std::size_t j = 0; j < m; ++j) f += v[j] * u(i, k + j);
        f = 2.0 * f / vv;
        for (std::size_t j = 0; j < m; ++j) u(i, k + j) -= f * v[j];
    }
    for (std::size_t i = 1; i < m; ++i) t(k + i, k) = 0.0;
    if (p == 1) t(k + 1, k) = 0.0;
}

}  // namespace

SchurForm real_schur(const DenseMatrix& b) {
    require_dims(b.rows() == b.cols(), "Schur decomposition needs a square matrix");
    for (double v : b.values())
        if (!std::isfinite(v)) throw NumericalError("real Schur: non-finite input entry");
    SchurForm s{DenseMatrix::identity(b.rows()), b};
    hessenberg(s.T, s.U);
    francis(s.T, s.U);
    return s;
}

SchurForm ordered_schur_leading(const DenseMatrix& b, double target, LeadingPolicy policy) {
    SchurForm s = real_schur(b);
    const std::size_t n = b.rows();
    if (n == 0) return s;

    std::optional<std::size_t> best;
    double best_dist = 0.0;
    double complex_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n;) {
        if (block_size(s.T, i) == 2) {
            const auto ev = schur_eigenvalues(s.T);
            complex_dist = std::min(complex_dist, std::abs(ev[i] - target));
            i += 2;
            continue;
        }
        const double d = std::abs(s.T(i, i) - target);
        if (!best || d < best_dist) {
            best = i;
            best_dist = d;
        }
        ++i;
    }
    if (!best) throw NumericalError("ordered Schur: no real eigenvalue to lead with");
    if (policy == LeadingPolicy::strict && complex_dist < best_dist)
        throw NumericalError("ordered Schur: eigenvalue nearest the target is complex");

    std::size_t pos = *best;
    while (pos > 0) {
        const std::size_t p = (pos >= 2 && s.T(pos - 1, pos - 2) != 0.0) ? 2 : 1;
        swap_up(s.T, s.U, pos - p, p);
        pos -= p;
    }
    return s;
}

std::vector<std::complex<double>> schur_eigenvalues(const DenseMatrix& t) {
    std::vector<std::complex<double>> ev;
    ev.reserve(t.rows());
    for (std::size_t i = 0; i < t.rows();) {
        if (block_size(t, i) == 1) {
            ev.emplace_back(t(i, i), 0.0);
            ++i;
            continue;
        }
        const double a = t(i, i), bb = t(i, i + 1), c = t(i + 1, i), d = t(i + 1, i + 1);
        const double half = (a + d) / 2.0;
        const double disc = (a - d) * (a - d) / 4.0 + bb * c;
        if (disc >= 0) {
            ev.emplace_back(half + std::sqrt(disc), 0.0);
            ev.emplace_back(half - std::sqrt(disc), 0.0);
        } else {
            ev.emplace_back(half, std::sqrt(-disc));
            ev.emplace_back(half, -std::sqrt(-disc));
        }
        i += 2;
    }
    return ev;
}

}  // namespace dpinv
