#include <doctest.h>

#include "dpinv/dense.hpp"
#include "fixtures.hpp"
#include "poly_roots.hpp"

using namespace dpinv;
using namespace dpinv::testing;

namespace {

double orthogonality_defect(const DenseMatrix& q) {
    return (q.transposed() * q - DenseMatrix::identity(q.cols())).max_abs();
}

DenseMatrix random_hessenberg(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    DenseMatrix h = random_dense(rows, cols, seed);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (i > j + 1) h(i, j) = 0.0;
    return h;
}

bool quasi_triangular(const DenseMatrix& t) {
    const std::size_t n = t.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j)
            if (t(i, j) != 0.0) return false;
    // No two consecutive nonzero subdiagonals.
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (t(i, i - 1) != 0.0 && t(i + 1, i) != 0.0) return false;
    return true;
}

}  // namespace

TEST_CASE("orthogonalize: already orthonormal input") {
    const DenseMatrix q = orthogonalize(DenseMatrix::identity(4));
    CHECK(orthogonality_defect(q) <= 1e-14);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(q(i, i)) == doctest::Approx(1.0));
}

TEST_CASE("orthogonalize: a single column is normalized") {
    const DenseMatrix q = orthogonalize(DenseMatrix{{3.0}, {4.0}});
    CHECK(q(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(q(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("orthogonalize: span is preserved for random 50x5 blocks") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const DenseMatrix v = random_dense(50, 5, seed);
        const DenseMatrix q = orthogonalize(v);
        CHECK(orthogonality_defect(q) <= 1e-12);
        const DenseMatrix proj = q * (q.transposed() * v);
        CHECK((proj - v).max_abs() <= 1e-12 * v.max_abs());
    }
}

TEST_CASE("orthonormalize: a dependent column needs a reseeder") {
    ColumnBlock b(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        b(i, 0) = 1.0 + i;
        b(i, 1) = 2.0 * (1.0 + i);
    }
    ColumnBlock copy = b;
    CHECK_THROWS_AS(orthonormalize(copy), RankDeficiencyError);
    std::size_t reseeded = 99;
    orthonormalize(b, [&](std::size_t c, std::span<double> col) {
        reseeded = c;
        for (std::size_t i = 0; i < col.size(); ++i) col[i] = (i % 2) ? 1.0 : -1.0;
    });
    CHECK(reseeded == 1);
    CHECK(orthogonality_defect(to_dense(b)) <= 1e-14);
}

TEST_CASE("ordered Schur: diagonal input") {
    const DenseMatrix b{{0.5, 0, 0}, {0, 1.0, 0}, {0, 0, 0.2}};
    const SchurForm s = ordered_schur_leading(b, 1.0);
    CHECK(s.T(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 0; i < 3; ++i) {
        double nz = 0;
        for (std::size_t j = 0; j < 3; ++j) nz += std::abs(s.U(i, j)) > 1e-12 ? 1 : 0;
        CHECK(nz == 1);
    }
    CHECK((s.U * s.T * s.U.transposed() - b).max_abs() <= 1e-14);
}

TEST_CASE("ordered Schur: rotation block with an appended unit eigenvalue") {
    const DenseMatrix rot{{0, -1}, {1, 0}};
    const SchurForm r = real_schur(rot);
    const auto ev = schur_eigenvalues(r.T);
    REQUIRE(ev.size() == 2);
    CHECK(std::abs(ev[0].imag()) == doctest::Approx(1.0));
    CHECK(std::abs(ev[0].real()) <= 1e-14);

    const DenseMatrix b{{0, -1, 0}, {1, 0, 0}, {0, 0, 1.0}};
    const SchurForm s = ordered_schur_leading(b, 1.0);
    CHECK(s.T(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.T(1, 0) == 0.0);
    CHECK((s.U * s.T * s.U.transposed() - b).max_abs() <= 1e-13);
}

TEST_CASE("ordered Schur: policies when no real eigenvalue exists") {
    const DenseMatrix rot{{0, -1}, {1, 0}};
    CHECK_THROWS_AS(ordered_schur_leading(rot, 1.0), NumericalError);
    CHECK_THROWS_AS(ordered_schur_leading(rot, 1.0, LeadingPolicy::nearest_real), NumericalError);
    // A complex pair nearer to the target than the only real eigenvalue.
    const DenseMatrix b{{0.9, -0.1, 0}, {0.1, 0.9, 0}, {0, 0, -0.5}};
    CHECK_THROWS_AS(ordered_schur_leading(b, 1.0, LeadingPolicy::strict), NumericalError);
    const SchurForm s = ordered_schur_leading(b, 1.0, LeadingPolicy::nearest_real);
    CHECK(s.T(0, 0) == doctest::Approx(-0.5));
}

TEST_CASE("Schur eigenvalues match characteristic polynomial roots") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const DenseMatrix b = random_dense(6, 6, seed);
        const SchurForm s = real_schur(b);
        const double d = multiset_distance(schur_eigenvalues(s.T), eigenvalues_by_polynomial(b));
        CHECK(d <= 1e-8);
    }
}

TEST_CASE("property: Schur reconstruction and orthogonality up to 50x50") {
    for (std::size_t n : {1u, 2u, 3u, 5u, 10u, 20u, 35u, 50u}) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            CAPTURE(n);
            const DenseMatrix b = random_dense(n, n, 100 * n + seed);
            const SchurForm s = real_schur(b);
            CHECK((b - s.U * s.T * s.U.transposed()).frobenius() <= 1e-10 * b.frobenius());
            CHECK(orthogonality_defect(s.U) <= 1e-11);
            CHECK(quasi_triangular(s.T));
            try {
                const SchurForm o = ordered_schur_leading(b, 1.0);
                CHECK((b - o.U * o.T * o.U.transposed()).frobenius() <= 1e-10 * b.frobenius());
                CHECK(orthogonality_defect(o.U) <= 1e-11);
                // The leading entry is the real eigenvalue closest to the target.
                double best = INFINITY;
                for (const auto& ev : schur_eigenvalues(s.T))
                    if (ev.imag() == 0.0) best = std::min(best, std::abs(ev.real() - 1.0));
                CHECK(std::abs(o.T(0, 0) - 1.0) == doctest::Approx(best).epsilon(1e-8));
                if (n > 1) CHECK(o.T(1, 0) == 0.0);
            } catch (const NumericalError&) {
                // A complex pair is nearest to the target; strict policy refuses.
            }
        }
    }
}

TEST_CASE("hessenberg_lsq: small cases") {
    auto a = hessenberg_lsq(DenseMatrix{{1.0}, {0.0}}, 3.0);
    CHECK(a.y[0] == doctest::Approx(3.0));
    CHECK(a.residual == doctest::Approx(0.0));
    auto b = hessenberg_lsq(DenseMatrix{{0.0}, {1.0}}, 1.0);
    CHECK(b.y[0] == doctest::Approx(0.0));
    CHECK(b.residual == doctest::Approx(1.0));
}

TEST_CASE("hessenberg_lsq matches normal equations and reports the true residual") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const DenseMatrix h = random_hessenberg(6, 5, seed);
        const double beta = 1.0 + seed;
        const auto ls = hessenberg_lsq(h, beta);
        Vector rhs(6, 0.0);
        rhs[0] = beta;
        const DenseMatrix hth = h.transposed() * h;
        const Vector htb = h.transposed() * std::span<const double>(rhs);
        const Vector y = lu_solve(hth, htb);
        CHECK(max_abs_diff(ls.y, y) <= 1e-10 * std::max(1.0, max_abs(y)));
        Vector r = h * std::span<const double>(ls.y);
        for (std::size_t i = 0; i < 6; ++i) r[i] = rhs[i] - r[i];
        CHECK(std::abs(norm2(r) - ls.residual) <= 1e-12 * beta);
    }
}

TEST_CASE("hessenberg_lsq after a breakdown (square H)") {
    const DenseMatrix h{{2.0, 1.0}, {1.0, 3.0}};
    const auto ls = hessenberg_lsq(h, 5.0);
    const Vector want = lu_solve(h, Vector{5.0, 0.0});
    CHECK(max_abs_diff(ls.y, want) <= 1e-14);
    CHECK(ls.residual <= 1e-14);
}

TEST_CASE("lu_solve") {
    CHECK(lu_solve(DenseMatrix::identity(3), Vector{1, 2, 3}) == Vector{1, 2, 3});
    const Vector x = lu_solve(DenseMatrix{{2, 0}, {0, 4}}, Vector{2, 4});
    CHECK(x[0] == 1.0);
    CHECK(x[1] == 1.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const DenseMatrix a = random_dense(20, 20, seed);
        const Vector b = random_vector(20, seed);
        const Vector y = lu_solve(a, b);
        Vector r = a * std::span<const double>(y);
        for (std::size_t i = 0; i < 20; ++i) r[i] -= b[i];
        CHECK(norm2(r) <= 1e-10 * norm2(b));
        const LuFactorization lu(a);
        const Vector yt = lu.solve_transpose(b);
        Vector rt = a.transposed() * std::span<const double>(yt);
        for (std::size_t i = 0; i < 20; ++i) rt[i] -= b[i];
        CHECK(norm2(rt) <= 1e-10 * norm2(b));
        CHECK((a * lu.inverse() - DenseMatrix::identity(20)).max_abs() <= 1e-10);
    }
}

TEST_CASE("lu_solve rejects singular matrices") {
    CHECK_THROWS_AS(lu_solve(DenseMatrix{{1, 2}, {2, 4}}, Vector{1, 1}), NumericalError);
    CHECK_THROWS_AS(LuFactorization(DenseMatrix(2, 2)), NumericalError);
}

TEST_CASE("dense helpers") {
    const DenseMatrix a{{1, 2}, {3, 4}};
    CHECK((a * DenseMatrix::identity(2) - a).max_abs() == 0.0);
    CHECK(a.transposed()(0, 1) == 3.0);
    CHECK(a.frobenius() == doctest::Approx(std::sqrt(30.0)));
    CHECK_THROWS_AS(a * DenseMatrix(3, 3), DimensionError);
    const ColumnBlock b = to_block(a);
    CHECK(b(1, 0) == 3.0);
    CHECK((to_dense(b) - a).max_abs() == 0.0);
}
