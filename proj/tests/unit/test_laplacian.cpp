#include <doctest.h>

#include <algorithm>

#include "dpinv/graphgen.hpp"
#include "dpinv/laplacian.hpp"
#include "dpinv/oracle.hpp"
#include "dpinv/stationary.hpp"
#include "fixtures.hpp"

using namespace dpinv;
using namespace dpinv::testing;
using K = LaplacianKind;

namespace {

struct Chain {
    Transition t;
    Vector pi;
};

Chain chain_of(const Digraph& g) {
    Chain c{build_transition(g), {}};
    c.pi = oracle::stationary_direct(to_dense(c.t.P));
    return c;
}

DenseMatrix full_pinv(const EulerianSystem& sys, std::size_t threads = 1) {
    const auto J = all_ids(sys.size());
    GmresConfig cfg;
    cfg.tol = 1e-12;
    return to_dense(pinv_columns(sys, J, cfg, threads).values);
}

Vector ones(std::size_t n) { return Vector(n, 1.0); }

Vector normalized(Vector x) {
    const double s = norm2(x);
    for (double& v : x) v /= s;
    return x;
}

DenseMatrix outer(std::span<const double> a, std::span<const double> b) {
    DenseMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
    return m;
}

double rel_diff(const DenseMatrix& a, const DenseMatrix& b) {
    return (a - b).frobenius() / std::max(1e-300, b.frobenius());
}

// A random nullity-one matrix with positive null vectors u (right) and v (left).
struct NullityOne {
    DenseMatrix A;
    Vector u, v;
};

NullityOne random_nullity_one(std::size_t n, std::uint64_t seed) {
    const auto c = chain_of(random_strongly_connected(n, 2 * n, seed));
    Vector d(n);
    Rng rng(seed, 77);
    for (double& x : d) x = 0.5 + rng.uniform();
    // L = D (I - P) has right null vector 1 and left null vector pi / d.
    const DenseMatrix L = to_dense(build_laplacian(c.t.P, {}, d, K::unnormalized));
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = c.pi[i] / d[i];
    return {L, ones(n), v};
}

}  // namespace

TEST_CASE("build_laplacian examples") {
    const auto c3 = chain_of(cycle(3));
    const DenseMatrix lr = to_dense(build_laplacian(c3.t.P, c3.pi, {}, K::random_walk));
    const DenseMatrix perm = to_dense(c3.t.P);
    CHECK((lr - (1.0 / 3) * (DenseMatrix::identity(3) - perm)).max_abs() <= 1e-15);

    const auto g = random_strongly_connected(25, 50, 2);
    const auto cg = chain_of(g);
    const DenseMatrix lp = to_dense(build_laplacian(cg.t.P, {}, {}, K::normalized));
    CHECK((lp - (DenseMatrix::identity(25) - to_dense(cg.t.P))).max_abs() == 0.0);

    const auto c2 = chain_of(two_node_self_loop());
    const DenseMatrix ld = to_dense(build_laplacian(c2.t.P, c2.pi, {}, K::diag_scaled));
    DenseMatrix s(2, 2), si(2, 2);
    for (int i = 0; i < 2; ++i) {
        s(i, i) = std::sqrt(c2.pi[i]);
        si(i, i) = 1.0 / s(i, i);
    }
    const DenseMatrix want = s * (DenseMatrix::identity(2) - to_dense(c2.t.P)) * si;
    CHECK((ld - want).max_abs() <= 1e-14);

    const DenseMatrix la = to_dense(build_laplacian(cg.t.P, {}, cg.t.out_degree, K::unnormalized));
    for (std::size_t i = 0; i < 25; ++i) {
        double rs = 0.0;
        for (std::size_t j = 0; j < 25; ++j) rs += la(i, j);
        CHECK(std::abs(rs) <= 1e-12);
    }
}

TEST_CASE("build_laplacian input errors") {
    const auto c3 = chain_of(cycle(3));
    CHECK_THROWS_AS(build_laplacian(c3.t.P, {}, {}, K::random_walk), InputError);
    CHECK_THROWS_AS(build_laplacian(c3.t.P, c3.pi, {}, K::unnormalized), InputError);
    CHECK_THROWS_AS(build_laplacian(c3.t.P, Vector{0.5, 0.5, 0.0}, {}, K::diag_scaled), InputError);
    CHECK_THROWS_AS(parse_laplacian_kind("x"), InputError);
    for (auto code : {"r", "d", "p", "a"}) CHECK(kind_code(parse_laplacian_kind(code)) == code);
}

TEST_CASE("check_eulerian examples") {
    const auto g = random_strongly_connected(30, 60, 9);
    const auto c = chain_of(g);
    CHECK(check_eulerian(build_laplacian(c.t.P, c.pi, {}, K::random_walk), ones(30)).ok);
    Vector sq(30);
    for (std::size_t i = 0; i < 30; ++i) sq[i] = std::sqrt(c.pi[i]);
    CHECK(check_eulerian(build_laplacian(c.t.P, c.pi, {}, K::diag_scaled), sq).ok);
    CHECK(eulerian_backward_error(build_laplacian(c.t.P, c.pi, {}, K::diag_scaled), sq) <= 1e-14);

    const auto c2 = chain_of(two_node_self_loop());
    const auto e = check_eulerian(build_laplacian(c2.t.P, {}, {}, K::normalized), ones(2));
    CHECK(!e.ok);
    CHECK(e.right_residual <= 1e-15);
    CHECK(e.left_residual == doctest::Approx(0.5));
}

TEST_CASE("EulerianSystem invariants and rejection of a wrong pi") {
    const auto c = chain_of(random_strongly_connected(40, 80, 1));
    for (auto kind : {K::random_walk, K::diag_scaled}) {
        const EulerianSystem sys(c.t.P, c.pi, kind);
        CHECK(norm2(sys.u()) == doctest::Approx(1.0).epsilon(1e-14));
        for (double x : sys.u()) CHECK(x > 0.0);
        CHECK(norm2(matvec(sys.L(), sys.u())) <= 1e-8);
        CHECK(norm2(matvec_transpose(sys.L(), sys.u())) <= 1e-8);
    }
    CHECK_THROWS_AS(EulerianSystem(c.t.P, Vector(40, 1.0 / 40), K::diag_scaled), InputError);
    CHECK_THROWS_AS(EulerianSystem(c.t.P, c.pi, K::normalized), InputError);
    CHECK_THROWS_AS(EulerianSystem(c.t.P, c.pi, K::random_walk, 0.0), InputError);
}

TEST_CASE("pinv_column: 3-cycle kind r against the dense construction") {
    const auto c = chain_of(cycle(3));
    const EulerianSystem sys(c.t.P, c.pi, K::random_walk);
    const auto col = pinv_column(sys, 0);
    DenseMatrix shifted = to_dense(sys.L());
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) shifted(i, j) += 1.0 / 3;
    Vector want = lu_solve(shifted, Vector{1, 0, 0});
    for (double& x : want) x -= 1.0 / 3;
    CHECK(max_abs_diff(col.column, want) <= 1e-7);
    CHECK(std::abs(dot(col.column, sys.u())) <= 1e-8);
    CHECK_THROWS_AS(pinv_column(sys, 3), InputError);
}

TEST_CASE("pinv columns are orthogonal to u and the block is Penrose-valid") {
    const auto c2 = chain_of(two_node_self_loop());
    const EulerianSystem s2(c2.t.P, c2.pi, K::diag_scaled);
    const DenseMatrix m2 = full_pinv(s2);
    CHECK(oracle::penrose_check(to_dense(s2.L()), m2, 1e-7).pass);

    const auto c3 = chain_of(cycle(3));
    const EulerianSystem s3(c3.t.P, c3.pi, K::random_walk);
    CHECK(oracle::penrose_check(to_dense(s3.L()), full_pinv(s3), 1e-7).pass);

    const auto c = chain_of(random_strongly_connected(50, 100, 5));
    const EulerianSystem sys(c.t.P, c.pi, K::diag_scaled);
    for (std::size_t j = 0; j < 50; j += 7) CHECK(std::abs(dot(pinv_column(sys, j).column, sys.u())) <= 1e-8);
}

TEST_CASE("pinv_columns: empty set, single column and thread independence") {
    const auto c = chain_of(random_strongly_connected(60, 120, 6));
    const EulerianSystem sys(c.t.P, c.pi, K::diag_scaled);
    const auto none = pinv_columns(sys, std::vector<NodeId>{});
    CHECK(none.values.cols() == 0);
    CHECK(none.reports.empty());
    const std::vector<NodeId> J{4};
    const auto one = pinv_columns(sys, J);
    const auto direct = pinv_column(sys, 4);
    CHECK(max_abs_diff(one.values.col(0), direct.column) == 0.0);
    const DenseMatrix a = full_pinv(sys, 1), b = full_pinv(sys, 3);
    CHECK((a - b).max_abs() == 0.0);
}

TEST_CASE("property: Penrose and projector identities on random graphs") {
    Rng rng(31, RngStream::test_graphs);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 5 + rng.below(96);
        const auto c = chain_of(random_strongly_connected(n, 2 * n, rng.next_u64()));
        for (auto kind : {K::random_walk, K::diag_scaled}) {
            CAPTURE(n);
            const EulerianSystem sys(c.t.P, c.pi, kind);
            const DenseMatrix A = to_dense(sys.L());
            const DenseMatrix B = full_pinv(sys);
            const auto rep = oracle::penrose_check(A, B, 1e-7);
            CHECK(rep.pass);
            const DenseMatrix proj = DenseMatrix::identity(n) - outer(sys.u(), sys.u());
            CHECK((A * B - proj).max_abs() <= 1e-8);
            CHECK((B * A - proj).max_abs() <= 1e-8);
            const DenseMatrix ref = oracle::dense_pinv_reference(A, sys.u(), sys.u());
            CHECK(rel_diff(B, ref) <= 1e-7);
        }
    }
}

TEST_CASE("property: shift invariance for kind r") {
    const auto c = chain_of(random_strongly_connected(45, 90, 12));
    const EulerianSystem base(c.t.P, c.pi, K::random_walk);
    GmresConfig cfg;
    cfg.tol = 1e-12;
    for (double alpha : {0.5, 2.0}) {
        const EulerianSystem s(c.t.P, c.pi, K::random_walk, alpha);
        for (NodeId j : {0u, 17u, 44u})
            CHECK(max_abs_diff(pinv_column(s, j, cfg).column, pinv_column(base, j, cfg).column) <= 1e-8);
    }
}

TEST_CASE("property: shifted operators have positive definite symmetric part") {
    Rng rng(41, RngStream::test_graphs);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 5 + rng.below(196);
        const auto c = chain_of(random_strongly_connected(n, 2 * n, rng.next_u64()));
        for (auto kind : {K::random_walk, K::diag_scaled}) {
            const EulerianSystem sys(c.t.P, c.pi, kind);
            DenseMatrix a(n, n);
            for (std::size_t j = 0; j < n; ++j) {
                Vector e(n, 0.0);
                e[j] = 1.0;
                const Vector col = sys.shifted().apply(e);
                for (std::size_t i = 0; i < n; ++i) a(i, j) = col[i];
            }
            CHECK(oracle::symmetric_part_extremes(a).lambda_min_s > 0.0);
        }
    }
}

TEST_CASE("reduced inverse maps (symmetric null vector)") {
    SUBCASE("u = e_n leaves B11 unchanged") {
        const DenseMatrix B = random_dense(4, 4, 3);
        const Vector u{0, 0, 0, 1};
        const DenseMatrix r = reduced_inverse_from_pinv(B, u);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(r(i, j) == B(i, j));
        const DenseMatrix a11 = random_dense(3, 3, 4);
        const DenseMatrix back = pinv_from_reduced(a11, u);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                CHECK(back(i, j) == doctest::Approx((i < 3 && j < 3) ? a11(i, j) : 0.0));
    }
    SUBCASE("3-cycle") {
        const auto c = chain_of(cycle(3));
        const EulerianSystem sys(c.t.P, c.pi, K::random_walk);
        const DenseMatrix A = to_dense(sys.L());
        const DenseMatrix B = full_pinv(sys);
        const DenseMatrix r = reduced_inverse_from_pinv(B, sys.u());
        const DenseMatrix a11{{A(0, 0), A(0, 1)}, {A(1, 0), A(1, 1)}};
        CHECK((r * a11 - DenseMatrix::identity(2)).max_abs() <= 1e-8);
        const DenseMatrix back = pinv_from_reduced(r, sys.u());
        CHECK((back - B).max_abs() <= 1e-10);
        const DenseMatrix proj = DenseMatrix::identity(3) - outer(sys.u(), sys.u());
        CHECK((A * back - proj).max_abs() <= 1e-10);
        CHECK((back * A - proj).max_abs() <= 1e-10);
        CHECK(oracle::penrose_check(A, back, 1e-10).pass);
    }
    SUBCASE("pivot other than the last index") {
        const auto c = chain_of(random_strongly_connected(12, 24, 2));
        const EulerianSystem sys(c.t.P, c.pi, K::diag_scaled);
        const DenseMatrix A = to_dense(sys.L());
        const DenseMatrix B = oracle::dense_pinv_reference(A, sys.u(), sys.u());
        for (std::size_t p : {0u, 5u, 11u}) {
            const DenseMatrix r = reduced_inverse_from_pinv(B, sys.u(), p);
            DenseMatrix a11(11, 11);
            for (std::size_t i = 0, ii = 0; i < 12; ++i) {
                if (i == p) continue;
                for (std::size_t j = 0, jj = 0; j < 12; ++j) {
                    if (j == p) continue;
                    a11(ii, jj++) = A(i, j);
                }
                ++ii;
            }
            CHECK((r * a11 - DenseMatrix::identity(11)).max_abs() <= 1e-8);
            CHECK((pinv_from_reduced(r, sys.u(), p) - B).max_abs() <= 1e-10);
        }
    }
    CHECK_THROWS_AS(reduced_inverse_from_pinv(DenseMatrix::identity(2), Vector{1, 0}), InputError);
}

TEST_CASE("general maps and the rank-one sandwich") {
    SUBCASE("u = v agrees with the symmetric maps") {
        const auto c = chain_of(random_strongly_connected(10, 20, 8));
        const EulerianSystem sys(c.t.P, c.pi, K::diag_scaled);
        const DenseMatrix A = to_dense(sys.L());
        const DenseMatrix B = oracle::dense_pinv_reference(A, sys.u(), sys.u());
        const DenseMatrix r1 = reduced_inverse_from_pinv(B, sys.u());
        const DenseMatrix r2 = reduced_from_pinv_general(B, sys.u(), sys.u());
        CHECK((r1 - r2).max_abs() <= 1e-10);
        CHECK((pinv_from_reduced_general(r2, sys.u(), sys.u()) - B).max_abs() <= 1e-10);
        const auto solver = dense_rank_one_solver(A, sys.u(), sys.u());
        CHECK((pinv_rank1_general(solver, sys.u(), sys.u()) - B).max_abs() <= 1e-10);
    }
    SUBCASE("unnormalized Laplacian of the two-node graph") {
        const auto c = chain_of(two_node_self_loop());
        const DenseMatrix A = to_dense(build_laplacian(c.t.P, {}, c.t.out_degree, K::unnormalized));
        Vector v(2);
        for (int i = 0; i < 2; ++i) v[i] = c.pi[i] / c.t.out_degree[i];
        const auto solver = dense_rank_one_solver(A, ones(2), v);
        const DenseMatrix B = pinv_rank1_general(solver, ones(2), v);
        CHECK(oracle::penrose_check(A, B, 1e-8).pass);
    }
    SUBCASE("random nullity-one matrices") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto m = random_nullity_one(15, seed);
            const auto solver = dense_rank_one_solver(m.A, m.u, m.v);
            const DenseMatrix B = pinv_rank1_general(solver, m.u, m.v);
            CHECK(oracle::penrose_check(m.A, B, 1e-8).pass);
            // The projectors annihilate v on the right and u on the left.
            CHECK(max_abs(B * std::span<const double>(m.v)) <= 1e-8);
            CHECK(max_abs(B.transposed() * std::span<const double>(m.u)) <= 1e-8);
            const DenseMatrix r = reduced_from_pinv_general(B, m.u, m.v);
            const DenseMatrix back = pinv_from_reduced_general(r, m.u, m.v);
            CHECK((back - B).max_abs() <= 1e-10 * std::max(1.0, B.max_abs()));
            CHECK(max_abs(back * std::span<const double>(m.v)) <= 1e-10 * std::max(1.0, B.max_abs()));
            CHECK(max_abs(back.transposed() * std::span<const double>(m.u)) <= 1e-10 * std::max(1.0, B.max_abs()));
            const Vector un = normalized(m.u), vn = normalized(m.v);
            CHECK((m.A * B - (DenseMatrix::identity(15) - outer(vn, vn))).max_abs() <= 1e-8);
            CHECK((B * m.A - (DenseMatrix::identity(15) - outer(un, un))).max_abs() <= 1e-8);
            const std::vector<NodeId> J{3, 9};
            const DenseMatrix part = pinv_rank1_general(solver, m.u, m.v, J);
            for (std::size_t i = 0; i < 15; ++i) {
                CHECK(part(i, 0) == doctest::Approx(B(i, 3)).epsilon(1e-12));
                CHECK(part(i, 1) == doctest::Approx(B(i, 9)).epsilon(1e-12));
            }
        }
    }
    SUBCASE("iterative solver path") {
        const auto m = random_nullity_one(30, 17);
        const SparseMatrix sp = sparse_from_dense(m.A);
        GmresConfig cfg;
        cfg.tol = 1e-12;
        const auto it = iterative_rank_one_solver(sp, m.u, m.v, 1.0, cfg);
        const auto de = dense_rank_one_solver(m.A, m.u, m.v);
        CHECK((pinv_rank1_general(it, m.u, m.v) - pinv_rank1_general(de, m.u, m.v)).max_abs() <= 1e-8);
    }
}

TEST_CASE("check_properties") {
    const auto c = chain_of(cycle(3));
    const SparseMatrix la = build_laplacian(c.t.P, {}, c.t.out_degree, K::unnormalized);
    const auto ok = check_properties(la, ones(3));
    CHECK(ok.ok());
    CHECK(ok.irreducible);
    CHECK(ok.sign_pattern);
    CHECK(ok.null_vector.value_or(false));

    const SparseMatrix pos = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, 1}, {1, 0, -1}, {1, 1, 1}});
    const auto pb = check_properties(pos);
    CHECK(!pb.sign_pattern);
    REQUIRE(!pb.failures.empty());
    CHECK(pb.failures.front().find("(Pb)") != std::string::npos);

    const SparseMatrix red = SparseMatrix::from_triplets(
        4, 4, {{0, 0, 1}, {0, 1, -1}, {1, 0, -1}, {1, 1, 1}, {2, 2, 1}, {2, 3, -1}, {3, 2, -1}, {3, 3, 1}});
    const auto pa = check_properties(red, ones(4));
    CHECK(!pa.irreducible);
    CHECK(pa.failures.front().find("(Pa)") != std::string::npos);

    const auto pc = check_properties(la, Vector{1, 2, 3});
    CHECK(!pc.null_vector.value_or(true));
    CHECK_THROWS_AS(GeneralLaplacian(la, Vector{1, 2, 3}), InputError);
}

TEST_CASE("embed_mmatrix") {
    SUBCASE("1x1") {
        const auto g = embed_mmatrix(SparseMatrix::from_triplets(1, 1, {{0, 0, 2.0}}), Vector{1.0});
        const DenseMatrix e = to_dense(g.L());
        CHECK((e - DenseMatrix{{2, -2}, {-2, 2}}).max_abs() == 0.0);
        CHECK(g.x() == Vector{1.0, 1.0});
    }
    SUBCASE("diagonally dominant Z-matrix") {
        Rng rng(5, 55);
        std::vector<Triplet> t;
        for (std::size_t i = 0; i < 5; ++i) {
            double off = 0.0;
            for (std::size_t j = 0; j < 5; ++j) {
                if (i == j) continue;
                const double w = 0.1 + rng.uniform();
                off += w;
                t.push_back({i, j, -w});
            }
            t.push_back({i, i, off + 0.5 + rng.uniform()});
        }
        const SparseMatrix L11 = SparseMatrix::from_triplets(5, 5, t);
        CHECK(check_mmatrix_properties(L11, ones(5)).ok());
        const auto g = embed_mmatrix(L11, ones(5));
        CHECK(check_properties(g.L(), g.x()).ok());
        CHECK(max_abs(matvec(g.L(), g.x())) <= 1e-12);

        const DenseMatrix A = to_dense(g.L());
        Vector v(6, 1.0);
        const auto solver = dense_rank_one_solver(A, g.x(), v);
        const DenseMatrix B = pinv_rank1_general(solver, g.x(), v);
        const DenseMatrix r = reduced_from_pinv_general(B, g.x(), v);
        CHECK((r * to_dense(L11) - DenseMatrix::identity(5)).max_abs() <= 1e-8);
    }
    SUBCASE("(Pc') violated") {
        const SparseMatrix bad = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, -2}, {1, 0, -1}, {1, 1, 1}});
        CHECK_THROWS_AS(embed_mmatrix(bad, ones(2)), InputError);
    }
}

TEST_CASE("general_pinv: undirected 4-path") {
    std::vector<Triplet> t;
    const double deg[4] = {1, 2, 2, 1};
    for (std::size_t i = 0; i < 4; ++i) t.push_back({i, i, deg[i]});
    for (std::size_t i = 0; i + 1 < 4; ++i) {
        t.push_back({i, i + 1, -1.0});
        t.push_back({i + 1, i, -1.0});
    }
    const SparseMatrix L = SparseMatrix::from_triplets(4, 4, t);
    const GeneralLaplacian lt(L, ones(4));
    GeneralPinvOptions opt;
    opt.gmres.tol = 1e-12;
    opt.subspace.tol = 1e-13;
    const auto res = general_pinv(lt, all_ids(4), opt);
    const DenseMatrix B = to_dense(res.values);
    const DenseMatrix A = to_dense(L);
    CHECK(oracle::penrose_check(A, B, 1e-7).pass);
    // Symmetric case: (L + 11^T/4)^{-1} - 11^T/4.
    DenseMatrix shifted = A;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) shifted(i, j) += 0.25;
    DenseMatrix closed = LuFactorization(shifted).inverse();
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) closed(i, j) -= 0.25;
    CHECK((B - closed).max_abs() <= 1e-7);
}

TEST_CASE("general_pinv: kind a on the 3-cycle and random graphs") {
    const auto c = chain_of(cycle(3));
    const SparseMatrix la = build_laplacian(c.t.P, {}, c.t.out_degree, K::unnormalized);
    const auto res = general_pinv(GeneralLaplacian(la, ones(3)), all_ids(3));
    const DenseMatrix B = to_dense(res.values);
    Vector v(3);
    for (int i = 0; i < 3; ++i) v[i] = c.pi[i] / c.t.out_degree[i];
    CHECK(max_abs(matvec(la, ones(3))) <= 1e-8);
    CHECK(max_abs(matvec_transpose(la, v)) <= 1e-8);
    CHECK(max_abs(B * std::span<const double>(v)) <= 1e-8);
    CHECK(max_abs(B.transposed() * std::span<const double>(ones(3))) <= 1e-8);
    CHECK(std::abs(dot(res.v, res.u) - 1.0) <= 1e-12);

    Rng rng(51, RngStream::test_graphs);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 5 + rng.below(96);
        const auto g = random_strongly_connected(n, 2 * n, rng.next_u64());
        const auto cg = chain_of(g);
        const SparseMatrix L = build_laplacian(cg.t.P, {}, cg.t.out_degree, K::unnormalized);
        GeneralPinvOptions opt;
        opt.gmres.tol = 1e-12;
        opt.subspace.tol = 1e-13;
        const GeneralLaplacian lt(L, ones(n));
        const auto full = general_pinv(lt, all_ids(n), opt);
        const DenseMatrix A = to_dense(L);
        const DenseMatrix Bf = to_dense(full.values);
        CAPTURE(n);
        CHECK(oracle::penrose_check(A, Bf, 1e-6).pass);
        Vector vv(n);
        for (std::size_t i = 0; i < n; ++i) vv[i] = cg.pi[i] / cg.t.out_degree[i];
        CHECK(rel_diff(Bf, oracle::dense_pinv_reference(A, ones(n), vv)) <= 1e-7);
        const std::vector<NodeId> J{0};
        const auto single = general_pinv(lt, J, opt);
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(single.values(i, 0) - Bf(i, 0)));
        CHECK(d <= 1e-9);
        opt.pivot = n - 1;
        const auto pivoted = general_pinv(lt, J, opt);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(pivoted.values(i, 0) - Bf(i, 0)) <= 1e-8);
    }
}

TEST_CASE("remark identity: visits through the reduced inverse") {
    const auto c = chain_of(random_strongly_connected(20, 40, 13));
    const std::size_t n = 20, k = n - 1;
    const EulerianSystem sys(c.t.P, c.pi, K::diag_scaled);
    const DenseMatrix M = full_pinv(sys);
    const DenseMatrix P = to_dense(c.t.P);
    DenseMatrix a11(n - 1, n - 1);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) a11(i, j) = (i == j ? 1.0 : 0.0) - P(i, j);
    const DenseMatrix inv = LuFactorization(a11).inverse();
    const auto& pi = c.pi;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const double sj = std::sqrt(pi[j]);
            const double v = (M(i, j) / std::sqrt(pi[i]) - M(k, j) / std::sqrt(pi[k]) -
                              M(i, k) * sj / std::sqrt(pi[i] * pi[k]) + M(k, k) * sj / pi[k]) * sj;
            CHECK(std::abs(v - inv(i, j)) <= 1e-8 * std::max(1.0, std::abs(inv(i, j))));
        }
}
