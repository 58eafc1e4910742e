#include <doctest.h>

#include <deque>

#include "dpinv/error.hpp"
#include "dpinv/graphgen.hpp"
#include "dpinv/sparse.hpp"
#include "fixtures.hpp"

using namespace dpinv;
using namespace dpinv::testing;

namespace {

SparseMatrix cycle_adjacency() { return adjacency(cycle(3)); }

Vector dense_product(const DenseMatrix& m, std::span<const double> x) { return m * x; }

bool bfs_reaches_all(const Digraph& g, NodeId s) {
    std::vector<std::vector<NodeId>> adj(g.n);
    for (const auto& e : g.edges) adj[e.src].push_back(e.dst);
    std::vector<bool> seen(g.n, false);
    std::deque<NodeId> q{s};
    seen[s] = true;
    while (!q.empty()) {
        const NodeId v = q.front();
        q.pop_front();
        for (NodeId w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                q.push_back(w);
            }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace

TEST_CASE("matvec on identity and a cyclic permutation") {
    const Vector x{1, 2, 3};
    CHECK(matvec(SparseMatrix::identity(3), x) == Vector{1, 2, 3});
    CHECK(matvec(cycle_adjacency(), x) == Vector{2, 3, 1});
}

TEST_CASE("matvec_transpose on identity and a cyclic permutation") {
    const Vector x{1, 2, 3};
    CHECK(matvec_transpose(SparseMatrix::identity(3), x) == x);
    CHECK(matvec_transpose(cycle_adjacency(), x) == Vector{3, 1, 2});
}

TEST_CASE("sparse products match dense products") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SparseMatrix m = random_sparse(10, 10, 0.3, seed);
        const DenseMatrix d = to_dense(m);
        const Vector x = random_vector(10, seed);
        const Vector y = matvec(m, x);
        const Vector yd = dense_product(d, x);
        CHECK(max_abs_diff(y, yd) <= 1e-14 * std::max(1.0, max_abs(yd)));
        const Vector yt = matvec_transpose(m, x);
        const Vector ytd = dense_product(d.transposed(), x);
        CHECK(max_abs_diff(yt, ytd) <= 1e-14 * std::max(1.0, max_abs(ytd)));
    }
}

TEST_CASE("rectangular products and dimension errors") {
    const SparseMatrix m = random_sparse(4, 7, 0.5, 3);
    CHECK(matvec(m, Vector(7, 1.0)).size() == 4);
    CHECK(matvec_transpose(m, Vector(4, 1.0)).size() == 7);
    CHECK_THROWS_AS(matvec(m, Vector(4, 1.0)), DimensionError);
    CHECK_THROWS_AS(matvec_transpose(m, Vector(7, 1.0)), DimensionError);
}

TEST_CASE("property: transpose consistency y^T (M x) = (M^T y)^T x") {
    for (std::uint64_t seed = 10; seed < 30; ++seed) {
        const SparseMatrix m = random_sparse(15, 12, 0.25, seed);
        const Vector x = random_vector(12, seed);
        const Vector y = random_vector(15, seed + 100);
        const double a = dot(y, matvec(m, x));
        const double b = dot(matvec_transpose(m, y), x);
        CHECK(std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}));
    }
}

TEST_CASE("the Mv counter increments once per product") {
    const SparseMatrix m = random_sparse(6, 6, 0.5, 1);
    MvCounter c;
    Vector y(6);
    matvec(m, Vector(6, 1.0), y, &c);
    CHECK(c.count == 1);
    matvec_transpose(m, Vector(6, 1.0), y, &c);
    CHECK(c.count == 2);
    matvec(m, Vector(6, 1.0), &c);
    matvec_transpose(m, Vector(6, 1.0), &c);
    CHECK(c.count == 4);
}

TEST_CASE("scale_rows_cols") {
    const SparseMatrix m = random_sparse(5, 5, 0.5, 2);
    const Vector ones(5, 1.0);
    const SparseMatrix same = scale_rows_cols(m, ones, ones);
    CHECK(std::equal(same.values().begin(), same.values().end(), m.values().begin()));

    const SparseMatrix d = scale_rows_cols(SparseMatrix::identity(2), Vector{2, 3}, Vector{1, 1});
    CHECK(d.coeff(0, 0) == 2.0);
    CHECK(d.coeff(1, 1) == 3.0);
    CHECK(d.nnz() == 2);

    CHECK_THROWS_AS(scale_rows_cols(m, Vector{1, 1, 0, 1, 1}, ones), InputError);
    CHECK_THROWS_AS(scale_rows_cols(m, ones, Vector{1, 1, 1, -1, 1}), InputError);
}

TEST_CASE("scale_rows_cols builds Pi^(1/2) P Pi^(-1/2) on the two-node self-loop graph") {
    const Transition t = build_transition(two_node_self_loop());
    const Vector pi{2.0 / 3.0, 1.0 / 3.0};
    const Vector s{std::sqrt(pi[0]), std::sqrt(pi[1])};
    const Vector si{1.0 / s[0], 1.0 / s[1]};
    const DenseMatrix got = to_dense(scale_rows_cols(t.P, s, si));
    DenseMatrix L(2, 2), R(2, 2);
    L(0, 0) = s[0];
    L(1, 1) = s[1];
    R(0, 0) = si[0];
    R(1, 1) = si[1];
    const DenseMatrix want = L * to_dense(t.P) * R;
    CHECK((got - want).max_abs() <= 1e-14);
}

TEST_CASE("property: scaling round trip restores the matrix") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SparseMatrix m = random_sparse(8, 6, 0.4, seed);
        Rng rng(seed, 7);
        Vector a(8), b(6), ai(8), bi(6);
        for (std::size_t i = 0; i < 8; ++i) ai[i] = 1.0 / (a[i] = 0.1 + 3 * rng.uniform());
        for (std::size_t j = 0; j < 6; ++j) bi[j] = 1.0 / (b[j] = 0.1 + 3 * rng.uniform());
        const SparseMatrix back = scale_rows_cols(scale_rows_cols(m, a, b), ai, bi);
        CHECK(max_abs_diff(back.values(), m.values()) <= 1e-14 * std::max(1.0, max_abs(m.values())));
    }
}

TEST_CASE("row_sums") {
    CHECK(row_sums(SparseMatrix::identity(3)) == Vector{1, 1, 1});
    CHECK(row_sums(cycle_adjacency()) == Vector{1, 1, 1});
    const SparseMatrix m = random_sparse(7, 9, 0.4, 4);
    const DenseMatrix d = to_dense(m);
    const Vector rs = row_sums(m);
    for (std::size_t i = 0; i < 7; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 9; ++j) s += d(i, j);
        CHECK(rs[i] == doctest::Approx(s).epsilon(1e-15));
    }
}

TEST_CASE("strong connectivity") {
    CHECK(is_strongly_connected(cycle(3)));
    const Digraph one_way = make_graph(2, {{0, 1, 1.0}});
    CHECK_FALSE(is_strongly_connected(one_way));
    const auto bad = find_unreachable_pair(one_way);
    REQUIRE(bad.has_value());
    CHECK(bad->first == 1);
    CHECK(bad->second == 0);
    CHECK_FALSE(find_unreachable_pair(cycle(5)).has_value());

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        GenConfig c;
        c.n = 60;
        c.seed = seed;
        const Digraph g = preferential_attachment_digraph(c);
        CHECK(is_strongly_connected(g));
        bool all = true;
        for (NodeId s = 0; s < g.n; ++s) all = all && bfs_reaches_all(g, s);
        CHECK(all);
    }
}

TEST_CASE("irreducibility of a matrix pattern") {
    CHECK(is_irreducible(adjacency(cycle(4))));
    CHECK_FALSE(is_irreducible(SparseMatrix::identity(3)));
    CHECK(is_irreducible(SparseMatrix::identity(1)));
}

TEST_CASE("build_transition") {
    const Transition c = build_transition(cycle(3));
    CHECK(c.P.coeff(0, 1) == 1.0);
    CHECK(c.P.coeff(1, 2) == 1.0);
    CHECK(c.P.coeff(2, 0) == 1.0);
    CHECK(c.P.nnz() == 3);
    CHECK(c.out_degree == Vector{1, 1, 1});

    const Transition t = build_transition(two_node_self_loop());
    CHECK(t.P.coeff(0, 0) == 0.5);
    CHECK(t.P.coeff(0, 1) == 0.5);
    CHECK(t.P.coeff(1, 0) == 1.0);
    CHECK(t.P.coeff(1, 1) == 0.0);
    CHECK(t.out_degree == Vector{2, 1});

    CHECK_THROWS_AS(build_transition(make_graph(2, {{0, 1, 1.0}})), InputError);
}

TEST_CASE("property: transition rows sum to one and P 1 = 1") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Digraph g = random_strongly_connected(40, 120, seed);
        const Transition t = build_transition(g);
        for (double s : row_sums(t.P)) CHECK(std::abs(s - 1.0) <= 1e-14);
        for (double s : matvec(t.P, Vector(g.n, 1.0))) CHECK(std::abs(s - 1.0) <= 1e-14);
    }
}

TEST_CASE("CSR invariants are enforced") {
    CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 1}, {0}, {1.0}), DimensionError);
    CHECK_THROWS_AS(SparseMatrix(2, 2, {1, 1, 2}, {0, 1}, {1.0, 1.0}), InputError);
    CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 2, 1}, {0, 1}, {1.0, 1.0}), InputError);
    CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 1.0}), InputError);
    CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 2}, {1, 1}, {1.0, 1.0}), InputError);
    CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 1}, {2}, {1.0}), InputError);
    CHECK_NOTHROW(SparseMatrix(2, 2, {0, 1, 2}, {1, 0}, {1.0, 2.0}));
}

TEST_CASE("duplicate triplets are summed") {
    const SparseMatrix m = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.5}, {1, 0, 1.0}, {0, 1, 2.0}});
    CHECK(m.nnz() == 2);
    CHECK(m.coeff(0, 1) == 3.5);
    const Digraph g = make_graph(2, {{0, 1, 1.0}, {0, 1, 2.0}, {1, 0, 1.0}});
    CHECK(adjacency(g).coeff(0, 1) == 3.0);
}

TEST_CASE("digraph validation") {
    CHECK_THROWS_AS(make_graph(2, {{0, 1, 0.0}}).validate(), InputError);
    CHECK_THROWS_AS(make_graph(2, {{0, 1, -1.0}}).validate(), InputError);
    CHECK_THROWS_AS(make_graph(2, {{0, 2, 1.0}}).validate(), InputError);
    CHECK_NOTHROW(cycle(4).validate());
}

TEST_CASE("diagonal_minus merges with stored diagonal entries") {
    const SparseMatrix m = SparseMatrix::from_triplets(2, 2, {{0, 0, 0.25}, {0, 1, 0.75}, {1, 0, 1.0}});
    const SparseMatrix d = diagonal_minus(Vector{1, 1}, m);
    CHECK(d.coeff(0, 0) == 0.75);
    CHECK(d.coeff(0, 1) == -0.75);
    CHECK(d.coeff(1, 0) == -1.0);
    CHECK(d.coeff(1, 1) == 1.0);
    CHECK(diagonal(d) == Vector{0.75, 1.0});
    const DenseMatrix t = to_dense(transpose(m));
    CHECK(t(1, 0) == 0.75);
    CHECK(t(0, 1) == 1.0);
}
