#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "dpinv/dense.hpp"
#include "dpinv/rng.hpp"
#include "dpinv/sparse.hpp"

namespace dpinv::testing {

inline Digraph make_graph(std::size_t n, std::vector<Edge> edges) {
    Digraph g;
    g.n = n;
    g.edges = std::move(edges);
    return g;
}

inline Digraph cycle(std::size_t n) {
    Digraph g;
    g.n = n;
    for (std::size_t i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n, 1.0});
    return g;
}

/// 0 -> 0, 0 -> 1, 1 -> 0, unit weights. pi = (2/3, 1/3).
inline Digraph two_node_self_loop() { return make_graph(2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}}); }

inline Digraph symmetric_cycle(std::size_t n) {
    Digraph g;
    g.n = n;
    for (std::size_t i = 0; i < n; ++i) {
        g.edges.push_back({i, (i + 1) % n, 1.0});
        g.edges.push_back({(i + 1) % n, i, 1.0});
    }
    return g;
}

inline std::vector<NodeId> all_ids(std::size_t n) {
    std::vector<NodeId> J(n);
    std::iota(J.begin(), J.end(), NodeId{0});
    return J;
}

inline DenseMatrix random_dense(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed, 99);
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
}

inline Vector random_vector(std::size_t n, std::uint64_t seed) {
    Rng rng(seed, 98);
    Vector v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

/// Random sparse matrix with roughly `density` of its entries stored.
inline SparseMatrix random_sparse(std::size_t r, std::size_t c, double density, std::uint64_t seed) {
    Rng rng(seed, 97);
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            if (rng.uniform() < density) t.push_back({i, j, rng.normal()});
    return SparseMatrix::from_triplets(r, c, std::move(t));
}

inline SparseMatrix sparse_from_dense(const DenseMatrix& d) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j)
            if (d(i, j) != 0.0) t.push_back({i, j, d(i, j)});
    return SparseMatrix::from_triplets(d.rows(), d.cols(), t);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Per-test scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("dpinv_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string write(const std::string& name, const std::string& content) const {
        std::ofstream(file(name)) << content;
        return file(name);
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace dpinv::testing
