#include "dpinv/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpinv/error.hpp"

namespace dpinv {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<RowOffset> offsets,
                           std::vector<ColIndex> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      offsets_(std::move(offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
    if (cols_ > static_cast<std::size_t>(std::numeric_limits<ColIndex>::max()))
        throw InputError("matrix too wide for 32-bit column indices");
    require_dims(offsets_.size() == rows_ + 1, "row offsets length must be rows + 1");
    require_dims(col_indices_.size() == values_.size(), "column index and value arrays differ");
    if (offsets_.front() != 0 || offsets_.back() != static_cast<RowOffset>(values_.size()))
        throw InputError("row offsets must start at 0 and end at the entry count");
    for (std::size_t i = 0; i < rows_; ++i) {
        if (offsets_[i + 1] < offsets_[i]) throw InputError("row offsets must be nondecreasing");
        for (RowOffset p = offsets_[i]; p < offsets_[i + 1]; ++p) {
            if (col_indices_[p] < 0 || static_cast<std::size_t>(col_indices_[p]) >= cols_)
                throw InputError("column index out of range in row " + std::to_string(i));
            if (p > offsets_[i] && col_indices_[p] <= col_indices_[p - 1])
                throw InputError("column indices must be strictly increasing in row " +
                                 std::to_string(i));
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> entries) {
    for (const auto& t : entries)
        if (t.row >= rows || t.col >= cols)
            throw InputError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                             ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<RowOffset> offsets(rows + 1, 0);
    std::vector<ColIndex> col_idx;
    std::vector<double> vals;
    col_idx.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& t = entries[k];
        if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
            vals.back() += t.value;
            continue;
        }
        col_idx.push_back(static_cast<ColIndex>(t.col));
        vals.push_back(t.value);
        ++offsets[t.row + 1];
    }
    for (std::size_t i = 0; i < rows; ++i) offsets[i + 1] += offsets[i];
    return SparseMatrix(rows, cols, std::move(offsets), std::move(col_idx), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<RowOffset> offsets(n + 1);
    std::vector<ColIndex> cols(n);
    for (std::size_t i = 0; i <= n; ++i) offsets[i] = static_cast<RowOffset>(i);
    for (std::size_t i = 0; i < n; ++i) cols[i] = static_cast<ColIndex>(i);
    return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

std::span<const ColIndex> SparseMatrix::row_cols(std::size_t i) const noexcept {
    return std::span<const ColIndex>(col_indices_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

std::span<const double> SparseMatrix::row_values(std::size_t i) const noexcept {
    return std::span<const double>(values_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
    require_dims(i < rows_ && j < cols_, "coefficient index out of range");
    const auto cols = row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<ColIndex>(j));
    if (it == cols.end() || *it != static_cast<ColIndex>(j)) return 0.0;
    return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
}

void matvec(const SparseMatrix& m, std::span<const double> x, std::span<double> y,
            MvCounter* counter) {
    require_dims(x.size() == m.cols(), "matvec input length");
    require_dims(y.size() == m.rows(), "matvec output length");
    kernels::active().csr_matvec(m.rows(), m.offsets().data(), m.col_indices().data(),
                                 m.values().data(), x.data(), y.data());
    if (counter) ++counter->count;
}

Vector matvec(const SparseMatrix& m, std::span<const double> x, MvCounter* counter) {
    Vector y(m.rows());
    matvec(m, x, y, counter);
    return y;
}

void matvec_transpose(const SparseMatrix& m, std::span<const double> x, std::span<double> y,
                      MvCounter* counter) {
    require_dims(x.size() == m.rows(), "transpose matvec input length");
    require_dims(y.size() == m.cols(), "transpose matvec output length");
    kernels::active().csr_matvec_transpose(m.rows(), m.cols(), m.offsets().data(),
                                           m.col_indices().data(), m.values().data(), x.data(),
                                           y.data());
    if (counter) ++counter->count;
}

Vector matvec_transpose(const SparseMatrix& m, std::span<const double> x, MvCounter* counter) {
    Vector y(m.cols());
    matvec_transpose(m, x, y, counter);
    return y;
}

SparseMatrix scale_rows_cols(const SparseMatrix& m, std::span<const double> left,
                             std::span<const double> right) {
    require_dims(left.size() == m.rows(), "row scaling length");
    require_dims(right.size() == m.cols(), "column scaling length");
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!std::all_of(left.begin(), left.end(), positive) ||
        !std::all_of(right.begin(), right.end(), positive))
        throw InputError("scale_rows_cols: scale entries must be strictly positive");
    const auto offsets = m.offsets();
    const auto cols = m.col_indices();
    std::vector<double> vals(m.values().begin(), m.values().end());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (RowOffset p = offsets[i]; p < offsets[i + 1]; ++p)
            vals[p] = left[i] * vals[p] * right[cols[p]];
    return SparseMatrix(m.rows(), m.cols(), {offsets.begin(), offsets.end()},
                        {cols.begin(), cols.end()}, std::move(vals));
}

Vector row_sums(const SparseMatrix& m) {
    Vector s(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (double v : m.row_values(i)) s[i] += v;
    return s;
}

Vector diagonal(const SparseMatrix& m) {
    const std::size_t n = std::min(m.rows(), m.cols());
    Vector d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = m.coeff(i, i);
    return d;
}

SparseMatrix transpose(const SparseMatrix& m) {
    std::vector<Triplet> t;
    t.reserve(m.nnz());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto cols = m.row_cols(i);
        const auto vals = m.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            t.push_back({static_cast<std::size_t>(cols[k]), i, vals[k]});
    }
    return SparseMatrix::from_triplets(m.cols(), m.rows(), std::move(t));
}

SparseMatrix diagonal_minus(std::span<const double> diag, const SparseMatrix& m) {
    require_dims(m.rows() == m.cols() && diag.size() == m.rows(), "diagonal_minus shapes");
    std::vector<Triplet> t;
    t.reserve(m.nnz() + m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        t.push_back({i, i, diag[i]});
        const auto cols = m.row_cols(i);
        const auto vals = m.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            t.push_back({i, static_cast<std::size_t>(cols[k]), -vals[k]});
    }
    return SparseMatrix::from_triplets(m.rows(), m.cols(), std::move(t));
}

namespace {

// Forward and reverse reachability from node 0 over the off-diagonal
// nonzero pattern. Strongly connected iff both cover every node.
struct Reach {
    std::vector<char> forward;
    std::vector<char> backward;
};

Reach reach_from_zero(std::size_t n, const std::vector<std::vector<NodeId>>& out,
                      const std::vector<std::vector<NodeId>>& in) {
    auto bfs = [n](const std::vector<std::vector<NodeId>>& adj) {
        std::vector<char> seen(n, 0);
        if (n == 0) return seen;
        std::vector<NodeId> queue{0};
        seen[0] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head)
            for (NodeId v : adj[queue[head]])
                if (!seen[v]) {
                    seen[v] = 1;
                    queue.push_back(v);
                }
        return seen;
    };
    return {bfs(out), bfs(in)};
}

std::optional<std::pair<NodeId, NodeId>> unreachable(std::size_t n,
                                                     const std::vector<std::vector<NodeId>>& out,
                                                     const std::vector<std::vector<NodeId>>& in) {
    const Reach r = reach_from_zero(n, out, in);
    for (NodeId v = 0; v < n; ++v) {
        if (!r.forward[v]) return std::pair<NodeId, NodeId>{0, v};
        if (!r.backward[v]) return std::pair<NodeId, NodeId>{v, 0};
    }
    return std::nullopt;
}

}  // namespace

bool is_irreducible(const SparseMatrix& m) {
    require_dims(m.rows() == m.cols(), "is_irreducible needs a square matrix");
    const std::size_t n = m.rows();
    std::vector<std::vector<NodeId>> out(n), in(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto cols = m.row_cols(i);
        const auto vals = m.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const auto j = static_cast<NodeId>(cols[k]);
            if (j == i || vals[k] == 0.0) continue;
            out[i].push_back(j);
            in[j].push_back(i);
        }
    }
    return !unreachable(n, out, in).has_value();
}

void Digraph::validate() const {
    for (const auto& e : edges) {
        if (e.src >= n || e.dst >= n)
            throw InputError("edge " + std::to_string(e.src) + " -> " + std::to_string(e.dst) +
                             " references a node outside [0, " + std::to_string(n) + ")");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw InputError("edge " + std::to_string(e.src) + " -> " + std::to_string(e.dst) +
                             " has non-positive weight");
    }
    if (evaporating_node && *evaporating_node >= n)
        throw InputError("evaporating node id out of range");
}

SparseMatrix adjacency(const Digraph& g) {
    g.validate();
    std::vector<Triplet> t;
    t.reserve(g.edges.size());
    for (const auto& e : g.edges) t.push_back({e.src, e.dst, e.weight});
    return SparseMatrix::from_triplets(g.n, g.n, std::move(t));
}

std::optional<std::pair<NodeId, NodeId>> find_unreachable_pair(const Digraph& g) {
    g.validate();
    std::vector<std::vector<NodeId>> out(g.n), in(g.n);
    for (const auto& e : g.edges) {
        if (e.src == e.dst) continue;
        out[e.src].push_back(e.dst);
        in[e.dst].push_back(e.src);
    }
    return unreachable(g.n, out, in);
}

bool is_strongly_connected(const Digraph& g) { return !find_unreachable_pair(g).has_value(); }

Transition build_transition(const Digraph& g) {
    SparseMatrix a = adjacency(g);
    Vector d = row_sums(a);
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!(d[i] > 0.0))
            throw InputError("node " + std::to_string(i) +
                             " has no outgoing edges; the random walk is not defined there");
    Vector inv(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) inv[i] = 1.0 / d[i];
    Vector ones(d.size(), 1.0);
    SparseMatrix p = scale_rows_cols(a, inv, ones);
    return {std::move(p), std::move(d)};
}

}  // namespace dpinv
