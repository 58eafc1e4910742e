#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpinv/block.hpp"
#include "dpinv/laplacian.hpp"
#include "dpinv/sparse.hpp"

namespace dpinv {

/// A subset of columns of M^r or M^d, addressable by node id.
class PinvColumns {
public:
    PinvColumns(LaplacianKind kind, Vector pi, std::vector<NodeId> ids, ColumnBlock values);
    PinvColumns(const EulerianSystem& sys, const PinvBlock& block);

    LaplacianKind kind() const noexcept { return kind_; }
    const Vector& pi() const noexcept { return pi_; }
    std::size_t size() const noexcept { return pi_.size(); }
    bool has(NodeId j) const noexcept;
    bool complete() const noexcept;
    /// m_ij; throws InputError when column j is missing.
    double m(NodeId i, NodeId j) const;

private:
    LaplacianKind kind_;
    Vector pi_;
    std::vector<std::ptrdiff_t> slot_;
    ColumnBlock values_;
};

struct WalkMetric {
    NodeId i = 0;
    std::optional<NodeId> j;
    NodeId k = 0;
    double value = 0.0;
};

/// Called when a metric comes out negative beyond the -1e-9 clamping slack.
/// The default handler writes to stderr.
void set_metric_warning_handler(std::function<void(const std::string&)> handler);

/// Expected steps from i to first reach k. The d-form reads column k only;
/// the r-form needs every column.
double hitting_time(const PinvColumns& M, NodeId i, NodeId k);
/// h(i,k) + h(k,i); reads columns i and k.
double commute_time(const PinvColumns& M, NodeId i, NodeId k);
/// Expected visits to j on walks from i absorbed at k; reads columns j and k.
double visits(const PinvColumns& M, NodeId i, NodeId j, NodeId k);
/// v(i,j,k) / v(j,j,k); j must differ from k.
double pass_probability(const PinvColumns& M, NodeId i, NodeId j, NodeId k);

/// trace M^d. With kind d this needs the diagonal only; with kind r every
/// column, through sum_k pi_k h(0, k).
double kemeny_constant(const PinvColumns& M);
/// sum_k pi_k h(i, k) for every start i (all columns required).
Vector kemeny_by_start(const PinvColumns& M);

/// Adds node n. Every original row becomes ((1 - gamma) P_i, gamma); a node
/// without out-edges moves to n with probability 1. Node n moves to node j
/// with probability restart[j] (uniform when empty).
Digraph augment_evaporating(const Digraph& g, double gamma, std::span<const double> restart = {});

/// pass_probability(i, j, e) for the evaporating node e.
double trust(const PinvColumns& M, const Digraph& augmented, NodeId i, NodeId j);
/// For each j: sum over original nodes i of trust(i, j). Needs columns j and e.
Vector influence_scores(const PinvColumns& M, const Digraph& augmented, std::span<const NodeId> js);

}  // namespace dpinv
