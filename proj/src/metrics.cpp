#include "dpinv/metrics.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <string>

namespace dpinv {

PinvColumns::PinvColumns(LaplacianKind kind, Vector pi, std::vector<NodeId> ids, ColumnBlock values)
    : kind_(kind), pi_(std::move(pi)), slot_(pi_.size(), -1), values_(std::move(values)) {
    if (kind_ != LaplacianKind::random_walk && kind_ != LaplacianKind::diag_scaled)
        throw InputError("metrics are defined from M^r or M^d columns");
    require_dims(values_.rows() == pi_.size() && values_.cols() == ids.size(), "pseudo-inverse column block shape");
    for (std::size_t c = 0; c < ids.size(); ++c) {
        if (ids[c] >= pi_.size()) throw InputError("column id out of range");
        slot_[ids[c]] = static_cast<std::ptrdiff_t>(c);
    }
}

PinvColumns::PinvColumns(const EulerianSystem& sys, const PinvBlock& block)
    : PinvColumns(sys.kind(), sys.pi(), block.columns, block.values) {}

bool PinvColumns::has(NodeId j) const noexcept { return j < slot_.size() && slot_[j] >= 0; }

bool PinvColumns::complete() const noexcept {
    for (auto s : slot_)
        if (s < 0) return false;
    return true;
}

double PinvColumns::m(NodeId i, NodeId j) const {
    if (i >= size()) throw InputError("node " + std::to_string(i) + " out of range");
    if (!has(j)) throw InputError("pseudo-inverse column " + std::to_string(j) + " was not computed");
    return values_(i, static_cast<std::size_t>(slot_[j]));
}

namespace {

std::mutex& handler_mutex() {
    static std::mutex m;
    return m;
}

std::function<void(const std::string&)>& handler() {
    static std::function<void(const std::string&)> h = [](const std::string& msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return h;
}

double clamp_nonnegative(double v, const char* what) {
    if (v >= 0.0) return v;
    if (v < -1e-9) {
        std::lock_guard<std::mutex> lock(handler_mutex());
        if (handler()) handler()(std::string(what) + " is negative (" + std::to_string(v) +
                                 "); solver tolerance may be too loose");
        return v;
    }
    return 0.0;
}

void require_node(const PinvColumns& M, NodeId i) {
    if (i >= M.size()) throw InputError("node " + std::to_string(i) + " out of range");
}

}  // namespace

void set_metric_warning_handler(std::function<void(const std::string&)> h) {
    std::lock_guard<std::mutex> lock(handler_mutex());
    handler() = std::move(h);
}

double hitting_time(const PinvColumns& M, NodeId i, NodeId k) {
    require_node(M, i);
    require_node(M, k);
    if (i == k) return 0.0;
    const auto& pi = M.pi();
    double h;
    if (M.kind() == LaplacianKind::diag_scaled) {
        h = M.m(k, k) / pi[k] - M.m(i, k) / std::sqrt(pi[i] * pi[k]);
    } else {
        if (!M.complete()) throw InputError("r-form hitting times need every pseudo-inverse column");
        h = M.m(k, k) - M.m(i, k);
        for (std::size_t l = 0; l < M.size(); ++l) h += (M.m(i, l) - M.m(k, l)) * pi[l];
    }
    return clamp_nonnegative(h, "hitting time");
}

double commute_time(const PinvColumns& M, NodeId i, NodeId k) {
    require_node(M, i);
    require_node(M, k);
    if (i == k) return 0.0;
    const auto& pi = M.pi();
    double c;
    if (M.kind() == LaplacianKind::diag_scaled)
        c = M.m(k, k) / pi[k] + M.m(i, i) / pi[i] - (M.m(i, k) + M.m(k, i)) / std::sqrt(pi[i] * pi[k]);
    else
        c = M.m(k, k) + M.m(i, i) - M.m(i, k) - M.m(k, i);
    return clamp_nonnegative(c, "commute time");
}

double visits(const PinvColumns& M, NodeId i, NodeId j, NodeId k) {
    require_node(M, i);
    require_node(M, j);
    require_node(M, k);
    const auto& pi = M.pi();
    double v;
    if (M.kind() == LaplacianKind::diag_scaled)
        v = std::sqrt(pi[j] / pi[i]) * M.m(i, j) - std::sqrt(pi[j] / pi[k]) * M.m(k, j) -
            pi[j] / std::sqrt(pi[i] * pi[k]) * M.m(i, k) + pi[j] / pi[k] * M.m(k, k);
    else
        v = (M.m(i, j) - M.m(k, j) - M.m(i, k) + M.m(k, k)) * pi[j];
    return clamp_nonnegative(v, "visit count");
}

double pass_probability(const PinvColumns& M, NodeId i, NodeId j, NodeId k) {
    if (j == k) throw InputError("pass probability is undefined for j = k");
    if (i == j) {
        require_node(M, i);
        return 1.0;
    }
    const double num = visits(M, i, j, k);
    const double den = visits(M, j, j, k);
    if (!(den > 0.0)) throw NumericalError("v(j,j,k) is not positive");
    double p = num / den;
    if (p > 1.0 && p <= 1.0 + 1e-9) p = 1.0;
    return p;
}

double kemeny_constant(const PinvColumns& M) {
    if (M.kind() == LaplacianKind::diag_scaled) {
        double t = 0.0;
        for (std::size_t k = 0; k < M.size(); ++k) t += M.m(k, k);
        return t;
    }
    return kemeny_by_start(M).front();
}

Vector kemeny_by_start(const PinvColumns& M) {
    if (!M.complete()) throw InputError("Kemeny sums need every pseudo-inverse column");
    const std::size_t n = M.size();
    Vector out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) out[i] += M.pi()[k] * hitting_time(M, i, k);
    return out;
}

Digraph augment_evaporating(const Digraph& g, double gamma, std::span<const double> restart) {
    g.validate();
    if (!(gamma > 0.0 && gamma < 1.0)) throw InputError("evaporation probability must lie in (0, 1)");
    const std::size_t n = g.n;
    Vector r(n, 1.0 / static_cast<double>(n));
    if (!restart.empty()) {
        require_dims(restart.size() == n, "restart distribution length");
        double s = 0.0;
        for (double x : restart) {
            if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("restart distribution must be nonnegative");
            s += x;
        }
        if (!(s > 0.0)) throw InputError("restart distribution is all zero");
        for (std::size_t i = 0; i < n; ++i) r[i] = restart[i] / s;
    }
    Vector out(n, 0.0);
    for (const auto& e : g.edges) out[e.src] += e.weight;

    Digraph a;
    a.n = n + 1;
    a.evaporating_node = n;
    a.edges.reserve(g.edges.size() + 2 * n);
    for (const auto& e : g.edges) a.edges.push_back({e.src, e.dst, (1.0 - gamma) * e.weight / out[e.src]});
    for (std::size_t i = 0; i < n; ++i) a.edges.push_back({i, n, out[i] > 0.0 ? gamma : 1.0});
    for (std::size_t j = 0; j < n; ++j)
        if (r[j] > 0.0) a.edges.push_back({n, j, r[j]});
    return a;
}

namespace {

NodeId evaporating(const PinvColumns& M, const Digraph& augmented) {
    if (!augmented.evaporating_node) throw InputError("graph has no evaporating node; augment it first");
    if (augmented.n != M.size()) throw InputError("pseudo-inverse and graph sizes differ");
    return *augmented.evaporating_node;
}

}  // namespace

double trust(const PinvColumns& M, const Digraph& augmented, NodeId i, NodeId j) {
    const NodeId e = evaporating(M, augmented);
    return pass_probability(M, i, j, e);
}

Vector influence_scores(const PinvColumns& M, const Digraph& augmented, std::span<const NodeId> js) {
    const NodeId e = evaporating(M, augmented);
    Vector out;
    out.reserve(js.size());
    for (NodeId j : js) {
        if (j == e) throw InputError("influence of the evaporating node is undefined");
        double s = 0.0;
        for (NodeId i = 0; i < M.size(); ++i)
            if (i != e) s += pass_probability(M, i, j, e);
        out.push_back(s);
    }
    return out;
}

}  // namespace dpinv
