#include "dpinv/graphgen.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>

#include "dpinv/error.hpp"
#include "dpinv/rng.hpp"

namespace dpinv {

Digraph preferential_attachment_digraph(const GenConfig& cfg, GenStats* stats) {
    if (cfg.n < 3) throw InputError("generator needs n >= 3");
    if (cfg.attach < 1) throw InputError("generator needs attach >= 1");
    const std::size_t n = cfg.n;
    Rng attach_rng(cfg.seed, RngStream::attachment);
    Rng extra_rng(cfg.seed, RngStream::extra_edges);

    std::vector<std::pair<NodeId, NodeId>> backbone{{0, 1}, {1, 2}, {2, 0}};
    // Each node appears once per incident backbone edge.
    std::vector<NodeId> ends{0, 1, 1, 2, 2, 0};
    std::vector<NodeId> picked;
    for (NodeId v = 3; v < n; ++v) {
        const std::size_t want = std::min<std::size_t>(cfg.attach, v);
        picked.clear();
        while (picked.size() < want) {
            const NodeId t = ends[attach_rng.below(ends.size())];
            if (std::find(picked.begin(), picked.end(), t) == picked.end()) picked.push_back(t);
        }
        for (NodeId t : picked) {
            backbone.emplace_back(v, t);
            ends.push_back(v);
            ends.push_back(t);
        }
    }

    std::map<std::pair<NodeId, NodeId>, double> arcs;
    for (const auto& [a, b] : backbone) {
        arcs[{a, b}] += 1.0;
        arcs[{b, a}] += 1.0;
    }
    const std::size_t extra = cfg.extra_oneway.value_or(n);
    std::size_t merged = 0;
    for (std::size_t e = 0; e < extra; ++e) {
        const NodeId s = extra_rng.below(n);
        NodeId d = extra_rng.below(n - 1);
        if (d >= s) ++d;
        auto [it, fresh] = arcs.try_emplace({s, d}, 0.0);
        if (!fresh) ++merged;
        it->second += 1.0;
    }

    Digraph g;
    g.n = n;
    g.edges.reserve(arcs.size());
    for (const auto& [key, w] : arcs) g.edges.push_back({key.first, key.second, w});
    if (stats) {
        stats->backbone_edges = backbone.size();
        stats->extra_requested = extra;
        stats->merged_duplicates = merged;
        stats->arcs = g.edges.size();
    }
    return g;
}

Digraph random_strongly_connected(std::size_t n, std::size_t extra, std::uint64_t seed) {
    if (n < 2) throw InputError("random digraph needs n >= 2");
    Rng rng(seed, RngStream::test_graphs);
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    Digraph g;
    g.n = n;
    for (std::size_t i = 0; i < n; ++i)
        g.edges.push_back({perm[i], perm[(i + 1) % n], 0.5 + 1.5 * rng.uniform()});
    for (std::size_t e = 0; e < extra; ++e) {
        const NodeId s = rng.below(n);
        const NodeId d = rng.below(n);
        g.edges.push_back({s, d, 0.5 + 1.5 * rng.uniform()});
    }
    return g;
}

}  // namespace dpinv
