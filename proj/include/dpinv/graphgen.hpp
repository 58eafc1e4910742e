#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "dpinv/sparse.hpp"

namespace dpinv {

struct GenConfig {
    std::size_t n = 1024;
    std::size_t attach = 2;
    std::optional<std::size_t> extra_oneway;  ///< defaults to n
    std::uint64_t seed = 0;
};

struct GenStats {
    std::size_t backbone_edges = 0;     ///< undirected attachment edges
    std::size_t extra_requested = 0;
    std::size_t merged_duplicates = 0;  ///< one-way arcs that landed on an existing arc
    std::size_t arcs = 0;               ///< distinct directed arcs in the output
};

/// Symmetric preferential-attachment backbone grown from a triangle, plus
/// uniformly random one-way arcs. Arcs come out sorted by (src, dst); a
/// repeated arc has its weights summed.
Digraph preferential_attachment_digraph(const GenConfig& cfg, GenStats* stats = nullptr);

/// Random strongly connected weighted digraph: a random Hamiltonian cycle
/// plus `extra` random arcs (self-loops allowed), weights uniform in
/// [0.5, 2). Used for test and verification suites.
Digraph random_strongly_connected(std::size_t n, std::size_t extra, std::uint64_t seed);

}  // namespace dpinv
