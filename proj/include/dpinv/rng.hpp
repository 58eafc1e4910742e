#pragma once

#include <cstdint>
#include <random>

namespace dpinv {

/// Named stream ids so that independent consumers of one user seed never
/// share draws.
enum class RngStream : std::uint64_t {
    attachment = 1,
    extra_edges = 2,
    subspace_start = 3,
    monte_carlo = 4,
    test_graphs = 5,
};

/// Portable seeded generator. The engine and seed_seq are fully specified by
/// the standard; the real-valued draws below avoid the implementation-defined
/// std distributions so results match across standard libraries.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);
    Rng(std::uint64_t seed, RngStream stream) : Rng(seed, static_cast<std::uint64_t>(stream)) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform();
    /// Uniform integer on [0, bound).
    std::uint64_t below(std::uint64_t bound);
    /// Standard normal via Box-Muller.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dpinv
