#pragma once

// Keyed random substreams. Every consumer of randomness owns a stream derived
// from (run_seed, level, chain, purpose), so draws never depend on thread
// scheduling and a run is reproducible from its seed alone.

#include "semis/normal.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace semis {

// Purpose tags keep substreams for different jobs at the same level disjoint.
enum class SubStream : std::uint64_t {
    prior_draw = 1,
    screen = 2,
    thin = 3,
    chain = 4,
    resample = 5,
    noise = 6,
};

class RngStream {
   public:
    RngStream(std::uint64_t run_seed, std::uint64_t level, std::uint64_t chain,
              SubStream purpose)
        : engine_(mix(run_seed, level, chain, static_cast<std::uint64_t>(purpose))) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // (0, 1]; safe under log()
    double uniform_open01() { return 1.0 - uniform01(); }

    // Uniform on [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal by inverse cdf of (k + 1/2) * 2^-53, k in [0, 2^53):
    // strictly inside (0,1), symmetric, and free of distribution state.
    double normal() {
        const double p = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
        return std_normal_quantile(p);
    }

    Eigen::VectorXd normal_vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    // Uniform integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) {
        // Lemire-style rejection-free enough for our n << 2^64
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

   private:
    static std::uint64_t splitmix(std::uint64_t& s) {
        s += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t level,
                             std::uint64_t chain, std::uint64_t purpose) {
        std::uint64_t s = seed;
        std::uint64_t h = splitmix(s);
        s ^= level * 0xd1342543de82ef95ULL;
        h ^= splitmix(s);
        s ^= chain * 0xaf251af3b0f025b5ULL;
        h ^= splitmix(s);
        s ^= purpose * 0x9e3779b97f4a7c15ULL;
        h ^= splitmix(s);
        return h;
    }

    std::mt19937_64 engine_;
};

}  // namespace semis
