#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace mtfl {

/// Seeded random stream "mtfl-rng v1".
///
/// The engine is std::mt19937_64, whose output sequence the C++ standard
/// fixes. All transforms are implemented here rather than taken from
/// <random>, whose distributions are implementation-defined:
///   uniform01:  (x >> 11) * 2^-53, in [0, 1)
///   uniform:    a + (b - a) * uniform01
///   normal:     Box-Muller on u1 = ((x >> 11) + 1) * 2^-53 and u2 = uniform01,
///               returning the cosine branch first and caching the sine branch
///   below(k):   rejection on x >= 2^64 - (2^64 mod k), then x mod k
///   sample:     partial Fisher-Yates over [0, N) using below()
class Rng {
public:
    static constexpr int kVersion = 1;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform01();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    /// Uniform integer in [0, bound). bound must be >= 1.
    std::uint64_t below(std::uint64_t bound);
    /// k distinct indices from [0, population) in selection order.
    std::vector<std::size_t> sample(std::size_t population, std::size_t k);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace mtfl
