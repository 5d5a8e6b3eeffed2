#include "mtfl/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace mtfl {

namespace {
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
}

double Rng::uniform01() {
    return static_cast<double>(next() >> 11) * kTwoPow53Inv;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = static_cast<double>((next() >> 11) + 1) * kTwoPow53Inv;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be >= 1");
    // 2^64 mod bound, computed without overflow.
    const std::uint64_t excess = (0 - bound) % bound;
    const std::uint64_t limit = 0 - excess;  // 2^64 - excess, wraps to 0 when excess == 0
    for (;;) {
        const std::uint64_t x = next();
        if (excess == 0 || x < limit) return x % bound;
    }
}

std::vector<std::size_t> Rng::sample(std::size_t population, std::size_t k) {
    if (k > population) throw std::invalid_argument("Rng::sample: k exceeds population");
    std::vector<std::size_t> pool(population);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(below(population - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

} // namespace mtfl
