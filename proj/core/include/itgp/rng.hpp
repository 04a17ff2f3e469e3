#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace itgp {

/// Seeded random source with a fixed draw discipline.
///
/// Wraps std::mt19937_64 (whose output sequence is pinned by the standard)
/// and derives uniform/normal variates with explicit transforms instead of
/// std::*_distribution, so a given seed produces the same stream on every
/// platform. Consumers that need independent streams construct one Rng per
/// stream (e.g. one per benchmark replicate, seeded base_seed + index).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms per draw.
    double normal() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) {
        return mean + sd * normal();
    }

    /// Integer in [0, n). The floor-of-uniform mapping has O(2^-53) bias,
    /// negligible for the sample sizes used here.
    std::size_t below(std::size_t n) {
        auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return k < n ? k : n - 1;
    }

    /// k distinct indices from {0, ..., n-1}, returned in ascending order.
    /// Partial Fisher-Yates; consumes exactly k uniforms.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::mt19937_64 gen_;
};

inline std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + below(n - i);
        std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> out(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace itgp
