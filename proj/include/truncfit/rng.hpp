#pragma once

#include <cstdint>
#include <random>

namespace truncfit {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seedable random source used by every simulation in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Its seed is splitmix64(seed) xor splitmix64(~stream), so a
/// (seed, stream) pair names one reproducible stream; replication i of an
/// experiment always uses stream i, independent of scheduling. Variate
/// transforms are implemented here rather than taken from <random> so the
/// draws do not depend on the standard library vendor:
///   uniform  53-bit mantissa, open interval (0,1)
///   normal   Box-Muller (both values of each pair are used)
///   gamma    Marsaglia-Tsang, with the U^(1/a) boost for shape < 1
///   discrete inverse CDF by sequential search
///   weibull  inverse CDF
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(splitmix64(seed) ^ splitmix64(~stream)) {}

    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal();

    /// Gamma variate with the given shape and scale.
    double gamma(double shape, double scale);

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace truncfit
