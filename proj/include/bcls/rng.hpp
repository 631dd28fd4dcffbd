#ifndef BCLS_RNG_HPP
#define BCLS_RNG_HPP

#include <cstdint>
#include <random>

namespace bcls {

/// Seeded random source with platform-independent draws.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are implementation-defined, so the
/// conversions to uniform, normal and integer draws are done here:
///   uniform01  = top 53 bits / 2^53
///   normal     = Box-Muller on two uniform01 draws (one value per call)
///   below(k)   = rejection sampling on 64-bit words
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform01();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double normal();
    bool bernoulli(double p) { return uniform01() < p; }
    /// Uniform integer in [0, k).
    std::uint64_t below(std::uint64_t k);

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to derive independent sub-stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for named sub-stream `stream` of `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
}

}  // namespace bcls

#endif
