// Deterministic random number generation. All randomness in the project
// flows through this type so that a scenario seed reproduces byte-identical
// results. Streams are splittable: child streams are derived from a seed and
// a key, so e.g. adding a pedestrian to a generator does not perturb the
// samples drawn for the others.
#pragma once

#include <cstdint>
#include <random>

namespace ccm {

namespace detail {
// splitmix64, the usual mixer for expanding/combining seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}
}  // namespace detail

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : base_(detail::mix64(seed)), gen_(base_) {}

    // Child stream independent of draws made on this one.
    Rng split(std::uint64_t key) const {
        return Rng(base_ ^ detail::mix64(key + 0x517cc1b727220a95ull));
    }

    std::uint64_t next_u64() { return gen_(); }

    // Canonical double in [0,1): 53 mantissa bits, identical on every platform
    // (std::uniform_real_distribution is implementation-defined, so not used).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n) via 128-bit multiply (Lemire reduction).
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(gen_()) * n) >> 64);
    }

  private:
    std::uint64_t base_;
    std::mt19937_64 gen_;
};

}  // namespace ccm
