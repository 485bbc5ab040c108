#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bassdp {

// Splittable seed derivation: replicate r of a run seeded with `base` uses
// derive_seed(base, r). splitmix64 decorrelates adjacent seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base + index);
}

// mt19937_64 with inverse-transform exponential sampling. Draws are
// bit-stable across platforms (std:: distributions are deliberately avoided).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    // Uniform on (0, 1]; never returns 0 so -log(u) is finite.
    double uniform01() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

    std::uint64_t next_u64() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace bassdp
