#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "musicdoa/types.hpp"

namespace musicdoa {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed and an index path, so concurrent trials never share state.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seed for the stream identified by (master, i0, i1, ...). The same path
/// always yields the same seed; distinct paths yield unrelated seeds.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(master);
    for (std::uint64_t idx : path)
        h = mix64(h ^ mix64(idx + 0x632be59bd9b4e019ull));
    return h;
}

/// Deterministic Gaussian sampler on top of mt19937_64. Box-Muller on the
/// raw 64-bit output, so the draw sequence is pinned by the seed alone
/// (no library-defined distribution state involved).
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    /// One standard-normal pair.
    void next_pair(double& z0, double& z1) {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log1p(-u1)); // log(1-u1), u1 in [0,1)
        const double phi = 2.0 * kPi * u2;
        z0 = r * std::cos(phi);
        z1 = r * std::sin(phi);
    }

    /// Circular complex Gaussian sample with total variance `power`
    /// (power/2 per real component).
    Complex next_complex(double power) {
        double z0, z1;
        next_pair(z0, z1);
        const double s = std::sqrt(0.5 * power);
        return {s * z0, s * z1};
    }

  private:
    double uniform01() {
        // 53-bit mantissa, value in [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
};

} // namespace musicdoa
