#pragma once

#include <cstdint>
#include <cmath>

#include "lcpg/types.hpp"

namespace lcpg {

/// Deterministic RNG with hand-rolled distributions so that streams are
/// reproducible independent of the standard library's distribution
/// implementations. Core generator is xoshiro256**; streams are derived
/// from a (seed, stream) pair by a splitmix64 counter splitter.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t z = seed;
        for (int i = 0; i < 4; ++i) s_[i] = splitmix(z);
        z = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
        for (int i = 0; i < 4; ++i) s_[i] ^= splitmix(z);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    /// Child stream for a worker / run cell; independent of draws made here.
    Rng split(std::uint64_t stream) const {
        Rng child = *this;
        std::uint64_t z = s_[0] ^ (0xD1B54A32D192ED03ULL * (stream + 1));
        for (int i = 0; i < 4; ++i) child.s_[i] ^= splitmix(z);
        return child;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in {0, ..., n-1}.
    Index uniform_index(Index n) {
        Index i = static_cast<Index>(uniform() * static_cast<double>(n));
        return i >= n ? n - 1 : i;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Vector normal_vector(Index d) {
        Vector v(d);
        for (Index i = 0; i < d; ++i) v[i] = normal();
        return v;
    }

    /// Uniform point in the Euclidean ball of given radius around center.
    Vector in_ball(const Vector& center, double radius) {
        Vector dir = normal_vector(center.size());
        const double nrm = dir.norm();
        if (nrm < 1e-300) return center;
        const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(center.size()));
        return center + (r / nrm) * dir;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix(std::uint64_t& z) {
        z += 0x9E3779B97F4A7C15ULL;
        std::uint64_t r = z;
        r = (r ^ (r >> 30)) * 0xBF58476D1CE4E5B9ULL;
        r = (r ^ (r >> 27)) * 0x94D049BB133111EBULL;
        return r ^ (r >> 31);
    }

    std::uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace lcpg
