#pragma once

#include <cmath>
#include <cstdint>

namespace cyl {

// Splitmix64-based generator. Deterministic across platforms (unlike
// std::normal_distribution, whose algorithm is implementation-defined),
// splittable so parallel workers get independent reproducible streams.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [a, b)
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // standard normal via Box-Muller (cached second deviate)
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 0x1.0p-60) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925287 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    // independent child stream; child(i) != child(j) for i != j
    Rng split(std::uint64_t index) const {
        Rng probe(state_ ^ (0xd1b54a32d192ed03ull * (index + 1)));
        return Rng(probe.next_u64());
    }

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace cyl
