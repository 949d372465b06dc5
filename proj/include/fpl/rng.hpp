#ifndef FPL_RNG_HPP
#define FPL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "fpl/common.hpp"

namespace fpl {

// Deterministic RNG for everything in the library. mt19937_64 gives the
// bit stream; uniform/normal transforms are spelled out here because the
// std distribution objects are implementation-defined, and seeded runs
// must reproduce bit-identically everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1) with 53-bit resolution
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; draws are consumed in pairs and cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double std) { return mean + std * normal(); }

    // integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // rejection to kill modulo bias
        const std::uint64_t lim = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= lim);
        return v % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    // Independent substream for worker `id`; SplitMix64 over (seed, id)
    // decorrelates the seeds.
    static Rng substream(std::uint64_t seed, std::uint64_t id) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (id + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return Rng(z);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fpl

#endif
