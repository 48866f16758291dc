#pragma once

// Seeded sampling with explicit bit-to-double conversion so streams are
// reproducible across standard libraries (std::uniform_real_distribution
// is implementation-defined).

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace rankcurve {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    // uniform in [0,1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller, one value per call (no caching, keeps the stream simple)
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::vector<double> unit_vector(int n) {
        std::vector<double> v(n);
        double s = 0.0;
        do {
            s = 0.0;
            for (int i = 0; i < n; ++i) {
                v[i] = gaussian();
                s += v[i] * v[i];
            }
        } while (s < 1e-300);
        s = 1.0 / std::sqrt(s);
        for (auto& x : v)
            x *= s;
        return v;
    }

    // uniform in the open ball of given radius around the origin
    std::vector<double> ball_point(int n, double radius) {
        std::vector<double> v = unit_vector(n);
        double r = radius * std::pow(uniform(), 1.0 / n);
        for (auto& x : v)
            x *= r;
        return v;
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace rankcurve
