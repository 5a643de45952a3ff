#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace elan {

// Seeded normal generator used by every stochastic component.
//
// std::normal_distribution leaves the bit-to-variate mapping implementation
// defined, which would break byte-for-byte reproducibility of seeded runs
// across toolchains, so the Box-Muller mapping is pinned here on top of the
// (fully specified) mt19937_64 stream.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0,1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // (0,1] for the log, [0,1) for the angle.
    double u1 = static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.28318530717958647692528676656 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circular complex normal with E|z|^2 = 1 (re, im independent N(0, 1/2)).
  std::complex<double> circular() {
    constexpr double half = 0.70710678118654752440;
    double re = normal() * half;
    double im = normal() * half;
    return {re, im};
  }

  // Well-separated child seed for an indexed stream (splitmix64 finalizer).
  static std::uint64_t substream(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace elan
