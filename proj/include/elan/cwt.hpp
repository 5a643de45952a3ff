#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "elan/morse.hpp"

namespace elan::cwt {

// Geometric frequency-grid controls: eta bounds how much window leaks past
// the Nyquist frequency at the top band, density sets the spacing
// r = 1 + 1/(density * P), and packing sets how many footprints of the
// largest scale must fit in the series.
struct GridParams {
  double eta = 0.05;
  double density = 4.0;
  double packing = 3.0;
};

struct FrequencyGrid {
  std::vector<double> omega;  // descending scale frequencies, omega[0] = highest
  double ratio = 0.0;         // omega[j] / omega[j+1]
  double omega_high = 0.0;
  double omega_low = 0.0;
  GridParams params;          // parameters the grid was built from
  std::size_t series_len = 0;
  std::size_t size() const { return omega.size(); }
};

// Throws std::invalid_argument when the parameters are out of range or the
// series is too short to hold even one admissible band.
FrequencyGrid build_grid(const morse::WaveletSpec& w, std::size_t series_len,
                         const GridParams& params = {});

// Analytic transform of a real series on the grid, column-major by scale.
struct TransformPlane {
  std::size_t length = 0;  // M
  morse::WaveletSpec wavelet;
  FrequencyGrid grid;
  std::vector<double> scales;                 // s_j = peak_omega / omega_j
  std::vector<std::complex<double>> values;   // values[j*length + t]
  std::vector<std::uint8_t> missing;          // per time sample (post-interpolation record)
  std::vector<std::size_t> edge_halfwidth;    // floor(L(s_j)/2) per scale

  std::complex<double> at(std::size_t t, std::size_t j) const {
    return values[j * length + t];
  }
  // True where boundary effects reach: within half a footprint of either end.
  bool is_edge(std::size_t t, std::size_t j) const {
    std::size_t hw = edge_halfwidth[j];
    return t < hw || t + hw >= length;
  }
};

// Gaps flagged in `missing` (nonzero entries) are filled by linear
// interpolation between the nearest valid samples (nearest valid value at the
// series ends) before transforming; the mask is carried through unchanged.
// The series is extended by whole-point mirror reflection about both
// endpoints to the next fast FFT length >= 2M, and each band is the inverse
// FFT of the windowed nonnegative-frequency spectrum.
TransformPlane transform(const std::vector<double>& x,
                         const std::vector<std::uint8_t>& missing,
                         const morse::WaveletSpec& w, const FrequencyGrid& grid,
                         int threads = 1);

inline TransformPlane transform(const std::vector<double>& x,
                                const morse::WaveletSpec& w,
                                const FrequencyGrid& grid, int threads = 1) {
  return transform(x, {}, w, grid, threads);
}

// Self-test of the rescaling law: the transform of x(t/stretch) must equal
// the transform of x with both axes stretched.  Returns the largest modulus
// discrepancy over interior points, relative to the plane maximum.
struct ScalingReport {
  double max_rel_deviation = 0.0;
  std::size_t points_compared = 0;
};
ScalingReport scaling_check(const std::vector<double>& x, int stretch,
                            const morse::WaveletSpec& w,
                            const GridParams& params = {});

}  // namespace elan::cwt
