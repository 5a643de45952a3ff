#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "elan/cwt.hpp"

namespace elan::maxima {

// A strict local maximum of |w| over the four time/scale neighbors, with the
// frequency position refined by quadratic interpolation of the modulus along
// the log-frequency axis.
struct MaximumPoint {
  std::size_t t_index = 0;      // time sample of the grid maximum
  std::size_t scale_index = 0;  // band of the grid maximum
  double omega_s = 0.0;         // refined scale frequency
  double scale = 0.0;           // refined scale
  std::complex<double> value;   // refined modulus, phase of the grid point
  double norm_magnitude = 0.0;  // w-tilde, filled during significance testing
  double missing_fraction = 0.0;  // gap or out-of-bounds share of the footprint
  struct {
    bool edge = false;
    bool significant = false;
    bool missing_rejected = false;
    bool isolated = false;
  } flags;

  double magnitude() const { return std::abs(value); }
};

// Parabola through (log omega, modulus) at three adjacent bands; returns the
// vertex frequency and the center value rescaled to the vertex height.
// Degenerate curvature returns the center point unchanged.
std::pair<double, std::complex<double>> refine(
    const std::array<double, 3>& moduli, const std::array<double, 3>& omegas,
    std::complex<double> center_value);

// Candidates whose modulus strictly exceeds the four grid neighbors; first
// and last rows/columns are excluded.  Output is ordered by descending
// magnitude, ties broken by earlier time.
std::vector<MaximumPoint> find_maxima(const cwt::TransformPlane& plane);

// Marks points whose footprint window holds more than max_fraction of
// gap-filled or out-of-bounds samples.
void apply_missing_rule(std::vector<MaximumPoint>& points, double max_fraction);

}  // namespace elan::maxima
