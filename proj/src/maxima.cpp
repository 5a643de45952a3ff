#include "elan/maxima.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace elan::maxima {

std::pair<double, std::complex<double>> refine(
    const std::array<double, 3>& moduli, const std::array<double, 3>& omegas,
    std::complex<double> center_value) {
  double x0 = std::log(omegas[0]);
  double x1 = std::log(omegas[1]);
  double x2 = std::log(omegas[2]);
  double d1 = (moduli[1] - moduli[0]) / (x1 - x0);
  double d2 = (moduli[2] - moduli[1]) / (x2 - x1);
  double curvature = (d2 - d1) / (x2 - x0);
  if (!(curvature < 0.0)) return {omegas[1], center_value};

  double vertex = 0.5 * (x0 + x1) - d1 / (2.0 * curvature);
  double height = moduli[0] + d1 * (vertex - x0) +
                  curvature * (vertex - x0) * (vertex - x1);
  return {std::exp(vertex), std::polar(height, std::arg(center_value))};
}

std::vector<MaximumPoint> find_maxima(const cwt::TransformPlane& plane) {
  const std::size_t m = plane.length;
  const std::size_t n_scales = plane.grid.size();
  if (m < 3 || n_scales < 3)
    throw std::invalid_argument("plane too small for maxima detection");

  std::vector<double> modulus(plane.values.size());
  for (std::size_t i = 0; i < plane.values.size(); ++i)
    modulus[i] = std::abs(plane.values[i]);

  std::vector<MaximumPoint> found;
  for (std::size_t j = 1; j + 1 < n_scales; ++j) {
    const double* up = modulus.data() + (j - 1) * m;    // higher frequency
    const double* mid = modulus.data() + j * m;
    const double* down = modulus.data() + (j + 1) * m;  // lower frequency
    for (std::size_t t = 1; t + 1 < m; ++t) {
      double v = mid[t];
      if (!(v > mid[t - 1] && v > mid[t + 1] && v > up[t] && v > down[t]))
        continue;

      MaximumPoint peak;
      peak.t_index = t;
      peak.scale_index = j;
      auto [omega, value] =
          refine({up[t], v, down[t]},
                 {plane.grid.omega[j - 1], plane.grid.omega[j],
                  plane.grid.omega[j + 1]},
                 plane.at(t, j));
      peak.omega_s = omega;
      peak.scale = plane.wavelet.peak_omega / omega;
      peak.value = value;
      peak.flags.edge = plane.is_edge(t, j);

      std::size_t hw = static_cast<std::size_t>(
          std::floor(0.5 * morse::footprint(plane.wavelet, peak.scale)));
      std::size_t gaps = 0;
      std::size_t window = 2 * hw + 1;
      for (std::size_t k = 0; k < window; ++k) {
        std::int64_t idx = static_cast<std::int64_t>(t) +
                           static_cast<std::int64_t>(k) -
                           static_cast<std::int64_t>(hw);
        if (idx < 0 || idx >= static_cast<std::int64_t>(m) ||
            plane.missing[static_cast<std::size_t>(idx)])
          ++gaps;
      }
      peak.missing_fraction =
          static_cast<double>(gaps) / static_cast<double>(window);
      found.push_back(peak);
    }
  }
  std::sort(found.begin(), found.end(),
            [](const MaximumPoint& a, const MaximumPoint& b) {
              double ma = a.magnitude(), mb = b.magnitude();
              if (ma != mb) return ma > mb;
              if (a.t_index != b.t_index) return a.t_index < b.t_index;
              return a.scale_index < b.scale_index;
            });
  return found;
}

void apply_missing_rule(std::vector<MaximumPoint>& points,
                        double max_fraction) {
  if (!(max_fraction >= 0.0 && max_fraction <= 1.0))
    throw std::invalid_argument("missing-data threshold must lie in [0, 1]");
  for (auto& p : points) {
    if (p.missing_fraction > max_fraction) {
      p.flags.significant = false;
      p.flags.missing_rejected = true;
    }
  }
}

}  // namespace elan::maxima
