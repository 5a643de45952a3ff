#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "elan/maxima.hpp"
#include "elan/morse.hpp"

namespace elan::influence {

// Closed-form level set |zeta| = lambda * peak around one event, used to
// decide when a smaller maximum is shielded by a larger one.
struct InfluenceRegion {
  double lambda = 0.0;
  double center_time = 0.0;                       // t-hat, samples
  double rho = 0.0;                               // rho-hat
  double wavelet_peak_omega = 0.0;                // for frequency conversion
  std::pair<double, double> s_range{0.0, 0.0};    // normalized scale bounds
  std::vector<std::pair<double, double>> curve;   // (tau, omega_s) loop
  bool empty = true;

  // Normalized half-width samples backing the membership test.
  std::vector<double> log_s_tilde;  // ascending
  std::vector<double> tau_tilde;
};

// Samples the level-set boundary on log-spaced normalized scales between the
// analytic bracket endpoints, dropping the ends where the level set closes.
InfluenceRegion region_curve(double lambda, const morse::WaveletSpec& w,
                             const morse::ElementSpec& e, double rho_hat,
                             double t_hat, std::size_t n_points = 256);

// Strict interior test of a physical (tau, omega_s) point.
bool contains(const InfluenceRegion& region, double tau, double omega_s);

// Sets flags.isolated: a point is rejected when a strictly larger-magnitude
// point (ties broken by earlier time) lies inside its region of influence.
// Pass only significance- and missing-data-filtered points.
void isolate(std::vector<maxima::MaximumPoint>& points, double lambda,
             const morse::WaveletSpec& w, const morse::ElementSpec& e);

}  // namespace elan::influence
