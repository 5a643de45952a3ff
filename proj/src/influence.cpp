#include "elan/influence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace elan::influence {
namespace {

void check_orders(double lambda, const morse::WaveletSpec& w,
                  const morse::ElementSpec& e) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("lambda must lie in (0, 1)");
  if (!(w.beta > 0.0))
    throw std::invalid_argument("influence region requires beta > 0");
  if (w.gamma != e.gamma)
    throw std::invalid_argument("wavelet and element gammas differ");
}

}  // namespace

InfluenceRegion region_curve(double lambda, const morse::WaveletSpec& w,
                             const morse::ElementSpec& e, double rho_hat,
                             double t_hat, std::size_t n_points) {
  check_orders(lambda, w, e);
  if (!(rho_hat > 0.0))
    throw std::invalid_argument("rho_hat must be positive");
  if (n_points < 64) n_points = 64;

  const double beta = w.beta;
  const double mu = e.mu;
  const double gamma = w.gamma;
  const double exponent = (beta + mu + 1.0) / gamma;
  const double theta = morse::zeta_max(w, e).theta;
  const double k2 = morse::cumulants(morse::WaveletSpec(beta + mu, gamma)).k2;

  InfluenceRegion region;
  region.lambda = lambda;
  region.center_time = t_hat;
  region.rho = rho_hat;
  region.wavelet_peak_omega = w.peak_omega;

  const double lt = lambda * theta;
  const double s_lo = std::pow(lt, 1.0 / beta);
  const double s_hi = std::pow(lt, -1.0 / (mu + 1.0));
  if (!(s_hi > s_lo)) return region;

  const double log_lo = std::log(s_lo);
  const double step = (std::log(s_hi) - log_lo) /
                      static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    double log_s = log_lo + step * static_cast<double>(i);
    double s = std::exp(log_s);
    double lsg = std::log1p(std::pow(s, gamma));  // ln(s^gamma + 1)
    double log_arg = beta * log_s - std::log(lt) - exponent * lsg;
    if (log_arg <= 0.0) continue;  // level set closed here
    double tau = std::sqrt(2.0 * std::exp(2.0 * lsg / gamma) * log_arg / k2);
    region.log_s_tilde.push_back(log_s);
    region.tau_tilde.push_back(tau);
  }
  if (region.log_s_tilde.empty()) return region;

  region.empty = false;
  region.s_range = {std::exp(region.log_s_tilde.front()),
                    std::exp(region.log_s_tilde.back())};
  // Forward pass on the +tau branch, backward on the -tau branch, so the
  // polyline closes around the center.
  const std::size_t kept = region.log_s_tilde.size();
  region.curve.reserve(2 * kept);
  for (std::size_t i = 0; i < kept; ++i) {
    double s = std::exp(region.log_s_tilde[i]);
    region.curve.emplace_back(t_hat + rho_hat * region.tau_tilde[i],
                              w.peak_omega / (rho_hat * s));
  }
  for (std::size_t i = kept; i-- > 0;) {
    double s = std::exp(region.log_s_tilde[i]);
    region.curve.emplace_back(t_hat - rho_hat * region.tau_tilde[i],
                              w.peak_omega / (rho_hat * s));
  }
  return region;
}

bool contains(const InfluenceRegion& region, double tau, double omega_s) {
  if (region.empty) return false;
  if (!(omega_s > 0.0)) return false;
  double s_tilde = region.wavelet_peak_omega / (region.rho * omega_s);
  double log_s = std::log(s_tilde);
  const auto& xs = region.log_s_tilde;
  if (log_s <= xs.front() || log_s >= xs.back()) return false;

  auto it = std::upper_bound(xs.begin(), xs.end(), log_s);
  std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  std::size_t lo = hi - 1;
  double frac = (log_s - xs[lo]) / (xs[hi] - xs[lo]);
  double limit = region.tau_tilde[lo] +
                 frac * (region.tau_tilde[hi] - region.tau_tilde[lo]);
  double tau_tilde = std::abs(tau - region.center_time) / region.rho;
  return tau_tilde < limit;
}

void isolate(std::vector<maxima::MaximumPoint>& points, double lambda,
             const morse::WaveletSpec& w, const morse::ElementSpec& e) {
  check_orders(lambda, w, e);
  const double peak_scale = std::pow(w.beta / (e.mu + 1.0), 1.0 / w.gamma);

  // True when q outranks p: strictly larger magnitude, or the stated
  // tie-breaks (earlier time, then higher frequency band).
  auto outranks = [](const maxima::MaximumPoint& q,
                     const maxima::MaximumPoint& p) {
    double mq = q.magnitude(), mp = p.magnitude();
    if (mq != mp) return mq > mp;
    if (q.t_index != p.t_index) return q.t_index < p.t_index;
    return q.scale_index < p.scale_index;
  };

  for (auto& p : points) {
    p.flags.isolated = true;
    InfluenceRegion region;
    bool built = false;
    for (const auto& q : points) {
      if (&q == &p || !outranks(q, p)) continue;
      if (!built) {
        region = region_curve(lambda, w, e, p.scale / peak_scale,
                              static_cast<double>(p.t_index));
        built = true;
      }
      if (contains(region, static_cast<double>(q.t_index), q.omega_s)) {
        p.flags.isolated = false;
        break;
      }
    }
  }
}

}  // namespace elan::influence
