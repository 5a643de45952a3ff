#include "elan/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "elan/influence.hpp"

namespace elan::pipeline {
namespace {

void validate(const AnalysisConfig& config) {
  if (!(config.beta > 0.0))
    throw std::invalid_argument("config: beta must be positive");
  if (!(config.gamma > 0.0))
    throw std::invalid_argument("config: gamma must be positive");
  if (!(config.mu >= 0.0))
    throw std::invalid_argument("config: mu must be >= 0");
  if (!(config.alpha >= 0.0))
    throw std::invalid_argument("config: alpha must be >= 0");
  if (!(config.lambda > 0.0 && config.lambda < 1.0))
    throw std::invalid_argument("config: lambda must lie in (0, 1)");
  if (!(config.missing_max >= 0.0 && config.missing_max <= 1.0))
    throw std::invalid_argument("config: missing_max must lie in [0, 1]");
  if (!(config.rate_events > 0.0) || !(config.rate_n_series > 0.0))
    throw std::invalid_argument("config: rate target must be positive");
  if (!config.estimate_noise && !(config.noise_amplitude > 0.0))
    throw std::invalid_argument("config: fixed noise amplitude must be positive");
  if (config.n_realizations == 0)
    throw std::invalid_argument("config: n_realizations must be positive");
  if (config.bins < 2 || !(config.bin_max > 0.0))
    throw std::invalid_argument("config: histogram shape invalid");
}

// Normalized |t| beyond which the waveform stays under 1e-6 of its peak,
// found by doubling (coarse by design; it only pads the evaluation window).
double support_halfwidth(const morse::TimeWavelet& psi) {
  double peak = std::abs(psi(0.0));
  double u = 1.0;
  while (u < 1e6 && std::abs(psi(u)) > 1e-6 * peak) u *= 2.0;
  return u;
}

}  // namespace

EventEstimate infer(const maxima::MaximumPoint& point,
                    const morse::WaveletSpec& w, const morse::ElementSpec& e) {
  morse::ZetaPeak peak = morse::zeta_max(w, e);
  EventEstimate est;
  est.t_hat = static_cast<double>(point.t_index);
  est.rho_hat = point.scale / peak.scale;
  est.omega_rho = e.peak_omega / est.rho_hat;
  est.c_hat = 2.0 * point.value / peak.value;
  return est;
}

std::vector<double> reconstruct(const std::vector<EventEstimate>& events,
                                const morse::ElementSpec& e,
                                std::size_t length) {
  std::vector<double> x(length, 0.0);
  if (events.empty()) return x;

  morse::TimeWavelet psi(e.mu, e.gamma);
  const double halfwidth = support_halfwidth(psi);
  for (const EventEstimate& ev : events) {
    if (!(ev.rho_hat > 0.0))
      throw std::invalid_argument("event scale must be positive");
    double lo = ev.t_hat - ev.rho_hat * halfwidth;
    double hi = ev.t_hat + ev.rho_hat * halfwidth;
    std::size_t t0 = lo <= 0.0 ? 0
                               : static_cast<std::size_t>(
                                     std::min(lo, static_cast<double>(length)));
    std::size_t t1 = hi <= 0.0 ? 0
                               : static_cast<std::size_t>(std::min(
                                     hi + 1.0, static_cast<double>(length)));
    for (std::size_t t = t0; t < t1; ++t) {
      double u = (static_cast<double>(t) - ev.t_hat) / ev.rho_hat;
      x[t] += (ev.c_hat * psi(u)).real();
    }
  }
  return x;
}

AnalysisResult run(const std::vector<double>& x,
                   const std::vector<std::uint8_t>& missing,
                   const AnalysisConfig& config,
                   const std::vector<noise::RateTable>* tables) {
  validate(config);
  morse::WaveletSpec wavelet(config.beta, config.gamma);
  morse::ElementSpec element(config.mu, config.gamma);

  AnalysisResult result;
  result.grid = cwt::build_grid(wavelet, x.size(), config.grid);
  cwt::TransformPlane plane =
      cwt::transform(x, missing, wavelet, result.grid, config.threads);

  noise::NoiseModel model;
  model.alpha = config.alpha;
  model.amplitude = config.estimate_noise
                        ? noise::estimate_amplitude(plane, config.alpha)
                        : config.noise_amplitude;
  if (!(model.amplitude > 0.0))
    throw std::runtime_error(
        "estimated noise amplitude is zero; set a fixed amplitude");
  result.noise_amplitude = model.amplitude;

  std::vector<noise::RateTable> own_tables;
  if (!tables) {
    // Tables are built from the amplitude-normalized covariance, so a unit
    // amplitude keeps them shareable across series with different noise
    // levels.
    noise::NoiseModel table_model{config.alpha, 1.0};
    own_tables = noise::simulate_maxima(
        table_model, wavelet, result.grid, config.n_realizations, config.seed,
        {config.bins, config.bin_max}, config.threads);
    tables = &own_tables;
  }
  noise::RateTarget target{config.rate_events, config.rate_n_series, x.size()};
  result.thresholds =
      noise::threshold_for_rate(*tables, wavelet, result.grid, target);

  result.maxima = maxima::find_maxima(plane);
  for (auto& p : result.maxima) {
    p.norm_magnitude =
        p.magnitude() / std::sqrt(noise::wavelet_spectrum(model, wavelet,
                                                          p.scale));
    p.flags.significant =
        !p.flags.edge && p.norm_magnitude > result.thresholds[p.scale_index];
  }
  maxima::apply_missing_rule(result.maxima, config.missing_max);

  std::vector<maxima::MaximumPoint> candidates;
  std::vector<std::size_t> candidate_index;
  for (std::size_t i = 0; i < result.maxima.size(); ++i) {
    if (result.maxima[i].flags.significant) {
      candidates.push_back(result.maxima[i]);
      candidate_index.push_back(i);
    }
  }
  influence::isolate(candidates, config.lambda, wavelet, element);
  for (std::size_t k = 0; k < candidates.size(); ++k)
    result.maxima[candidate_index[k]].flags.isolated =
        candidates[k].flags.isolated;

  for (std::size_t i = 0; i < result.maxima.size(); ++i) {
    const auto& p = result.maxima[i];
    if (!p.flags.significant || !p.flags.isolated) continue;
    EventEstimate est = infer(p, wavelet, element);
    est.source = i;
    result.events.push_back(est);
  }

  result.count_maxima = result.maxima.size();
  result.count_significant = candidates.size();
  result.count_isolated = result.events.size();

  result.reconstruction = reconstruct(result.events, element, x.size());
  result.residual.resize(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    bool gap = !missing.empty() && missing[t];
    result.residual[t] = gap ? std::numeric_limits<double>::quiet_NaN()
                             : x[t] - result.reconstruction[t];
  }

  result.expected_false_per_scale = config.rate_events / config.rate_n_series;
  const std::size_t m = x.size();
  for (std::size_t j = 0; j < result.grid.size(); ++j) {
    // The first and last bands cannot host maxima (no scale neighbor on one
    // side), so they contribute nothing to the detectable false-event budget.
    if (j == 0 || j + 1 == result.grid.size()) continue;
    std::size_t hw = plane.edge_halfwidth[j];
    std::size_t lo = std::max<std::size_t>(1, hw);
    std::size_t hi = std::min(m - 2, m - 1 - hw);
    double exposed = hi >= lo ? static_cast<double>(hi - lo + 1) : 0.0;
    result.expected_false_total += result.expected_false_per_scale * exposed /
                                   static_cast<double>(m);
  }

  if (config.keep_plane) {
    result.plane = std::move(plane);
    result.has_plane = true;
  }
  return result;
}

}  // namespace elan::pipeline
