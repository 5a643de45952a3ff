#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "elan/cwt.hpp"
#include "elan/maxima.hpp"
#include "elan/morse.hpp"
#include "elan/noise.hpp"

namespace elan::pipeline {

struct EventEstimate {
  double t_hat = 0.0;            // center time, samples
  double rho_hat = 0.0;          // element scale
  double omega_rho = 0.0;        // element peak frequency
  std::complex<double> c_hat;    // amplitude and phase
  std::size_t source = 0;        // index into AnalysisResult::maxima
};

struct AnalysisConfig {
  double beta = 2.0;
  double gamma = 2.0;
  double mu = 1.0;
  double alpha = 0.0;
  bool estimate_noise = true;     // else use noise_amplitude as given
  double noise_amplitude = 1.0;
  cwt::GridParams grid;
  double lambda = 0.5;
  double missing_max = 0.1;
  double rate_events = 1.0;       // false detections per rate_n_series series
  double rate_n_series = 1000.0;  // of the input length, per scale band
  std::uint64_t n_realizations = 20000000;
  std::uint64_t seed = 1;
  std::size_t bins = 200;         // maxima histogram resolution
  double bin_max = 6.0;
  bool keep_plane = false;
  int threads = 1;
};

struct AnalysisResult {
  cwt::FrequencyGrid grid;
  double noise_amplitude = 0.0;            // A actually used
  std::vector<double> thresholds;          // normalized cutoff per scale band
  std::vector<maxima::MaximumPoint> maxima;  // all detections, flags filled
  std::vector<EventEstimate> events;       // survivors, descending magnitude
  std::vector<double> reconstruction;
  std::vector<double> residual;            // x - reconstruction, NaN at gaps
  double expected_false_per_scale = 0.0;
  double expected_false_total = 0.0;       // edge-adjusted sum over bands
  std::size_t count_maxima = 0;
  std::size_t count_significant = 0;       // passing significance and gap rules
  std::size_t count_isolated = 0;
  bool has_plane = false;
  cwt::TransformPlane plane;               // populated when keep_plane set
};

// Maps a refined maximum to the element parameters that would have produced
// it: rho = s / peak_scale, c = 2 w / zeta_peak, and the element frequency.
EventEstimate infer(const maxima::MaximumPoint& point,
                    const morse::WaveletSpec& w, const morse::ElementSpec& e);

// Superposition of Re{ c psi((t - t_hat)/rho) } over events, each evaluated
// on a window where the waveform exceeds 1e-6 of its peak.
std::vector<double> reconstruct(const std::vector<EventEstimate>& events,
                                const morse::ElementSpec& e,
                                std::size_t length);

// Full chain: transform, maxima, significance, missing-data rule, isolation,
// inversion, reconstruction.  Pass prebuilt rate tables to skip simulation.
AnalysisResult run(const std::vector<double>& x,
                   const std::vector<std::uint8_t>& missing,
                   const AnalysisConfig& config,
                   const std::vector<noise::RateTable>* tables = nullptr);

}  // namespace elan::pipeline
