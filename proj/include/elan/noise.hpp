#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "elan/cwt.hpp"
#include "elan/morse.hpp"

namespace elan::noise {

// Power-law spectrum S(omega) = A^2 |omega|^{-2 alpha}; for alpha = 0 the
// amplitude A equals the sample standard deviation.
struct NoiseModel {
  double alpha = 0.0;
  double amplitude = 1.0;
};

// Expected squared transform modulus sigma^2(s) = A^2 f s^(2 alpha - 1).
double wavelet_spectrum(const NoiseModel& model, const morse::WaveletSpec& w,
                        double scale);

// Transform covariance E{ w(t, s) conj(w(t + u, r s)) } under the model.
// Holds the order-(2 beta - 2 alpha) waveform it is built from, which is the
// expensive part; evaluation is cheap and thread-safe.
class XiCovariance {
 public:
  XiCovariance(const NoiseModel& model, const morse::WaveletSpec& w);
  std::complex<double> operator()(double u, double scale, double ratio) const;
  const NoiseModel& model() const { return model_; }
  const morse::WaveletSpec& wavelet() const { return wavelet_; }

 private:
  NoiseModel model_;
  morse::WaveletSpec wavelet_;
  double log_pref_ = 0.0;   // 2 ln a_beta - ln a_cross
  double exponent_ = 0.0;   // (2 beta - 2 alpha + 1) / gamma
  std::shared_ptr<const morse::TimeWavelet> psi_;
};

std::complex<double> xi_covariance(const NoiseModel& model,
                                   const morse::WaveletSpec& w, double u,
                                   double scale, double ratio);

// Row-major 5x5 complex matrix.
using Matrix5 = std::array<std::complex<double>, 25>;

// Covariance of [w(t,s), w(t+1,s), w(t-1,s), w(t,rs), w(t,s/r)] normalized by
// sigma^2(s).  Hermitian by construction; eigenvalues in [-1e-10, 0) are
// clipped to zero, anything lower throws.
Matrix5 sigma_matrix(const XiCovariance& xi, double scale, double ratio);
Matrix5 sigma_matrix(const NoiseModel& model, const morse::WaveletSpec& w,
                     double scale, double ratio);

// Lower-triangular L with sigma = L L^H; throws if the factorization fails
// even after a small diagonal ridge.
Matrix5 cholesky_factor(const Matrix5& sigma);

// Histogram of noise-only maxima magnitudes at one scale, normalized to
// expected counts per footprint.  density and survival have bins + 1 entries;
// the last density entry is the overflow bin above the final edge.
struct RateTable {
  std::size_t scale_index = 0;
  std::vector<double> bin_edges;  // bins + 1 ascending edges
  std::vector<double> density;    // per footprint per bin, last = overflow
  std::vector<double> survival;   // per footprint at w >= each edge
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct HistogramSpec {
  std::size_t bins = 100;
  double w_max = 3.0;
};

// Monte Carlo of the five-point neighborhood at every grid scale: a draw is a
// maximum when the center modulus strictly exceeds the other four.  Each
// scale runs on its own deterministic substream of `seed`.
std::vector<RateTable> simulate_maxima(const NoiseModel& model,
                                       const morse::WaveletSpec& w,
                                       const cwt::FrequencyGrid& grid,
                                       std::uint64_t n_realizations,
                                       std::uint64_t seed,
                                       const HistogramSpec& hist = {},
                                       int threads = 1);

// Brute-force check: generates noise (alpha 0 or 1), transforms it on the
// first band_count grid frequencies, and histograms the maxima of the middle
// band.  Magnitudes are taken at the grid point (no refinement) to match what
// simulate_maxima draws.
RateTable direct_maxima_oracle(const NoiseModel& model,
                               const morse::WaveletSpec& w,
                               std::size_t band_count, std::size_t length,
                               std::uint64_t seed,
                               const HistogramSpec& hist = {});

// Target of `events` false detections per `n_series` series of length
// `length`, per scale band.
struct RateTarget {
  double events = 1.0;
  double n_series = 1000.0;
  std::size_t length = 0;
};

// Inverts each scale's survival curve to the magnitude cutoff meeting the
// target; first and last band cutoffs are copied from their nearest interior
// neighbor.  Throws when the target sits below the Monte Carlo floor.
std::vector<double> threshold_for_rate(const std::vector<RateTable>& tables,
                                       const morse::WaveletSpec& w,
                                       const cwt::FrequencyGrid& grid,
                                       const RateTarget& target);

// Noise amplitude inverted from the mean squared modulus of the
// highest-frequency band (non-edge, originally valid samples only).
double estimate_amplitude(const cwt::TransformPlane& plane, double alpha);
inline double estimate_sigma_eps(const cwt::TransformPlane& plane) {
  return estimate_amplitude(plane, 0.0);
}

}  // namespace elan::noise
