#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace elan::morse {

// Analyzing wavelet orders (beta, gamma) plus the constants derived from them.
//
// The frequency-domain window is a * w^beta * exp(-w^gamma) on w >= 0 (half
// weight exactly at w = 0, zero for w < 0), with `a` chosen so the window
// peaks at the value 2.  That normalization makes the transform of
// c*cos(w0 t) peak at modulus |c|.
struct WaveletSpec {
  double beta = 0.0;
  double gamma = 0.0;
  double log_amplitude = 0.0;  // ln a
  double amplitude = 0.0;      // a = 2 (e*gamma/beta)^(beta/gamma); a = 2 for beta = 0
  double peak_omega = 0.0;     // (beta/gamma)^(1/gamma); half-power point (ln 2)^(1/gamma) for beta = 0
  double duration = 0.0;       // P = sqrt(beta*gamma), dimensionless duration

  WaveletSpec() = default;
  WaveletSpec(double beta, double gamma);  // throws std::invalid_argument on beta < 0 or gamma <= 0
};

// Element (signal-model) orders (mu, gamma).  Same one-sided window family;
// mu = 0 is allowed and uses the half-power frequency convention.
struct ElementSpec {
  double mu = 0.0;
  double gamma = 0.0;
  double log_amplitude = 0.0;
  double amplitude = 0.0;
  double peak_omega = 0.0;

  ElementSpec() = default;
  ElementSpec(double mu, double gamma);
};

// Frequency-domain window at a single frequency (or a batch of them).
double freq_wavelet(const WaveletSpec& w, double omega);
std::vector<double> freq_wavelet(const WaveletSpec& w, const std::vector<double>& omega);

// Time-domain waveform psi(t) = (1/2pi) * integral of the window times
// e^{iwt} over w >= 0, evaluated by product quadrature (Filon panels with a
// graded head), so arbitrary real t keeps full accuracy even when the
// integrand oscillates hundreds of cycles.  Construction self-checks the
// panel resolution against the exact zeroth moment.
class TimeWavelet {
 public:
  TimeWavelet(double beta, double gamma);
  ~TimeWavelet();
  TimeWavelet(TimeWavelet&&) noexcept;
  TimeWavelet& operator=(TimeWavelet&&) noexcept;

  std::complex<double> operator()(double t) const;
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

  struct Panels;  // quadrature tables; public only for the implementation file

 private:
  double beta_ = 0.0, gamma_ = 0.0;
  std::unique_ptr<Panels> panels_;
};

std::complex<double> time_wavelet(const WaveletSpec& w, double t);
std::vector<std::complex<double>> time_wavelet(const WaveletSpec& w,
                                               const std::vector<double>& t);

// n-th frequency moment M_n = a/(2pi gamma) * Gamma((beta+1+n)/gamma).
// psi(0) == moment(0).  Requires beta + 1 + n > 0.
double moment(int n, const WaveletSpec& w);

// First two cumulants of the demodulated waveform: psi(t) is approximately
// psi(0) * exp(i K1 t - K2 t^2 / 2) near t = 0.
struct Cumulants {
  double k1 = 0.0;
  double k2 = 0.0;
};
Cumulants cumulants(const WaveletSpec& w);

// Footprint L(s) = 2 sqrt(2) P s / peak_omega, the time interval holding
// roughly 95% of the waveform's energy at scale s.  Requires beta > 0.
double footprint(const WaveletSpec& w, double scale);

// Scale-plane shape traced by one element seen through the analyzing wavelet:
// the transform of c * psi_element((t - t0)/rho) equals
// (c/2) * zeta((tau - t0)/rho, s/rho).  `Zeta` caches the order-(beta+mu)
// waveform for repeated evaluation; the free function is a one-shot helper.
class Zeta {
 public:
  Zeta(const WaveletSpec& w, const ElementSpec& e);  // gammas must match

  std::complex<double> operator()(double tau, double scale) const;

  double peak_scale() const { return peak_scale_; }    // argmax (beta/(mu+1))^(1/gamma)
  double peak_value() const { return peak_value_; }    // zeta at (0, peak_scale), real > 0
  double theta() const { return theta_; }              // dimensionless peak factor

 private:
  double beta_, mu_, gamma_;
  double log_prefactor_;  // ln(a_beta a_mu / a_{beta+mu})
  double exponent_;       // (beta+mu+1)/gamma
  double peak_scale_, peak_value_, theta_;
  std::shared_ptr<TimeWavelet> psi_;  // order beta+mu
};

std::complex<double> zeta(const WaveletSpec& w, const ElementSpec& e,
                          double tau, double scale);

struct ZetaPeak {
  double scale = 0.0;  // location of the maximum along the scale axis
  double value = 0.0;  // zeta there (real, > 0); amplitude inversion uses c = 2 w / value
  double theta = 0.0;  // (beta/(mu+1))^(beta/gamma) / (beta/(mu+1) + 1)^((beta+mu+1)/gamma)
};
ZetaPeak zeta_max(const WaveletSpec& w, const ElementSpec& e);

// Spectral weight f linking power-law noise S(w) = A^2 w^(-2 alpha) to the
// transform variance A^2 f s^(2 alpha - 1).  Requires beta > alpha - 1/2.
double f_noise(double alpha, const WaveletSpec& w);

}  // namespace elan::morse
