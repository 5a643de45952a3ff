#include "elan/morse.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace elan::morse {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676656;

double log_amplitude_for(double beta, double gamma) {
  if (beta == 0.0) return std::log(2.0);
  // ln 2 + (beta/gamma)(1 + ln gamma - ln beta)
  return std::log(2.0) + beta / gamma * (1.0 + std::log(gamma) - std::log(beta));
}

double peak_omega_for(double beta, double gamma) {
  if (beta == 0.0) return std::pow(std::log(2.0), 1.0 / gamma);  // half-power point
  return std::pow(beta / gamma, 1.0 / gamma);
}

void check_orders(double beta, double gamma, const char* kind) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument(std::string(kind) + ": gamma must be positive");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw std::invalid_argument(std::string(kind) + ": order must be >= 0");
}

// Window value with the continuous limit at w = 0 (the convention of half
// weight at exactly w = 0 is a measure-zero statement about the inversion
// integral; quadrature panels need the limit instead).
double window_limit(double log_a, double beta, double gamma, double omega) {
  if (omega <= 0.0) return beta == 0.0 ? std::exp(log_a) : 0.0;
  return std::exp(log_a + beta * std::log(omega) - std::pow(omega, gamma));
}

// Smallest frequency at or beyond the window mode where the window has
// dropped to `level` times its peak value of 2.
double decay_point(double log_a, double beta, double gamma, double level) {
  double lo = peak_omega_for(beta, gamma);
  double target = 2.0 * level;
  double hi = lo + 1.0;
  while (window_limit(log_a, beta, gamma, hi) > target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (window_limit(log_a, beta, gamma, mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

// Exact moments of e^{i theta x} against 1, x, x^2 on [-1, 1]; the series
// branch avoids catastrophic cancellation for small theta.
struct Moments {
  double i0, i2;  // real parts (i1 is purely imaginary)
  double i1_im;
};

Moments exp_moments(double theta) {
  Moments m;
  double t2 = theta * theta;
  if (std::abs(theta) < 0.08) {
    double t4 = t2 * t2, t6 = t4 * t2;
    m.i0 = 2.0 * (1.0 - t2 / 6.0 + t4 / 120.0 - t6 / 5040.0);
    m.i1_im = 2.0 * theta * (1.0 / 3.0 - t2 / 30.0 + t4 / 840.0 - t6 / 45360.0);
    m.i2 = 2.0 * (1.0 / 3.0 - t2 / 10.0 + t4 / 168.0 - t6 / 6480.0);
  } else {
    double s = std::sin(theta), c = std::cos(theta);
    m.i0 = 2.0 * s / theta;
    m.i1_im = 2.0 * (s / t2 - c / theta);
    m.i2 = 2.0 * ((t2 - 2.0) * s + 2.0 * theta * c) / (t2 * theta);
  }
  return m;
}

}  // namespace

WaveletSpec::WaveletSpec(double b, double g) {
  check_orders(b, g, "wavelet");
  beta = b;
  gamma = g;
  log_amplitude = log_amplitude_for(b, g);
  amplitude = std::exp(log_amplitude);
  peak_omega = peak_omega_for(b, g);
  duration = std::sqrt(b * g);
}

ElementSpec::ElementSpec(double m, double g) {
  check_orders(m, g, "element");
  mu = m;
  gamma = g;
  log_amplitude = log_amplitude_for(m, g);
  amplitude = std::exp(log_amplitude);
  peak_omega = peak_omega_for(m, g);
}

double freq_wavelet(const WaveletSpec& w, double omega) {
  if (omega < 0.0) return 0.0;
  if (omega == 0.0) return w.beta == 0.0 ? 0.5 * w.amplitude : 0.0;
  return std::exp(w.log_amplitude + w.beta * std::log(omega) -
                  std::pow(omega, w.gamma));
}

std::vector<double> freq_wavelet(const WaveletSpec& w,
                                 const std::vector<double>& omega) {
  std::vector<double> out(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) out[i] = freq_wavelet(w, omega[i]);
  return out;
}

// One quadrature panel: nodes at lo, lo+h, lo+2h with window values f0,f1,f2.
struct TimeWavelet::Panels {
  struct Seg {
    double lo, h;
    double f0, f1, f2;
  };
  std::vector<Seg> irregular;  // graded head + far tail
  // Uniform middle zone: node values at core_lo + k*core_h, k = 0..2*n_core.
  double core_lo = 0.0, core_h = 0.0;
  std::vector<double> core_f;
  double norm = 0.0;  // 1/(2 pi)
};

namespace {

void build_panels(TimeWavelet::Panels& p, double log_a, double beta, double gamma,
                  int level) {
  p.irregular.clear();
  p.core_f.clear();
  p.norm = 1.0 / kTwoPi;

  int n_head = std::min(4096, 64 << level);
  int n_core = 512 << level;
  double dv_max = 0.2 / (1 << level);

  auto f = [&](double w) { return window_limit(log_a, beta, gamma, w); };

  double omega_max = decay_point(log_a, beta, gamma, 1e-16);
  double w_mid = decay_point(log_a, beta, gamma, 1e-4);
  double w_head = std::min({1.0, 0.25 * omega_max, 0.5 * w_mid});

  // Head [0, w_head]: cubically graded panels tame the w^beta kink at zero
  // for fractional orders.
  for (int i = 0; i < n_head; ++i) {
    double a = w_head * std::pow(double(i) / n_head, 3.0);
    double b = w_head * std::pow(double(i + 1) / n_head, 3.0);
    double h = 0.5 * (b - a);
    p.irregular.push_back({a, h, f(a), f(a + h), f(b)});
  }

  // Core [w_head, w_mid]: uniform panels; evaluation shares the oscillatory
  // moments across the whole zone.
  double core_hi = (w_mid < omega_max / 1.5) ? w_mid : omega_max;
  p.core_lo = w_head;
  p.core_h = (core_hi - w_head) / (2.0 * n_core);
  p.core_f.resize(2 * n_core + 1);
  for (int k = 0; k <= 2 * n_core; ++k) p.core_f[k] = f(w_head + k * p.core_h);

  // Tail [w_mid, omega_max]: uniform in v = w^gamma, so the log of the window
  // moves by a fixed small amount per panel all the way down to 1e-16.
  if (core_hi < omega_max) {
    double v0 = std::pow(core_hi, gamma), v1 = std::pow(omega_max, gamma);
    int n_tail = std::max(8, int((v1 - v0) / dv_max) + 1);
    double dv = (v1 - v0) / n_tail;
    for (int i = 0; i < n_tail; ++i) {
      double a = std::pow(v0 + i * dv, 1.0 / gamma);
      double b = std::pow(v0 + (i + 1) * dv, 1.0 / gamma);
      double h = 0.5 * (b - a);
      p.irregular.push_back({a, h, f(a), f(a + h), f(b)});
    }
  }
}

std::complex<double> eval_panels(const TimeWavelet::Panels& p, double t) {
  double acc_re = 0.0, acc_im = 0.0;

  for (const auto& seg : p.irregular) {
    Moments m = exp_moments(seg.h * t);
    double even = seg.f1 * m.i0 + 0.5 * (seg.f2 - 2.0 * seg.f1 + seg.f0) * m.i2;
    double odd = 0.5 * (seg.f2 - seg.f0) * m.i1_im;
    double mid = seg.lo + seg.h;
    double c = std::cos(mid * t), s = std::sin(mid * t);
    // (even + i*odd) * e^{i mid t}, scaled by h
    acc_re += seg.h * (even * c - odd * s);
    acc_im += seg.h * (even * s + odd * c);
  }

  std::size_t n_core = (p.core_f.size() - 1) / 2;
  double h = p.core_h;
  Moments m = exp_moments(h * t);
  double step_c = std::cos(2.0 * h * t), step_s = std::sin(2.0 * h * t);
  double c = 0.0, s = 0.0;
  for (std::size_t k = 0; k < n_core; ++k) {
    if (k % 64 == 0) {  // resync the phase recursion
      double mid = p.core_lo + (2.0 * k + 1.0) * h;
      c = std::cos(mid * t);
      s = std::sin(mid * t);
    }
    double f0 = p.core_f[2 * k], f1 = p.core_f[2 * k + 1], f2 = p.core_f[2 * k + 2];
    double even = f1 * m.i0 + 0.5 * (f2 - 2.0 * f1 + f0) * m.i2;
    double odd = 0.5 * (f2 - f0) * m.i1_im;
    acc_re += h * (even * c - odd * s);
    acc_im += h * (even * s + odd * c);
    double nc = c * step_c - s * step_s;
    s = c * step_s + s * step_c;
    c = nc;
  }

  return {p.norm * acc_re, p.norm * acc_im};
}

}  // namespace

TimeWavelet::TimeWavelet(double beta, double gamma)
    : beta_(beta), gamma_(gamma), panels_(std::make_unique<Panels>()) {
  check_orders(beta, gamma, "time_wavelet");
  double log_a = log_amplitude_for(beta, gamma);
  double exact0 =
      std::exp(log_a - std::log(kTwoPi * gamma) + std::lgamma((beta + 1.0) / gamma));

  for (int level = 0;; ++level) {
    build_panels(*panels_, log_a, beta, gamma, level);
    double got = eval_panels(*panels_, 0.0).real();
    if (std::abs(got - exact0) <= 1e-11 * exact0) return;
    if (level >= 7)
      throw std::runtime_error("time_wavelet: quadrature failed to converge for beta=" +
                               std::to_string(beta) + " gamma=" + std::to_string(gamma));
  }
}

TimeWavelet::~TimeWavelet() = default;
TimeWavelet::TimeWavelet(TimeWavelet&&) noexcept = default;
TimeWavelet& TimeWavelet::operator=(TimeWavelet&&) noexcept = default;

std::complex<double> TimeWavelet::operator()(double t) const {
  return eval_panels(*panels_, t);
}

std::complex<double> time_wavelet(const WaveletSpec& w, double t) {
  return TimeWavelet(w.beta, w.gamma)(t);
}

std::vector<std::complex<double>> time_wavelet(const WaveletSpec& w,
                                               const std::vector<double>& t) {
  TimeWavelet psi(w.beta, w.gamma);
  std::vector<std::complex<double>> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = psi(t[i]);
  return out;
}

double moment(int n, const WaveletSpec& w) {
  double arg = (w.beta + 1.0 + n) / w.gamma;
  if (arg <= 0.0)
    throw std::invalid_argument("moment: requires beta + 1 + n > 0");
  return std::exp(w.log_amplitude - std::log(kTwoPi * w.gamma) + std::lgamma(arg));
}

Cumulants cumulants(const WaveletSpec& w) {
  double l1 = std::lgamma((w.beta + 1.0) / w.gamma);
  double k1 = std::exp(std::lgamma((w.beta + 2.0) / w.gamma) - l1);
  double r2 = std::exp(std::lgamma((w.beta + 3.0) / w.gamma) - l1);
  return {k1, r2 - k1 * k1};
}

double footprint(const WaveletSpec& w, double scale) {
  if (w.beta <= 0.0)
    throw std::invalid_argument("footprint: undefined for beta = 0");
  if (!(scale > 0.0))
    throw std::invalid_argument("footprint: scale must be positive");
  return 2.0 * std::sqrt(2.0) * w.duration * scale / w.peak_omega;
}

namespace {

// ln(s^gamma + 1) without overflow on either side of s = 1.
double log_scale_gamma_p1(double s, double gamma) {
  double u = gamma * std::log(s);
  if (u > 0.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

}  // namespace

Zeta::Zeta(const WaveletSpec& w, const ElementSpec& e)
    : beta_(w.beta), mu_(e.mu), gamma_(w.gamma) {
  if (w.gamma != e.gamma)
    throw std::invalid_argument("zeta: wavelet and element gamma must match");
  if (!(w.beta > 0.0))
    throw std::invalid_argument("zeta: analyzing wavelet needs beta > 0");
  double log_a_sum = w.log_amplitude + e.log_amplitude;
  log_prefactor_ = log_a_sum - log_amplitude_for(beta_ + mu_, gamma_);
  exponent_ = (beta_ + mu_ + 1.0) / gamma_;

  double q = beta_ / (mu_ + 1.0);
  peak_scale_ = std::pow(q, 1.0 / gamma_);
  theta_ = std::exp(beta_ / gamma_ * std::log(q) - exponent_ * std::log1p(q));
  peak_value_ = std::exp(log_a_sum - std::log(kTwoPi * gamma_) +
                         std::lgamma((beta_ + mu_ + 1.0) / gamma_)) *
                theta_;

  psi_ = std::make_shared<TimeWavelet>(beta_ + mu_, gamma_);
}

std::complex<double> Zeta::operator()(double tau, double scale) const {
  if (!(scale > 0.0))
    throw std::invalid_argument("zeta: scale must be positive");
  double lsg = log_scale_gamma_p1(scale, gamma_);
  double pref =
      std::exp(log_prefactor_ + beta_ * std::log(scale) - exponent_ * lsg);
  double arg = tau * std::exp(-lsg / gamma_);
  return pref * (*psi_)(arg);
}

std::complex<double> zeta(const WaveletSpec& w, const ElementSpec& e,
                          double tau, double scale) {
  return Zeta(w, e)(tau, scale);
}

ZetaPeak zeta_max(const WaveletSpec& w, const ElementSpec& e) {
  Zeta z(w, e);
  return {z.peak_scale(), z.peak_value(), z.theta()};
}

double f_noise(double alpha, const WaveletSpec& w) {
  double q = (2.0 * w.beta - 2.0 * alpha + 1.0) / w.gamma;
  if (q <= 0.0)
    throw std::invalid_argument(
        "f_noise: requires beta > alpha - 1/2 (transform variance diverges)");
  return std::exp(2.0 * w.log_amplitude - std::log(kTwoPi * w.gamma) +
                  std::lgamma(q) - q * std::log(2.0));
}

}  // namespace elan::morse
