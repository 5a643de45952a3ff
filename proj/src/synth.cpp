#include "elan/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "elan/rng.hpp"

namespace elan::synth {

std::vector<double> render(const EventTrain& train) {
  morse::TimeWavelet psi(train.element.mu, train.element.gamma);
  std::vector<double> x(train.length, 0.0);
  for (const Event& ev : train.events) {
    for (std::size_t t = 0; t < train.length; ++t) {
      double u = (static_cast<double>(t) - ev.t) / ev.rho;
      x[t] += (ev.c * psi(u)).real();
    }
  }
  return x;
}

Synthetic benchmark_signal() {
  constexpr std::size_t kLength = 12000;
  constexpr int kEvents = 6;
  constexpr double kTwoPi = 6.283185307179586476925286766559;

  Synthetic out;
  out.truth.element = morse::ElementSpec(1.0, 2.0);
  out.truth.length = kLength;

  double abs_c =
      2.0 / morse::moment(0, morse::WaveletSpec(out.truth.element.mu,
                                                out.truth.element.gamma));
  for (int n = 0; n < kEvents; ++n) {
    Event ev;
    ev.t = 1000.0 + 2000.0 * n;
    ev.omega_rho = kTwoPi / 100.0 * std::pow(10.0, -0.2 * n);
    ev.rho = out.truth.element.peak_omega / ev.omega_rho;
    ev.c = std::polar(abs_c, n * 3.14159265358979323846 / 10.0);
    out.truth.events.push_back(ev);
  }
  out.clean = render(out.truth);
  return out;
}

std::vector<double> white_noise(std::size_t length, double sigma,
                                std::uint64_t seed) {
  if (!(sigma >= 0.0))
    throw std::invalid_argument("noise level must be >= 0");
  GaussianRng rng(seed);
  std::vector<double> x(length);
  for (auto& v : x) v = sigma * rng.normal();
  return x;
}

std::vector<double> red_noise(std::size_t length, std::uint64_t seed) {
  if (length < 2)
    throw std::invalid_argument("red noise needs at least 2 samples");
  GaussianRng rng(seed);
  std::vector<double> x(length);
  double acc = 0.0;
  for (auto& v : x) {
    acc += rng.normal();
    v = acc;
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(length);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(length);
  double inv_std = 1.0 / std::sqrt(var);
  for (auto& v : x) v = (v - mean) * inv_std;
  return x;
}

}  // namespace elan::synth
