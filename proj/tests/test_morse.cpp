#include "elan/morse.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "doctest.h"

using namespace elan::morse;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Composite-Simpson reference for spectral integrals (1/2pi) int_0^hi g(w) dw.
// Substituting w = u^4 smooths fractional powers of w at the origin and makes
// the left endpoint weightless, so two resolutions agreeing is a real check.
double simpson_spectral(const std::function<double(double)>& g, double hi) {
  double u_hi = std::pow(hi, 0.25);
  auto h_of = [&](double u) {
    double w = u * u * u * u;
    return w == 0.0 ? 0.0 : g(w) * 4.0 * u * u * u;
  };
  auto once = [&](std::size_t n) {
    double h = u_hi / n, acc = h_of(0.0) + h_of(u_hi);
    for (std::size_t k = 1; k < n; ++k) acc += h_of(k * h) * (k % 2 ? 4.0 : 2.0);
    return acc * h / 3.0 / (2.0 * kPi);
  };
  double coarse = once(1 << 16), fine = once(1 << 17);
  REQUIRE(std::abs(fine - coarse) <= 1e-9 * (std::abs(fine) + 1e-30));
  return fine;
}

// Same reference machinery for the complex inversion integral at one t.
std::complex<double> simpson_waveform(const WaveletSpec& w, double t, double hi) {
  auto once = [&](std::size_t n) {
    double h = hi / n;
    std::complex<double> acc = freq_wavelet(w, hi) * std::polar(1.0, hi * t);
    // w = 0 endpoint contributes 0 for beta > 0 tested here
    for (std::size_t k = 1; k < n; ++k) {
      double om = k * h;
      acc += freq_wavelet(w, om) * std::polar(1.0, om * t) * (k % 2 ? 4.0 : 2.0);
    }
    return acc * (h / 3.0 / (2.0 * kPi));
  };
  std::complex<double> coarse = once(1 << 18), fine = once(1 << 19);
  REQUIRE(std::abs(fine - coarse) <= 1e-10);
  return fine;
}

double spectral_cutoff(double gamma) { return std::pow(42.0, 1.0 / gamma) + 4.0; }

}  // namespace

TEST_CASE("frequency window: pinned values") {
  WaveletSpec w22(2, 2);
  CHECK(freq_wavelet(w22, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(freq_wavelet(w22, 0.0) == 0.0);
  CHECK(freq_wavelet(w22, -0.3) == 0.0);

  WaveletSpec w02(0, 2);
  CHECK(freq_wavelet(w02, 0.0) == doctest::Approx(1.0));  // half the limiting value
  double half_power = std::sqrt(std::log(2.0));
  CHECK(w02.peak_omega == doctest::Approx(half_power));
  CHECK(freq_wavelet(w02, half_power) == doctest::Approx(1.0).epsilon(1e-12));

  // a_{1,2} = 2 sqrt(2e)
  WaveletSpec w12(1, 2);
  CHECK(w12.amplitude == doctest::Approx(2.0 * std::sqrt(2.0 * std::exp(1.0))).epsilon(1e-13));
}

TEST_SUITE("properties") {
  TEST_CASE("prop: frequency window peaks at peak_omega with value 2") {
    for (double beta : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      for (double gamma : {1.0, 2.0, 3.0, 4.0}) {
        WaveletSpec w(beta, gamma);
        CHECK(freq_wavelet(w, w.peak_omega) == doctest::Approx(2.0).epsilon(1e-12));
        for (double f : {0.8, 0.9, 1.1, 1.25}) {
          CHECK(freq_wavelet(w, f * w.peak_omega) < 2.0);
        }
      }
    }
  }

  TEST_CASE("prop: time waveform is Hermitian in t") {
    TimeWavelet psi(2.4, 1.7);
    for (double t : {0.0, 0.3, 1.9, 7.5, 40.0}) {
      auto a = psi(t), b = psi(-t);
      CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-14));
      CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-14));
    }
  }

  TEST_CASE("prop: raising beta by one differentiates the waveform") {
    // psi_{beta+1}(t) = -i (a_{beta+1}/a_beta) d/dt psi_beta(t)
    for (auto [beta, gamma] : std::vector<std::pair<double, double>>{
             {1.0, 2.0}, {2.0, 2.0}, {1.5, 3.0}}) {
      WaveletSpec lo(beta, gamma), hi(beta + 1.0, gamma);
      TimeWavelet psi_lo(beta, gamma), psi_hi(beta + 1.0, gamma);
      double ratio = hi.amplitude / lo.amplitude;
      double h = 1e-4;
      for (double t : {0.0, 0.6, 2.2}) {
        std::complex<double> deriv = (psi_lo(t + h) - psi_lo(t - h)) / (2.0 * h);
        std::complex<double> expect = std::complex<double>(0, -1) * ratio * deriv;
        std::complex<double> got = psi_hi(t);
        CHECK(std::abs(got - expect) <= 1e-6 * (std::abs(got) + 1.0));
      }
    }
  }

  TEST_CASE("prop: footprint captures most of the waveform energy") {
    // The duration formula models the envelope as a Gaussian (~95% of energy
    // inside).  The approximation is tight for well-localized orders and
    // degrades gracefully toward small beta*gamma.
    for (double beta : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      for (double gamma : {1.0, 2.0, 3.0, 4.0}) {
        WaveletSpec w(beta, gamma);
        TimeWavelet psi(beta, gamma);
        double total = f_noise(0.0, w);  // Parseval: int |psi|^2 dt
        double half = footprint(w, 1.0) / 2.0;
        // |psi(-t)| == |psi(t)|, so integrate one side and double.
        std::size_t n = 4096;
        double h = half / n, acc = std::norm(psi(0.0)) + std::norm(psi(half));
        for (std::size_t k = 1; k < n; ++k)
          acc += std::norm(psi(k * h)) * (k % 2 ? 4.0 : 2.0);
        double captured = 2.0 * acc * h / 3.0 / total;
        CHECK(captured > 0.86);
        CHECK(captured < 0.97);
        if (beta >= 2.0) {
          CHECK(captured > 0.92);
          CHECK(captured < 0.96);
        }
      }
    }
  }

  TEST_CASE("prop: zeta is Hermitian in tau and peaks on the scale axis") {
    Zeta z(WaveletSpec(2, 2), ElementSpec(1, 2));
    for (double tau : {0.4, 2.0, 9.0}) {
      auto a = z(tau, 0.8), b = z(-tau, 0.8);
      CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-13));
      CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-13));
    }
    double peak = z(0.0, z.peak_scale()).real();
    CHECK(peak == doctest::Approx(z.peak_value()).epsilon(1e-10));
    for (double s : {0.3, 0.7, 1.5, 3.0}) {
      CHECK(std::abs(z(0.0, s)) < peak);
      CHECK(std::abs(z(3.0, s)) < std::abs(z(0.0, s)));
    }
  }
}

TEST_CASE("time waveform: zeroth moment identity and quadrature cross-check") {
  for (auto [beta, gamma] : std::vector<std::pair<double, double>>{
           {2.0, 2.0}, {1.0, 2.0}, {0.5, 3.0}, {0.0, 2.0}, {3.0, 1.0}}) {
    WaveletSpec w(beta, gamma);
    double at0 = time_wavelet(w, 0.0).real();
    CHECK(at0 == doctest::Approx(moment(0, w)).epsilon(1e-8));
    CHECK(time_wavelet(w, 0.0).imag() == doctest::Approx(0.0).epsilon(1e-12));
  }

  // Independent dense-Simpson inversion at awkward arguments.
  WaveletSpec w(2, 2);
  TimeWavelet psi(2, 2);
  for (double t : {0.7, 3.2, 11.4}) {
    auto want = simpson_waveform(w, t, spectral_cutoff(2.0));
    auto got = psi(t);
    CHECK(std::abs(got - want) <= 1e-9);
  }
  WaveletSpec w12(1, 2);
  TimeWavelet psi12(1, 2);
  auto want = simpson_waveform(w12, 2.5, spectral_cutoff(2.0));
  CHECK(std::abs(psi12(2.5) - want) <= 1e-9);

  // Peak-normalized value quoted throughout: psi_{1,2}(0) = a/(4 pi)
  CHECK(psi12(0.0).real() == doctest::Approx(0.37109267).epsilon(1e-6));
}

TEST_CASE("moments: closed form vs spectral quadrature") {
  WaveletSpec w01(0, 1);
  CHECK(moment(0, w01) == doctest::Approx(1.0 / kPi).epsilon(1e-12));

  WaveletSpec w22(2, 2);
  CHECK(moment(1, w22) ==
        doctest::Approx(2.0 * std::exp(1.0) / (4.0 * kPi)).epsilon(1e-12));

  for (auto [beta, gamma] : std::vector<std::pair<double, double>>{
           {1.5, 2.5}, {2.0, 2.0}, {0.5, 1.0}}) {
    WaveletSpec w(beta, gamma);
    for (int n : {0, 1, 2}) {
      double oracle = simpson_spectral(
          [&](double om) { return std::pow(om, n) * freq_wavelet(w, om); },
          spectral_cutoff(gamma));
      CHECK(moment(n, w) == doctest::Approx(oracle).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(moment(-4, WaveletSpec(2, 2)), std::invalid_argument);
}

TEST_CASE("cumulants: pinned values, moment identities, local Gaussian shape") {
  WaveletSpec w(2, 2);
  auto k = cumulants(w);
  CHECK(k.k1 == doctest::Approx(2.0 / std::sqrt(kPi)).epsilon(1e-12));
  CHECK(k.k2 == doctest::Approx(1.5 - 4.0 / kPi).epsilon(1e-12));

  for (auto [beta, gamma] : std::vector<std::pair<double, double>>{
           {1.0, 2.0}, {3.0, 2.5}, {0.5, 4.0}}) {
    WaveletSpec s(beta, gamma);
    auto c = cumulants(s);
    double m0 = moment(0, s), m1 = moment(1, s), m2 = moment(2, s);
    CHECK(c.k1 == doctest::Approx(m1 / m0).epsilon(1e-12));
    CHECK(c.k2 == doctest::Approx(m2 / m0 - (m1 / m0) * (m1 / m0)).epsilon(1e-11));
  }

  // Near t = 0 the waveform behaves as psi(0) exp(i K1 t - K2 t^2/2):
  // modulus decay and phase slope both follow the cumulants.
  TimeWavelet psi(2, 2);
  double t = std::sqrt(0.2 / k.k2);
  double want_mod = moment(0, w) * std::exp(-0.5 * k.k2 * t * t);
  CHECK(std::abs(psi(t)) == doctest::Approx(want_mod).epsilon(0.02));
  double small = 0.05;
  CHECK(std::arg(psi(small)) == doctest::Approx(k.k1 * small).epsilon(0.01));
}

TEST_CASE("footprint: pinned value and scaling") {
  WaveletSpec w(2, 2);
  CHECK(footprint(w, 1.0) == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-13));
  CHECK(footprint(w, 7.5) == doctest::Approx(7.5 * footprint(w, 1.0)).epsilon(1e-13));
  CHECK_THROWS_AS(footprint(WaveletSpec(0, 2), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(footprint(w, 0.0), std::invalid_argument);
}

TEST_CASE("zeta: peak location, peak value, dense-grid argmax") {
  WaveletSpec w(2, 2);
  ElementSpec impulse(0, 2), ramp(1, 2);

  auto pk0 = zeta_max(w, impulse);
  CHECK(pk0.scale == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK(pk0.theta == doctest::Approx(2.0 / std::pow(3.0, 1.5)).epsilon(1e-13));
  CHECK(pk0.value == doctest::Approx(0.29514652).epsilon(1e-6));

  auto pk1 = zeta_max(w, ramp);
  CHECK(pk1.scale == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(pk1.theta == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(pk1.value == doctest::Approx(0.5043672).epsilon(1e-6));

  // Brute-force scan of the ridge zeta(0, s) against the closed-form peak.
  Zeta z(w, impulse);
  double best = 0.0, best_s = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    double s = 0.2 * std::pow(25.0 / 0.2, i / 4000.0);
    double v = z(0.0, s).real();
    if (v > best) {
      best = v;
      best_s = s;
    }
  }
  CHECK(best == doctest::Approx(pk0.value).epsilon(1e-6));
  CHECK(best_s == doctest::Approx(pk0.scale).epsilon(2e-3));

  CHECK_THROWS_AS(zeta(w, ElementSpec(1, 3), 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(z(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("f_noise: closed form vs quadrature oracle") {
  WaveletSpec w(2, 2);
  CHECK(f_noise(0.0, w) == doctest::Approx(0.55271379).epsilon(1e-6));
  CHECK(f_noise(1.0, w) == doctest::Approx(0.73695172).epsilon(1e-6));

  for (double alpha : {0.0, 0.5, 1.0}) {
    for (auto [beta, gamma] :
         std::vector<std::pair<double, double>>{{2.0, 2.0}, {1.0, 2.0}, {3.0, 3.0}}) {
      WaveletSpec s(beta, gamma);
      double oracle = simpson_spectral(
          [&](double om) {
            double v = freq_wavelet(s, om);
            return om == 0.0 ? 0.0 : v * v * std::pow(om, -2.0 * alpha);
          },
          spectral_cutoff(gamma));
      CHECK(f_noise(alpha, s) == doctest::Approx(oracle).epsilon(1e-7));
    }
  }

  // beta > alpha - 1/2 required, otherwise the variance integral diverges.
  CHECK_THROWS_AS(f_noise(1.0, WaveletSpec(0.25, 2)), std::invalid_argument);
}

TEST_CASE("order validation") {
  CHECK_THROWS_AS(WaveletSpec(-1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(WaveletSpec(2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ElementSpec(-0.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(Zeta(WaveletSpec(0, 2), ElementSpec(0, 2)), std::invalid_argument);
}
