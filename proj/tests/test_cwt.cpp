#include "elan/cwt.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "elan/morse.hpp"
#include "elan/synth.hpp"

using namespace elan;

namespace {

constexpr double kPi = 3.14159265358979323846;

double plane_peak(const cwt::TransformPlane& p) {
  double peak = 0.0;
  for (const auto& v : p.values) peak = std::max(peak, std::abs(v));
  return peak;
}

}  // namespace

TEST_CASE("grid: reference configurations") {
  // Dense analysis grid: 12000 samples, (2,2), defaults.
  morse::WaveletSpec w22(2, 2);
  cwt::FrequencyGrid g = cwt::build_grid(w22, 12000);
  CHECK(g.size() == 59);
  CHECK(g.ratio == doctest::Approx(1.125).epsilon(1e-15));  // 1 + 1/(4*2)
  CHECK(g.omega_high == doctest::Approx(1.3108342).epsilon(1e-6));
  // Defining property of the top band: window leakage at Nyquist is 2*eta.
  CHECK(morse::freq_wavelet(w22, kPi / g.omega_high * w22.peak_omega) ==
        doctest::Approx(2.0 * 0.05).epsilon(1e-9));
  CHECK(g.omega_low == doctest::Approx(3.0 * 2.0 * std::sqrt(2.0) * 2.0 / 12000.0)
                           .epsilon(1e-12));
  CHECK(g.omega[0] == g.omega_high);
  CHECK(g.omega.back() >= g.omega_low * (1.0 - 1e-12));
  CHECK(g.omega.back() / g.ratio < g.omega_low);

  // Short-track configuration: (1,2), eta 0.1, coarser and fewer bands.
  morse::WaveletSpec w12(1, 2);
  cwt::GridParams track{0.1, 8.0, 2.0};
  cwt::FrequencyGrid gt = cwt::build_grid(w12, 168, track);
  CHECK(gt.size() == 38);
  CHECK(gt.ratio == doctest::Approx(1.0 + 1.0 / (8.0 * std::sqrt(2.0))).epsilon(1e-15));
  CHECK(gt.omega_high == doctest::Approx(1.1367109).epsilon(1e-6));
  CHECK(morse::freq_wavelet(w12, kPi / gt.omega_high * w12.peak_omega) ==
        doctest::Approx(2.0 * 0.1).epsilon(1e-9));
  CHECK(gt.omega_low == doctest::Approx(8.0 / 168.0).epsilon(1e-12));
}

TEST_CASE("grid: validation errors") {
  morse::WaveletSpec w(2, 2);
  CHECK_THROWS_AS(cwt::build_grid(w, 8), std::invalid_argument);
  CHECK_THROWS_AS(cwt::build_grid(w, 12000, {0.0, 4.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(cwt::build_grid(w, 12000, {1.0, 4.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(cwt::build_grid(w, 12000, {0.05, 0.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(cwt::build_grid(w, 12000, {0.05, 4.0, 0.0}), std::invalid_argument);
  // So much packing that no band fits below the leakage-limited top frequency.
  CHECK_THROWS_AS(cwt::build_grid(w, 16, {0.05, 4.0, 100.0}), std::invalid_argument);
  // Zero-duration window has no defined footprint.
  CHECK_THROWS_AS(cwt::build_grid(morse::WaveletSpec(0, 2), 12000), std::invalid_argument);
}

TEST_CASE("transform: sinusoid peaks at its amplitude, zero input stays zero") {
  morse::WaveletSpec w(2, 2);
  const std::size_t m = 2000;
  cwt::FrequencyGrid grid = cwt::build_grid(w, m);

  // Put the tone exactly on a grid band so the scale discretization does not
  // bias the peak reading.
  double omega0 = grid.omega[20];
  double c = 1.7;
  std::vector<double> x(m);
  for (std::size_t t = 0; t < m; ++t) x[t] = c * std::cos(omega0 * t);

  // Read the amplitude away from the ends: the mirror extension leaves a
  // small (edge-masked plus a percent-level skirt) imprint near them.
  cwt::TransformPlane plane = cwt::transform(x, w, grid);
  double peak = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j)
    for (std::size_t t = m / 4; t < 3 * m / 4; ++t)
      peak = std::max(peak, std::abs(plane.at(t, j)));
  CHECK(peak == doctest::Approx(c).epsilon(0.01));

  // The peak band is the tone band, and its modulus is flat over time there.
  std::size_t best_j = 0;
  double best = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double v = std::abs(plane.at(m / 2, j));
    if (v > best) {
      best = v;
      best_j = j;
    }
  }
  CHECK(best_j == 20);
  double lo = 1e300, hi = 0.0;
  for (std::size_t t = m / 4; t < 3 * m / 4; ++t) {
    double v = std::abs(plane.at(t, best_j));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo <= 0.01 * c);

  cwt::TransformPlane zero = cwt::transform(std::vector<double>(m, 0.0), w, grid);
  CHECK(plane_peak(zero) == 0.0);
}

TEST_CASE("transform: single rescaled element matches the analytic response") {
  // x(t) = Re psi_{0,2}((t - t0)/rho) transforms to (1/2) zeta("(2,0,2)")
  // evaluated at ((t-t0)/rho, s/rho): the closed form the detector inverts.
  morse::WaveletSpec w(2, 2);
  morse::ElementSpec e(0, 2);
  const std::size_t m = 4096;
  const double t0 = 2048.0;
  const double rho = e.peak_omega * 100.0 / (2.0 * kPi);  // period-100 element

  morse::TimeWavelet psi(0, 2);
  std::vector<double> x(m);
  for (std::size_t t = 0; t < m; ++t)
    x[t] = psi((static_cast<double>(t) - t0) / rho).real();

  cwt::FrequencyGrid grid = cwt::build_grid(w, m);
  cwt::TransformPlane plane = cwt::transform(x, w, grid);

  morse::Zeta zeta(w, e);
  double zeta_peak = 0.5 * zeta.peak_value();
  double worst = 0.0;
  std::size_t compared = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double s = plane.scales[j] / rho;
    for (std::size_t t = 0; t < m; t += 7) {
      if (plane.is_edge(t, j)) continue;
      std::complex<double> want =
          0.5 * zeta((static_cast<double>(t) - t0) / rho, s);
      worst = std::max(worst, std::abs(plane.at(t, j) - want));
      ++compared;
    }
  }
  CHECK(compared > 10000);
  CHECK(worst / zeta_peak <= 1e-3);
}

TEST_CASE("transform: gaps are filled by linear interpolation before analysis") {
  morse::WaveletSpec w(2, 2);
  const std::size_t m = 600;
  cwt::FrequencyGrid grid = cwt::build_grid(w, m);

  std::vector<double> x(m);
  for (std::size_t t = 0; t < m; ++t)
    x[t] = std::sin(0.2 * t) + 0.3 * std::cos(0.41 * t);

  // Punch a hole and also cut the leading edge.
  std::vector<std::uint8_t> missing(m, 0);
  std::vector<double> filled = x;
  for (std::size_t t = 300; t < 320; ++t) missing[t] = 1;
  for (std::size_t t = 0; t < 4; ++t) missing[t] = 1;
  double lo = x[299], hi = x[320];
  for (std::size_t t = 300; t < 320; ++t)
    filled[t] = lo + (hi - lo) * (static_cast<double>(t) - 299.0) / 21.0;
  for (std::size_t t = 0; t < 4; ++t) filled[t] = x[4];
  std::vector<double> gapped = x;
  for (std::size_t t = 0; t < m; ++t)
    if (missing[t]) gapped[t] = 1e99;  // masked values must never be read

  cwt::TransformPlane a = cwt::transform(gapped, missing, w, grid);
  cwt::TransformPlane b = cwt::transform(filled, w, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  CHECK(worst <= 1e-12 * plane_peak(b));
  CHECK(a.missing == missing);

  CHECK_THROWS_WITH_AS(
      cwt::transform(std::vector<double>(m, 1.0), std::vector<std::uint8_t>(m, 1), w, grid),
      "series has no valid samples", std::invalid_argument);
}

TEST_CASE("transform: input validation") {
  morse::WaveletSpec w(2, 2);
  cwt::FrequencyGrid grid = cwt::build_grid(w, 600);
  std::vector<double> x(600, 0.0);

  CHECK_THROWS_AS(cwt::transform(x, std::vector<std::uint8_t>(10, 0), w, grid),
                  std::invalid_argument);
  x[17] = std::nan("");
  CHECK_THROWS_WITH_AS(cwt::transform(x, w, grid),
                       "non-finite sample at index 17", std::invalid_argument);
  // A flagged-missing non-finite sample is fine: it is never read.
  std::vector<std::uint8_t> missing(600, 0);
  missing[17] = 1;
  CHECK_NOTHROW(cwt::transform(x, missing, w, grid));
}

TEST_CASE("scaling self-test: exact at stretch 1, tight at stretch 2") {
  // Smooth two-component signal: resampling error stays negligible.
  morse::ElementSpec e(1, 2);
  synth::EventTrain train;
  train.element = e;
  train.length = 1500;
  train.events.push_back({700.0, 18.0, e.peak_omega / 18.0, {4.0, 1.5}});
  train.events.push_back({950.0, 40.0, e.peak_omega / 40.0, {-2.0, 2.0}});
  std::vector<double> x = synth::render(train);

  morse::WaveletSpec w(2, 2);
  cwt::ScalingReport same = cwt::scaling_check(x, 1, w);
  CHECK(same.points_compared > 500);
  CHECK(same.max_rel_deviation <= 1e-12);

  cwt::ScalingReport doubled = cwt::scaling_check(x, 2, w);
  CHECK(doubled.points_compared > 500);
  CHECK(doubled.max_rel_deviation <= 0.02);
}

TEST_SUITE("properties") {
  TEST_CASE("prop: transform is linear") {
    morse::WaveletSpec w(2, 2);
    const std::size_t m = 512;
    cwt::FrequencyGrid grid = cwt::build_grid(w, m);
    std::vector<double> x = synth::white_noise(m, 1.0, 11);
    std::vector<double> y = synth::white_noise(m, 1.0, 12);
    std::vector<double> mix(m);
    for (std::size_t t = 0; t < m; ++t) mix[t] = 2.5 * x[t] - 0.75 * y[t];

    cwt::TransformPlane px = cwt::transform(x, w, grid);
    cwt::TransformPlane py = cwt::transform(y, w, grid);
    cwt::TransformPlane pm = cwt::transform(mix, w, grid);
    double scale = plane_peak(pm), worst = 0.0;
    for (std::size_t i = 0; i < pm.values.size(); ++i)
      worst = std::max(worst, std::abs(pm.values[i] - (2.5 * px.values[i] -
                                                       0.75 * py.values[i])));
    CHECK(worst <= 1e-11 * scale);
  }

  TEST_CASE("prop: transform of a tone is analytic (phase advances at the tone rate)") {
    morse::WaveletSpec w(2, 2);
    const std::size_t m = 1024;
    cwt::FrequencyGrid grid = cwt::build_grid(w, m);
    std::size_t jt = 15;
    double omega0 = grid.omega[jt];
    std::vector<double> x(m);
    for (std::size_t t = 0; t < m; ++t) x[t] = std::cos(omega0 * t + 0.4);

    cwt::TransformPlane plane = cwt::transform(x, w, grid);
    for (std::size_t t = m / 4; t < 3 * m / 4; t += 13) {
      std::complex<double> step = plane.at(t + 1, jt) / plane.at(t, jt);
      CHECK(std::arg(step) == doctest::Approx(omega0).epsilon(1e-5));
      // Phase itself tracks omega0 * t + phase offset.
      double expect = std::remainder(omega0 * t + 0.4, 2.0 * kPi);
      CHECK(std::remainder(std::arg(plane.at(t, jt)) - expect, 2.0 * kPi) ==
            doctest::Approx(0.0).epsilon(2e-3));
    }
  }

  TEST_CASE("prop: grid geometry is exactly geometric and respects its bounds") {
    for (auto [beta, gamma] : std::vector<std::pair<double, double>>{
             {2.0, 2.0}, {1.0, 2.0}, {3.0, 1.5}}) {
      morse::WaveletSpec w(beta, gamma);
      for (std::size_t m : {300u, 2048u, 12000u}) {
        cwt::FrequencyGrid g = cwt::build_grid(w, m);
        REQUIRE(g.size() >= 2);
        for (std::size_t j = 0; j + 1 < g.size(); ++j)
          CHECK(g.omega[j] / g.omega[j + 1] ==
                doctest::Approx(g.ratio).epsilon(1e-13));
        CHECK(std::is_sorted(g.omega.rbegin(), g.omega.rend()));
        CHECK(g.omega.back() >= g.omega_low * (1.0 - 1e-12));
        CHECK(g.omega[0] <= kPi);
        CHECK(g.series_len == m);
      }
    }
  }

  TEST_CASE("prop: edge mask equals half a footprint at every scale") {
    morse::WaveletSpec w(2, 2);
    const std::size_t m = 700;
    cwt::FrequencyGrid grid = cwt::build_grid(w, m);
    cwt::TransformPlane plane =
        cwt::transform(std::vector<double>(m, 0.0), w, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      std::size_t hw = static_cast<std::size_t>(
          std::floor(0.5 * morse::footprint(w, plane.scales[j])));
      CHECK(plane.edge_halfwidth[j] == hw);
      if (hw == 0 || hw >= m) continue;
      CHECK(plane.is_edge(0, j));
      CHECK(plane.is_edge(hw - 1, j));
      CHECK(!plane.is_edge(hw, j));
      CHECK(!plane.is_edge(m - hw - 1, j));
      CHECK(plane.is_edge(m - hw, j));
    }
  }

  TEST_CASE("prop: transform scaling invariance") {
    // Stretching the input by an integer factor shifts the transform down in
    // frequency by the same factor without changing its values.
    morse::ElementSpec e(1, 2);
    synth::EventTrain train;
    train.element = e;
    train.length = 1200;
    train.events.push_back({550.0, 16.0, e.peak_omega / 16.0, {3.0, -1.0}});
    train.events.push_back({820.0, 33.0, e.peak_omega / 33.0, {1.5, 2.5}});
    std::vector<double> x = synth::render(train);

    morse::WaveletSpec w(2, 2);
    cwt::ScalingReport same = cwt::scaling_check(x, 1, w);
    CHECK(same.points_compared > 300);
    CHECK(same.max_rel_deviation <= 1e-12);

    cwt::ScalingReport doubled = cwt::scaling_check(x, 2, w);
    CHECK(doubled.points_compared > 300);
    CHECK(doubled.max_rel_deviation <= 0.02);
  }
}
