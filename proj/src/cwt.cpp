#include "elan/cwt.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <new>
#include <stdexcept>
#include <string>

#include "elan/parallel.hpp"

namespace elan::cwt {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// FFTW's planner is not thread-safe; plan creation/destruction is serialized.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  fftw_complex* p = nullptr;
  explicit FftwBuffer(std::size_t n)
      : p(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!p) throw std::bad_alloc();
  }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  ~FftwBuffer() { fftw_free(p); }
};

struct FftwPlan {
  fftw_plan plan = nullptr;
  FftwPlan(int n, fftw_complex* in, fftw_complex* out, int sign) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("fftw plan creation failed");
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  ~FftwPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
};

bool is_fast_size(std::size_t n) {
  for (std::size_t d : {2, 3, 5, 7})
    while (n % d == 0) n /= d;
  return n == 1;
}

std::size_t next_fast_size(std::size_t n) {
  while (!is_fast_size(n)) ++n;
  return n;
}

// Smallest x beyond the window peak where the window has dropped to
// 2 * level, found by bisection on the monotone decaying flank.
double decay_crossing(const morse::WaveletSpec& w, double level) {
  double target = 2.0 * level;
  double lo = w.peak_omega;
  double hi = lo * 2.0;
  while (morse::freq_wavelet(w, hi) > target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (morse::freq_wavelet(w, mid) > target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-12 * hi) break;
  }
  return 0.5 * (lo + hi);
}

// Fills flagged samples in place by linear interpolation between the nearest
// valid neighbors, holding the boundary value across leading/trailing gaps.
void fill_gaps(std::vector<double>& x, const std::vector<std::uint8_t>& mask) {
  const std::size_t n = x.size();
  std::size_t first = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) {
      first = i;
      break;
    }
  }
  if (first == n)
    throw std::invalid_argument("series has no valid samples");
  std::size_t last = n - 1;
  while (mask[last]) --last;

  for (std::size_t i = 0; i < first; ++i) x[i] = x[first];
  for (std::size_t i = last + 1; i < n; ++i) x[i] = x[last];

  std::size_t prev = first;
  for (std::size_t i = first + 1; i <= last; ++i) {
    if (mask[i]) continue;
    if (i > prev + 1) {
      double v0 = x[prev];
      double v1 = x[i];
      double span = static_cast<double>(i - prev);
      for (std::size_t k = prev + 1; k < i; ++k)
        x[k] = v0 + (v1 - v0) * static_cast<double>(k - prev) / span;
    }
    prev = i;
  }
}

}  // namespace

FrequencyGrid build_grid(const morse::WaveletSpec& w, std::size_t series_len,
                         const GridParams& params) {
  if (series_len < 16)
    throw std::invalid_argument("series too short for a frequency grid");
  if (!(params.eta > 0.0 && params.eta < 1.0))
    throw std::invalid_argument("grid eta must lie in (0, 1)");
  if (!(params.density > 0.0))
    throw std::invalid_argument("grid density must be positive");
  if (!(params.packing > 0.0))
    throw std::invalid_argument("grid packing must be positive");
  if (!(w.duration > 0.0))
    throw std::invalid_argument("frequency grid requires beta > 0");

  FrequencyGrid grid;
  grid.params = params;
  grid.series_len = series_len;
  double crossing = decay_crossing(w, params.eta);
  grid.omega_high = kTwoPi / 2.0 * w.peak_omega / crossing;
  grid.omega_low = params.packing * 2.0 * std::sqrt(2.0) * w.duration /
                   static_cast<double>(series_len);
  if (grid.omega_high < grid.omega_low)
    throw std::invalid_argument(
        "series too short: lowest admissible frequency exceeds the highest");
  grid.ratio = 1.0 + 1.0 / (params.density * w.duration);

  double omega = grid.omega_high;
  // Tolerance keeps a band whose frequency equals the floor up to rounding.
  while (omega >= grid.omega_low * (1.0 - 1e-12)) {
    grid.omega.push_back(omega);
    omega /= grid.ratio;
  }
  return grid;
}

TransformPlane transform(const std::vector<double>& x,
                         const std::vector<std::uint8_t>& missing,
                         const morse::WaveletSpec& w, const FrequencyGrid& grid,
                         int threads) {
  const std::size_t m = x.size();
  if (m < 2) throw std::invalid_argument("transform requires at least 2 samples");
  if (!missing.empty() && missing.size() != m)
    throw std::invalid_argument("missing mask length does not match series");
  if (grid.omega.empty()) throw std::invalid_argument("frequency grid is empty");

  TransformPlane plane;
  plane.length = m;
  plane.wavelet = w;
  plane.grid = grid;
  plane.missing = missing.empty() ? std::vector<std::uint8_t>(m, 0) : missing;

  std::vector<double> series(x);
  for (std::size_t i = 0; i < m; ++i) {
    if (!plane.missing[i] && !std::isfinite(series[i]))
      throw std::invalid_argument("non-finite sample at index " +
                                  std::to_string(i));
  }
  fill_gaps(series, plane.missing);

  const std::size_t mext = next_fast_size(2 * m);
  const std::size_t pad_left = (mext - m) / 2;
  const std::size_t period = 2 * m - 2;

  FftwBuffer fwd_in(mext), fwd_out(mext);
  FftwPlan fwd(static_cast<int>(mext), fwd_in.p, fwd_out.p, FFTW_FORWARD);
  FftwPlan bwd(static_cast<int>(mext), fwd_in.p, fwd_out.p, FFTW_BACKWARD);

  // Whole-point mirror extension: reflect about both endpoints (period
  // 2M - 2) and center the data so the circular seam sits half a period away.
  for (std::size_t i = 0; i < mext; ++i) {
    std::int64_t v = static_cast<std::int64_t>(i) -
                     static_cast<std::int64_t>(pad_left);
    std::int64_t q = static_cast<std::int64_t>(period);
    std::int64_t vm = ((v % q) + q) % q;
    if (vm >= static_cast<std::int64_t>(m)) vm = q - vm;
    fwd_in.p[i][0] = series[static_cast<std::size_t>(vm)];
    fwd_in.p[i][1] = 0.0;
  }
  fftw_execute(fwd.plan);
  std::vector<std::complex<double>> spectrum(mext);
  for (std::size_t k = 0; k < mext; ++k)
    spectrum[k] = {fwd_out.p[k][0], fwd_out.p[k][1]};

  const std::size_t n_scales = grid.size();
  plane.scales.resize(n_scales);
  plane.edge_halfwidth.resize(n_scales);
  for (std::size_t j = 0; j < n_scales; ++j) {
    plane.scales[j] = w.peak_omega / grid.omega[j];
    plane.edge_halfwidth[j] = static_cast<std::size_t>(
        std::floor(0.5 * morse::footprint(w, plane.scales[j])));
  }
  plane.values.resize(n_scales * m);

  const std::size_t k_top = mext / 2;  // highest nonnegative-frequency bin
  const double inv_mext = 1.0 / static_cast<double>(mext);
  parallel_chunks(n_scales, threads, [&](std::size_t lo, std::size_t hi) {
    FftwBuffer in(mext), out(mext);
    for (std::size_t j = lo; j < hi; ++j) {
      const double s = plane.scales[j];
      for (std::size_t k = 0; k <= k_top; ++k) {
        double weight =
            morse::freq_wavelet(w, s * kTwoPi * static_cast<double>(k) * inv_mext);
        in.p[k][0] = spectrum[k].real() * weight;
        in.p[k][1] = spectrum[k].imag() * weight;
      }
      for (std::size_t k = k_top + 1; k < mext; ++k) {
        in.p[k][0] = 0.0;
        in.p[k][1] = 0.0;
      }
      fftw_execute_dft(bwd.plan, in.p, out.p);
      std::complex<double>* col = plane.values.data() + j * m;
      for (std::size_t t = 0; t < m; ++t) {
        col[t] = {out.p[pad_left + t][0] * inv_mext,
                  out.p[pad_left + t][1] * inv_mext};
      }
    }
  });
  return plane;
}

ScalingReport scaling_check(const std::vector<double>& x, int stretch,
                            const morse::WaveletSpec& w,
                            const GridParams& params) {
  if (stretch < 1) throw std::invalid_argument("stretch must be >= 1");
  const std::size_t m = x.size();
  FrequencyGrid grid_x = build_grid(w, m, params);
  TransformPlane px = transform(x, w, grid_x);

  const std::size_t rho = static_cast<std::size_t>(stretch);
  std::vector<double> y(rho * (m - 1) + 1);
  for (std::size_t k = 0; k < y.size(); ++k) {
    std::size_t i = k / rho;
    std::size_t frac = k % rho;
    y[k] = frac == 0 ? x[i]
                     : x[i] + (x[i + 1] - x[i]) * static_cast<double>(frac) /
                                  static_cast<double>(rho);
  }
  FrequencyGrid grid_y = build_grid(w, y.size(), params);
  TransformPlane py = transform(y, w, grid_y);

  double peak = 0.0;
  for (const auto& v : px.values) peak = std::max(peak, std::abs(v));

  ScalingReport report;
  const double log_ratio = std::log(grid_y.ratio);
  const std::size_t t_step = std::max<std::size_t>(1, m / 512);
  for (std::size_t j = 0; j < grid_x.size(); ++j) {
    // Stretched band lands between y-grid indices; both grids share the same
    // top frequency and ratio, so the offset is log_r(stretch).
    double target = grid_x.omega[j] / static_cast<double>(stretch);
    if (target > grid_y.omega[0] * (1.0 + 1e-9)) continue;
    double pos = std::log(grid_y.omega[0] / target) / log_ratio;
    std::size_t j0 = static_cast<std::size_t>(std::floor(pos));
    double frac = pos - static_cast<double>(j0);
    if (j0 + 1 >= grid_y.size()) {
      if (frac < 1e-9 && j0 < grid_y.size())
        frac = 0.0;
      else
        continue;
    }
    for (std::size_t t = 0; t < m; t += t_step) {
      if (px.is_edge(t, j)) continue;
      std::size_t ty = rho * t;
      std::size_t j1 = std::min(j0 + 1, grid_y.size() - 1);
      if (py.is_edge(ty, j0) || py.is_edge(ty, j1)) continue;
      double ax = std::abs(px.at(t, j));
      if (ax < 0.05 * peak) continue;
      double ay = (1.0 - frac) * std::abs(py.at(ty, j0)) +
                  frac * std::abs(py.at(ty, j1));
      report.max_rel_deviation =
          std::max(report.max_rel_deviation, std::abs(ay - ax) / peak);
      ++report.points_compared;
    }
  }
  return report;
}

}  // namespace elan::cwt
