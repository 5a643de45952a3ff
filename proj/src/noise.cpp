#include "elan/noise.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "elan/maxima.hpp"
#include "elan/parallel.hpp"
#include "elan/rng.hpp"
#include "elan/synth.hpp"

namespace elan::noise {
namespace {

using Matrix5cd = Eigen::Matrix<std::complex<double>, 5, 5, Eigen::RowMajor>;

void check_model(const NoiseModel& model) {
  if (!(model.alpha >= 0.0))
    throw std::invalid_argument("noise slope alpha must be >= 0");
  if (!(model.amplitude >= 0.0))
    throw std::invalid_argument("noise amplitude must be >= 0");
}

std::vector<double> make_edges(const HistogramSpec& hist) {
  if (hist.bins < 2 || !(hist.w_max > 0.0))
    throw std::invalid_argument("histogram needs >= 2 bins and positive range");
  std::vector<double> edges(hist.bins + 1);
  for (std::size_t k = 0; k <= hist.bins; ++k)
    edges[k] = hist.w_max * static_cast<double>(k) /
               static_cast<double>(hist.bins);
  return edges;
}

// Converts raw per-bin counts into the per-footprint table; survival is
// accumulated from the top so that density sums exactly to survival[0].
RateTable finish_table(std::size_t scale_index, const HistogramSpec& hist,
                       const std::vector<std::uint64_t>& counts,
                       std::uint64_t n_samples, std::uint64_t seed,
                       double footprint) {
  RateTable table;
  table.scale_index = scale_index;
  table.bin_edges = make_edges(hist);
  table.n_samples = n_samples;
  table.seed = seed;
  const double unit = footprint / static_cast<double>(n_samples);
  table.density.resize(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k)
    table.density[k] = static_cast<double>(counts[k]) * unit;
  table.survival.resize(counts.size());
  table.survival.back() = table.density.back();
  for (std::size_t k = counts.size() - 1; k-- > 0;)
    table.survival[k] = table.survival[k + 1] + table.density[k];
  return table;
}

}  // namespace

double wavelet_spectrum(const NoiseModel& model, const morse::WaveletSpec& w,
                        double scale) {
  check_model(model);
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  double f = morse::f_noise(model.alpha, w);
  return model.amplitude * model.amplitude * f *
         std::pow(scale, 2.0 * model.alpha - 1.0);
}

XiCovariance::XiCovariance(const NoiseModel& model, const morse::WaveletSpec& w)
    : model_(model), wavelet_(w) {
  check_model(model);
  morse::f_noise(model.alpha, w);  // validates beta > alpha - 1/2
  double cross_order = 2.0 * w.beta - 2.0 * model.alpha;
  if (cross_order < 0.0)
    throw std::invalid_argument(
        "covariance evaluation requires alpha <= beta");
  morse::WaveletSpec cross(cross_order, w.gamma);
  log_pref_ = 2.0 * w.log_amplitude - cross.log_amplitude;
  exponent_ = (cross_order + 1.0) / w.gamma;
  psi_ = std::make_shared<const morse::TimeWavelet>(cross_order, w.gamma);
}

std::complex<double> XiCovariance::operator()(double u, double scale,
                                              double ratio) const {
  if (!(scale > 0.0 && ratio > 0.0))
    throw std::invalid_argument("scale and ratio must be positive");
  const double gamma = wavelet_.gamma;
  double log_rg1 = std::log1p(std::pow(ratio, gamma));  // ln(1 + r^gamma)
  double pref = model_.amplitude * model_.amplitude *
                std::pow(scale, 2.0 * model_.alpha - 1.0) *
                std::exp(log_pref_ + wavelet_.beta * std::log(ratio) -
                         exponent_ * log_rg1);
  double arg = u / (scale * std::exp(log_rg1 / gamma));
  return pref * std::conj((*psi_)(arg));
}

std::complex<double> xi_covariance(const NoiseModel& model,
                                   const morse::WaveletSpec& w, double u,
                                   double scale, double ratio) {
  return XiCovariance(model, w)(u, scale, ratio);
}

Matrix5 sigma_matrix(const XiCovariance& xi, double scale, double ratio) {
  const double s = scale;
  const double r = ratio;
  const double var = xi(0.0, s, 1.0).real();
  auto entry = [&](double u, double base_scale, double rr) {
    return xi(u, base_scale, rr) / var;
  };

  Matrix5cd c;
  c(0, 0) = entry(0, s, 1);
  c(0, 1) = entry(1, s, 1);
  c(0, 2) = entry(-1, s, 1);
  c(0, 3) = entry(0, s, r);
  c(0, 4) = entry(0, s, 1 / r);
  c(1, 1) = entry(0, s, 1);
  c(1, 2) = entry(-2, s, 1);
  c(1, 3) = entry(-1, s, r);
  c(1, 4) = entry(-1, s, 1 / r);
  c(2, 2) = entry(0, s, 1);
  c(2, 3) = entry(1, s, r);
  c(2, 4) = entry(1, s, 1 / r);
  c(3, 3) = entry(0, r * s, 1);
  c(3, 4) = entry(0, r * s, 1 / (r * r));
  c(4, 4) = entry(0, s / r, 1);
  for (int i = 0; i < 5; ++i) {
    c(i, i) = c(i, i).real();
    for (int j = 0; j < i; ++j) c(i, j) = std::conj(c(j, i));
  }

  Eigen::SelfAdjointEigenSolver<Matrix5cd> solver(c);
  double max_eig = solver.eigenvalues().maxCoeff();
  double min_eig = solver.eigenvalues().minCoeff();
  double floor = -1e-10 * std::max(1.0, max_eig);
  if (min_eig < floor) {
    std::ostringstream msg;
    msg << "covariance matrix indefinite (min eigenvalue " << min_eig
        << ") at s=" << s << " r=" << r << " alpha=" << xi.model().alpha
        << " beta=" << xi.wavelet().beta << " gamma=" << xi.wavelet().gamma;
    throw std::runtime_error(msg.str());
  }
  if (min_eig < 0.0) {
    Eigen::Matrix<double, 5, 1> clipped =
        solver.eigenvalues().cwiseMax(0.0);
    c = solver.eigenvectors() * clipped.asDiagonal() *
        solver.eigenvectors().adjoint();
  }

  Matrix5 out;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) out[i * 5 + j] = c(i, j);
  return out;
}

Matrix5 sigma_matrix(const NoiseModel& model, const morse::WaveletSpec& w,
                     double scale, double ratio) {
  return sigma_matrix(XiCovariance(model, w), scale, ratio);
}

Matrix5 cholesky_factor(const Matrix5& sigma) {
  Matrix5cd c;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) c(i, j) = sigma[i * 5 + j];

  Eigen::LLT<Matrix5cd> llt(c);
  if (llt.info() != Eigen::Success) {
    double ridge = 1e-14 * std::max(1.0, c.diagonal().real().maxCoeff());
    llt.compute(c + ridge * Matrix5cd::Identity());
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("Cholesky factorization failed after clipping");
  }
  Matrix5cd l = llt.matrixL();
  Matrix5 out;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) out[i * 5 + j] = l(i, j);
  return out;
}

std::vector<RateTable> simulate_maxima(const NoiseModel& model,
                                       const morse::WaveletSpec& w,
                                       const cwt::FrequencyGrid& grid,
                                       std::uint64_t n_realizations,
                                       std::uint64_t seed,
                                       const HistogramSpec& hist, int threads) {
  if (n_realizations == 0)
    throw std::invalid_argument("n_realizations must be positive");
  if (grid.omega.empty())
    throw std::invalid_argument("frequency grid is empty");
  XiCovariance xi(model, w);

  const std::size_t n_scales = grid.size();
  std::vector<Matrix5> factors(n_scales);
  for (std::size_t j = 0; j < n_scales; ++j) {
    double s = w.peak_omega / grid.omega[j];
    factors[j] = cholesky_factor(sigma_matrix(xi, s, grid.ratio));
  }

  std::vector<RateTable> tables(n_scales);
  make_edges(hist);  // validate once before spawning workers
  parallel_for(n_scales, threads, [&](std::size_t j) {
    const Matrix5& l = factors[j];
    GaussianRng rng(GaussianRng::substream(seed, j));
    std::vector<std::uint64_t> counts(hist.bins + 1, 0);
    const double bin_scale = static_cast<double>(hist.bins) / hist.w_max;

    std::complex<double> z[5], y[5];
    for (std::uint64_t it = 0; it < n_realizations; ++it) {
      for (int i = 0; i < 5; ++i) z[i] = rng.circular();
      for (int i = 0; i < 5; ++i) {
        std::complex<double> acc = l[i * 5] * z[0];
        for (int k = 1; k <= i; ++k) acc += l[i * 5 + k] * z[k];
        y[i] = acc;
      }
      double center = std::norm(y[0]);
      if (center > std::norm(y[1]) && center > std::norm(y[2]) &&
          center > std::norm(y[3]) && center > std::norm(y[4])) {
        double mag = std::sqrt(center);
        std::size_t bin = mag >= hist.w_max
                              ? hist.bins
                              : static_cast<std::size_t>(mag * bin_scale);
        ++counts[bin];
      }
    }
    double s = w.peak_omega / grid.omega[j];
    tables[j] = finish_table(j, hist, counts, n_realizations,
                             GaussianRng::substream(seed, j),
                             morse::footprint(w, s));
  });
  return tables;
}

RateTable direct_maxima_oracle(const NoiseModel& model,
                               const morse::WaveletSpec& w,
                               std::size_t band_count, std::size_t length,
                               std::uint64_t seed, const HistogramSpec& hist) {
  check_model(model);
  if (band_count < 3)
    throw std::invalid_argument("direct oracle needs at least 3 bands");

  std::vector<double> x;
  if (model.alpha == 0.0) {
    x = synth::white_noise(length, model.amplitude, seed);
  } else if (model.alpha == 1.0) {
    x = synth::red_noise(length, seed);
  } else {
    throw std::invalid_argument(
        "direct oracle supports white (alpha=0) and red (alpha=1) noise only");
  }

  cwt::FrequencyGrid grid = cwt::build_grid(w, length);
  if (grid.size() < band_count)
    throw std::invalid_argument("series too short for the requested bands");
  grid.omega.resize(band_count);

  cwt::TransformPlane plane = cwt::transform(x, w, grid);
  const std::size_t middle = band_count / 2;
  const double s_mid = plane.scales[middle];

  double sigma;
  if (model.alpha == 0.0) {
    sigma = std::sqrt(wavelet_spectrum(model, w, s_mid));
  } else {
    // Spectral amplitude of the standardized red recipe depends on the
    // record length, so normalize by the realized band level instead.
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < length; ++t) {
      if (plane.is_edge(t, middle)) continue;
      sum += std::norm(plane.at(t, middle));
      ++n;
    }
    if (n == 0) throw std::runtime_error("band has no interior samples");
    sigma = std::sqrt(sum / static_cast<double>(n));
  }

  std::vector<std::uint64_t> counts(hist.bins + 1, 0);
  const double bin_scale = static_cast<double>(hist.bins) / hist.w_max;
  for (const auto& p : maxima::find_maxima(plane)) {
    if (p.scale_index != middle || p.flags.edge) continue;
    double mag = std::abs(plane.at(p.t_index, p.scale_index)) / sigma;
    std::size_t bin = mag >= hist.w_max
                          ? hist.bins
                          : static_cast<std::size_t>(mag * bin_scale);
    ++counts[bin];
  }

  std::size_t hw = plane.edge_halfwidth[middle];
  std::size_t lo = std::max<std::size_t>(1, hw);
  std::size_t hi = std::min(length - 2, length - 1 - hw);
  std::uint64_t n_points = hi >= lo ? hi - lo + 1 : 0;
  if (n_points == 0) throw std::runtime_error("band has no interior samples");
  return finish_table(middle, hist, counts, n_points, seed,
                      morse::footprint(w, s_mid));
}

std::vector<double> threshold_for_rate(const std::vector<RateTable>& tables,
                                       const morse::WaveletSpec& w,
                                       const cwt::FrequencyGrid& grid,
                                       const RateTarget& target) {
  if (tables.size() != grid.size())
    throw std::invalid_argument("rate tables do not cover the grid");
  if (!(target.events > 0.0) || !(target.n_series > 0.0) ||
      target.length == 0)
    throw std::invalid_argument("rate target must be positive");

  std::vector<double> cutoffs(tables.size());
  for (std::size_t j = 0; j < tables.size(); ++j) {
    const RateTable& table = tables[j];
    if (table.scale_index != j)
      throw std::invalid_argument("rate tables out of order");
    double footprint = morse::footprint(w, w.peak_omega / grid.omega[j]);
    double target_fp = target.events / target.n_series * footprint /
                       static_cast<double>(target.length);
    double mc_floor = footprint / static_cast<double>(table.n_samples);
    if (target_fp < mc_floor)
      throw std::runtime_error(
          "target rate below the Monte Carlo resolution; "
          "increase n_realizations");

    if (target_fp >= table.survival.front()) {
      cutoffs[j] = table.bin_edges.front();
      continue;
    }
    if (target_fp < table.survival.back())
      throw std::runtime_error(
          "target rate below the histogram range; increase n_realizations "
          "or the histogram maximum");
    std::size_t k = 1;
    while (table.survival[k] > target_fp) ++k;
    double s0 = table.survival[k - 1];
    double s1 = table.survival[k];
    double frac = s0 > s1 ? (s0 - target_fp) / (s0 - s1) : 1.0;
    cutoffs[j] =
        table.bin_edges[k - 1] +
        frac * (table.bin_edges[k] - table.bin_edges[k - 1]);
  }
  if (cutoffs.size() >= 3) {
    cutoffs.front() = cutoffs[1];
    cutoffs.back() = cutoffs[cutoffs.size() - 2];
  }
  return cutoffs;
}

double estimate_amplitude(const cwt::TransformPlane& plane, double alpha) {
  double f = morse::f_noise(alpha, plane.wavelet);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < plane.length; ++t) {
    if (plane.is_edge(t, 0) || plane.missing[t]) continue;
    sum += std::norm(plane.at(t, 0));
    ++n;
  }
  if (n == 0)
    throw std::runtime_error("highest-frequency band has no usable samples");
  double s0 = plane.scales[0];
  return std::sqrt(sum / static_cast<double>(n) /
                   (f * std::pow(s0, 2.0 * alpha - 1.0)));
}

}  // namespace elan::noise
