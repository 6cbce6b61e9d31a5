#pragma once

// Counting function, Weyl-law tail fit and the oscillatory remainder.

#include "weylshape/error.hpp"
#include "weylshape/spectrum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace weylshape {

/// Smooth part of N(lambda). `linear` is the leading Weyl term plus a
/// constant; `three_term` adds the boundary-order term lambda^{(d-1)/2}.
enum class SmoothModel { linear, three_term };

inline std::string_view to_string(SmoothModel m) {
  return m == SmoothModel::linear ? "linear" : "three_term";
}

inline SmoothModel parse_smooth_model(std::string_view s) {
  if (s == "linear") return SmoothModel::linear;
  if (s == "three_term" || s == "three-term") return SmoothModel::three_term;
  throw validation_error("unknown smooth model '" + std::string(s) + "'");
}

struct WeylFit {
  double slope = 0.0;       // coefficient of lambda^{d/2}
  double boundary = 0.0;    // coefficient of lambda^{(d-1)/2}; zero for the linear model
  double intercept = 0.0;
  double fit_start_fraction = 0.3;
  double residual_rms = 0.0;
  std::size_t fit_begin = 0; // 0-based first sample index of the tail
  std::size_t fit_count = 0;
  int dim = 2;
  SmoothModel model = SmoothModel::linear;

  double smooth_count(double lambda) const {
    const double lead = dim == 2 ? lambda : lambda * std::sqrt(lambda);
    double n = slope * lead + intercept;
    if (model == SmoothModel::three_term) n += boundary * (dim == 2 ? std::sqrt(lambda) : lambda);
    return n;
  }
};

/// Oscillatory remainder F(lambda_k) sampled at each eigenvalue, with window
/// weights applied later by the length-spectrum stage.
struct FluctuationSeries {
  std::vector<double> sqrt_values;
  std::vector<double> fluct;
  std::vector<double> weights;

  std::size_t size() const noexcept { return fluct.size(); }
};

/// #{i : values[i] <= lambda}, relative to the start of the sample.
inline std::size_t counting_at(const SpectrumSample& sample, double lambda) {
  const auto v = sample.values();
  return static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), lambda) - v.begin());
}

/// Least squares of k against lambda_k over the upper tail of the sample.
/// The tail starts at 1-based index floor(fraction * K).
inline WeylFit fit_weyl_slope(const SpectrumSample& sample, double fit_start_fraction = 0.3,
                              SmoothModel model = SmoothModel::linear) {
  if (!(fit_start_fraction > 0.0 && fit_start_fraction < 1.0))
    throw validation_error("fit start fraction must lie in (0, 1)");

  const std::size_t total = sample.size();
  const auto first = static_cast<std::size_t>(
      std::floor(fit_start_fraction * static_cast<double>(total)));
  const std::size_t begin = first > 0 ? first - 1 : 0;
  const std::size_t rows = total - std::min(begin, total);
  if (rows < 8)
    throw fit_error("Weyl fit needs at least 8 tail points (got " + std::to_string(rows) + ")");

  const auto v = sample.values();
  if (v[begin] == v[total - 1]) throw fit_error("degenerate Weyl fit: all tail eigenvalues equal");

  const int dim = sample.dim();
  const int cols = model == SmoothModel::linear ? 2 : 3;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(rows), cols);
  Eigen::VectorXd counts(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const double lambda = v[begin + r];
    const double root = std::sqrt(lambda);
    const auto row = static_cast<Eigen::Index>(r);
    design(row, 0) = dim == 2 ? lambda : lambda * root;
    if (model == SmoothModel::three_term) design(row, 1) = dim == 2 ? root : lambda;
    design(row, cols - 1) = 1.0;
    counts(row) = static_cast<double>(begin + r + 1);
  }

  // Column equilibration keeps lambda^{3/2} and the constant on one scale.
  Eigen::VectorXd scale = design.colwise().lpNorm<Eigen::Infinity>().transpose();
  Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-12);
  if (qr.rank() < cols) throw fit_error("degenerate Weyl fit: rank-deficient design matrix");
  Eigen::VectorXd coef = qr.solve(counts).cwiseQuotient(scale);

  WeylFit fit;
  fit.slope = coef(0);
  fit.boundary = model == SmoothModel::three_term ? coef(1) : 0.0;
  fit.intercept = coef(cols - 1);
  fit.fit_start_fraction = fit_start_fraction;
  fit.fit_begin = begin;
  fit.fit_count = rows;
  fit.dim = dim;
  fit.model = model;
  if (!(fit.slope > 0.0)) throw fit_error("Weyl fit produced a nonpositive slope");

  const Eigen::VectorXd residual = counts - design * coef;
  fit.residual_rms = std::sqrt(residual.squaredNorm() / static_cast<double>(rows));
  return fit;
}

/// Area (2-D) or volume (3-D) implied by the leading Weyl coefficient,
/// N ~ omega_d Vol / (2 pi)^d lambda^{d/2}.
inline double estimate_measure(const WeylFit& fit) {
  if (fit.dim == 2) return 4.0 * std::numbers::pi * fit.slope;
  return 6.0 * kPi2 * fit.slope;
}

/// F(lambda_k) = k - N_smooth(lambda_k) with k counted from 1 inside the sample.
inline FluctuationSeries fluctuations(const SpectrumSample& sample, const WeylFit& fit) {
  if (fit.dim != sample.dim()) throw validation_error("fit and sample dimensions differ");
  FluctuationSeries s;
  const auto v = sample.values();
  s.sqrt_values.resize(v.size());
  s.fluct.resize(v.size());
  s.weights.assign(v.size(), 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    s.sqrt_values[i] = std::sqrt(v[i]);
    s.fluct[i] = static_cast<double>(i + 1) - fit.smooth_count(v[i]);
  }
  return s;
}

} // namespace weylshape
