#pragma once

// Length spectrum S(L) of the spectral fluctuations: windowing, direct
// evaluation over a grid of orbit lengths, peak picking, and the exact
// periodic-orbit lengths used to label peaks.

#include "weylshape/error.hpp"
#include "weylshape/parallel.hpp"
#include "weylshape/spectrum.hpp"
#include "weylshape/weyl.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace weylshape {

enum class WindowKind { rectangular, hann };

inline std::string_view to_string(WindowKind w) {
  return w == WindowKind::rectangular ? "rectangular" : "hann";
}

inline WindowKind parse_window(std::string_view s) {
  if (s == "rectangular" || s == "rect") return WindowKind::rectangular;
  if (s == "hann") return WindowKind::hann;
  throw validation_error("unknown window '" + std::string(s) + "'");
}

/// Uniform grid L_j = l_min + j (l_max - l_min) / (steps - 1).
class LengthGrid {
public:
  static constexpr std::size_t kMinSteps = 64;

  LengthGrid(double l_min, double l_max, std::size_t steps)
      : l_min_(l_min), l_max_(l_max), steps_(steps) {
    if (!std::isfinite(l_min) || !std::isfinite(l_max) || !(l_min > 0.0) || !(l_min < l_max))
      throw validation_error("length grid needs 0 < l_min < l_max");
    if (steps < kMinSteps)
      throw validation_error("length grid needs at least " + std::to_string(kMinSteps) + " steps");
  }

  double l_min() const noexcept { return l_min_; }
  double l_max() const noexcept { return l_max_; }
  std::size_t steps() const noexcept { return steps_; }
  double spacing() const noexcept { return (l_max_ - l_min_) / static_cast<double>(steps_ - 1); }
  double at(std::size_t j) const noexcept {
    return l_min_ + static_cast<double>(j) * (l_max_ - l_min_) / static_cast<double>(steps_ - 1);
  }
  std::vector<double> points() const {
    std::vector<double> p(steps_);
    for (std::size_t j = 0; j < steps_; ++j) p[j] = at(j);
    return p;
  }

private:
  double l_min_;
  double l_max_;
  std::size_t steps_;
};

struct LengthSpectrum {
  LengthGrid grid;
  std::vector<double> power;
};

struct Peak {
  double location = 0.0;   // refined
  double power = 0.0;      // at the grid maximum
  double prominence = 0.0;
  std::size_t grid_index = 0;
};

struct OrbitLength {
  std::array<unsigned, 3> indices{}; // third entry unused in 2-D
  int dim = 2;
  double length = 0.0;
};

/// Window weights over the whole series.
inline FluctuationSeries apply_window(FluctuationSeries series, WindowKind kind);

/// Window tapered over [begin, K) with zero weight before `begin`. With
/// begin = 0 this is the ordinary window over the sample.
inline FluctuationSeries apply_tail_window(FluctuationSeries series, WindowKind kind,
                                           std::size_t begin) {
  const std::size_t total = series.size();
  if (total == 0) throw validation_error("cannot window an empty fluctuation series");
  if (begin >= total) throw validation_error("window start lies past the end of the series");
  series.weights.assign(total, 0.0);
  const std::size_t span = total - begin;
  for (std::size_t i = 0; i < span; ++i) {
    double w = 1.0;
    if (kind == WindowKind::hann && span > 1)
      w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(span - 1)));
    series.weights[begin + i] = w;
  }
  return series;
}

inline FluctuationSeries apply_window(FluctuationSeries series, WindowKind kind) {
  return apply_tail_window(std::move(series), kind, 0);
}

namespace detail {

inline void check_series(const FluctuationSeries& s) {
  if (s.size() == 0) throw validation_error("empty fluctuation series");
  if (s.sqrt_values.size() != s.size() || s.weights.size() != s.size())
    throw validation_error("fluctuation series components differ in length");
}

// |sum_k w_k F_k exp(-i L t_k)|^2, accumulated in sample order.
inline double length_power(double length, std::span<const double> t,
                           std::span<const double> amplitude) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double arg = length * t[k];
    re += amplitude[k] * std::cos(arg);
    im -= amplitude[k] * std::sin(arg);
  }
  return re * re + im * im;
}

} // namespace detail

/// S(L) at arbitrary lengths, one independent sum per point.
inline std::vector<double> evaluate_length_spectrum_at(const FluctuationSeries& series,
                                                       std::span<const double> lengths,
                                                       unsigned workers = 0) {
  detail::check_series(series);
  std::vector<double> amplitude(series.size());
  for (std::size_t k = 0; k < series.size(); ++k)
    amplitude[k] = series.weights[k] * series.fluct[k];

  std::vector<double> power(lengths.size());
  parallel_for(lengths.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j)
      power[j] = detail::length_power(lengths[j], series.sqrt_values, amplitude);
  });
  return power;
}

inline LengthSpectrum evaluate_length_spectrum(const FluctuationSeries& series,
                                               const LengthGrid& grid, unsigned workers = 0) {
  const auto points = grid.points();
  return {grid, evaluate_length_spectrum_at(series, points, workers)};
}

namespace detail {

// Height above the higher of the two bases, each base being the minimum
// between the peak and the nearest strictly higher sample on that side.
inline double prominence_at(std::span<const double> p, std::size_t j) {
  const double h = p[j];
  double left_min = h;
  for (std::size_t i = j; i-- > 0;) {
    if (p[i] > h) break;
    left_min = std::min(left_min, p[i]);
  }
  double right_min = h;
  for (std::size_t i = j + 1; i < p.size(); ++i) {
    if (p[i] > h) break;
    right_min = std::min(right_min, p[i]);
  }
  return h - std::max(left_min, right_min);
}

// Vertex offset in cells of the parabola through (-1, y0), (0, y1), (1, y2).
inline double parabola_vertex(double y0, double y1, double y2) {
  const double denom = y0 - 2.0 * y1 + y2;
  if (!(denom < 0.0)) return 0.0;
  return std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
}

} // namespace detail

/// Interior strict local maxima whose prominence is at least
/// min_prominence_fraction * max(power), strongest first. Locations are
/// refined by a parabola through the log-power of the three samples around
/// the maximum.
inline std::vector<Peak> find_peaks(const LengthSpectrum& spec, double min_prominence_fraction = 0.05,
                                    std::size_t max_peaks = 16) {
  if (!(min_prominence_fraction > 0.0 && min_prominence_fraction < 1.0))
    throw validation_error("peak prominence fraction must lie in (0, 1)");
  if (max_peaks == 0) throw validation_error("max peaks must be positive");
  const std::span<const double> p = spec.power;
  if (p.size() < 3) throw validation_error("length spectrum needs at least 3 points");

  const double top = *std::max_element(p.begin(), p.end());
  const double threshold = min_prominence_fraction * top;
  std::vector<Peak> peaks;
  if (!(top > 0.0)) return peaks;

  const double h = spec.grid.spacing();
  for (std::size_t j = 1; j + 1 < p.size(); ++j) {
    if (!(p[j - 1] < p[j] && p[j] >= p[j + 1])) continue;
    const double prom = detail::prominence_at(p, j);
    if (!(prom > 0.0) || prom < threshold) continue;

    double offset = 0.0;
    if (p[j - 1] > 0.0 && p[j + 1] > 0.0)
      offset = detail::parabola_vertex(std::log(p[j - 1]), std::log(p[j]), std::log(p[j + 1]));
    else
      offset = detail::parabola_vertex(p[j - 1], p[j], p[j + 1]);
    peaks.push_back({spec.grid.at(j) + offset * h, p[j], prom, j});
  }

  std::sort(peaks.begin(), peaks.end(), [](const Peak& x, const Peak& y) {
    return std::tie(y.power, x.location) < std::tie(x.power, y.location);
  });
  if (peaks.size() > max_peaks) peaks.resize(max_peaks);
  return peaks;
}

namespace detail {

inline void sort_orbits(std::vector<OrbitLength>& out) {
  std::sort(out.begin(), out.end(), [](const OrbitLength& x, const OrbitLength& y) {
    return std::tie(x.length, x.indices) < std::tie(y.length, y.indices);
  });
}

} // namespace detail

/// Periodic-orbit lengths 2 sqrt((m1 a)^2 + (m2 b)^2) with 0 <= m_i <= max_index,
/// not all zero, and length <= l_max, ascending.
inline std::vector<OrbitLength> orbit_lengths(const RectangleGeometry& geom, unsigned max_index,
                                              double l_max) {
  geom.validate();
  if (max_index == 0) throw validation_error("max index must be positive");
  std::vector<OrbitLength> out;
  for (unsigned m1 = 0; m1 <= max_index; ++m1)
    for (unsigned m2 = 0; m2 <= max_index; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      const double x = m1 * geom.a;
      const double y = m2 * geom.b;
      const double len = 2.0 * std::sqrt(x * x + y * y);
      if (len <= l_max) out.push_back({{m1, m2, 0}, 2, len});
    }
  detail::sort_orbits(out);
  return out;
}

inline std::vector<OrbitLength> orbit_lengths(const BoxGeometry& geom, unsigned max_index,
                                              double l_max) {
  geom.validate();
  if (max_index == 0) throw validation_error("max index must be positive");
  std::vector<OrbitLength> out;
  for (unsigned m1 = 0; m1 <= max_index; ++m1)
    for (unsigned m2 = 0; m2 <= max_index; ++m2)
      for (unsigned m3 = 0; m3 <= max_index; ++m3) {
        if (m1 == 0 && m2 == 0 && m3 == 0) continue;
        const double x = m1 * geom.a;
        const double y = m2 * geom.b;
        const double z = m3 * geom.c;
        const double len = 2.0 * std::sqrt(x * x + y * y + z * z);
        if (len <= l_max) out.push_back({{m1, m2, m3}, 3, len});
      }
  detail::sort_orbits(out);
  return out;
}

} // namespace weylshape
