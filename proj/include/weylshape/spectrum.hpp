#pragma once

// Forward problem: Dirichlet eigenvalues of rectangles and boxes, plus the
// plain-text eigenvalue file format.

#include "weylshape/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace weylshape {

inline constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

/// Smallest sample any fit is allowed to start from.
inline constexpr std::size_t kMinSampleLength = 16;

struct RectangleGeometry {
  double a = 1.0;
  double b = 1.0;

  void validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
      throw validation_error("rectangle sides must be positive and finite");
  }
  double area() const { return a * b; }
  RectangleGeometry normalized() const { return {std::min(a, b), std::max(a, b)}; }
};

struct BoxGeometry {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;

  void validate() const {
    for (double s : {a, b, c})
      if (!(s > 0.0) || !std::isfinite(s))
        throw validation_error("box sides must be positive and finite");
  }
  double volume() const { return a * b * c; }
  BoxGeometry normalized() const {
    std::array<double, 3> s{a, b, c};
    std::sort(s.begin(), s.end());
    return {s[0], s[1], s[2]};
  }
};

/// Ordered eigenvalue list: the only input the inversion sees.
class SpectrumSample {
public:
  SpectrumSample(std::vector<double> values, int dim,
                 std::optional<std::size_t> offset = std::nullopt)
      : values_(std::move(values)), offset_(offset), dim_(dim) {
    if (dim_ != 2 && dim_ != 3) throw validation_error("dimension must be 2 or 3");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]) || !(values_[i] > 0.0))
        throw validation_error("eigenvalue " + std::to_string(i + 1) +
                               " is not a positive finite number");
      if (i > 0 && values_[i] < values_[i - 1])
        throw validation_error("eigenvalues must be nondecreasing");
    }
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  int dim() const noexcept { return dim_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Drops the first n values; a known offset grows by n.
  SpectrumSample drop_front(std::size_t n) const {
    n = std::min(n, values_.size());
    std::optional<std::size_t> off;
    if (offset_) off = *offset_ + n;
    return SpectrumSample(std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(n),
                                              values_.end()),
                          dim_, off);
  }

private:
  std::vector<double> values_;
  std::optional<std::size_t> offset_;
  int dim_;
};

inline void require_min_length(const SpectrumSample& sample,
                               std::size_t min_count = kMinSampleLength) {
  if (sample.size() < min_count)
    throw size_error("fewer than " + std::to_string(min_count) + " eigenvalues (got " +
                     std::to_string(sample.size()) + ")");
}

namespace detail {

inline double rectangle_mode(const RectangleGeometry& g, double m, double n) {
  return kPi2 * (m * m / (g.a * g.a) + n * n / (g.b * g.b));
}

inline double box_mode(const BoxGeometry& g, double l, double n, double m) {
  return kPi2 * (l * l / (g.a * g.a) + n * n / (g.b * g.b) + m * m / (g.c * g.c));
}

inline std::vector<double> axis_terms(double side, std::size_t cap) {
  std::vector<double> t(cap + 1, 0.0);
  for (std::size_t m = 1; m <= cap; ++m) {
    const double md = static_cast<double>(m);
    t[m] = md * md / (side * side);
  }
  return t;
}

// Visits every mode value <= ceiling with indices in [1, cap]. Modes are
// evaluated with the same expression as rectangle_mode/box_mode so that
// results do not depend on the cap.
template <class Visit>
void visit_rectangle_modes(const RectangleGeometry& g, std::size_t cap, double ceiling,
                           Visit&& visit) {
  const auto tx = axis_terms(g.a, cap);
  const auto ty = axis_terms(g.b, cap);
  for (std::size_t m = 1; m <= cap; ++m) {
    if (kPi2 * (tx[m] + ty[1]) > ceiling) break;
    for (std::size_t n = 1; n <= cap; ++n) {
      const double v = kPi2 * (tx[m] + ty[n]);
      if (v > ceiling) break;
      visit(v);
    }
  }
}

template <class Visit>
void visit_box_modes(const BoxGeometry& g, std::size_t cap, double ceiling, Visit&& visit) {
  const auto tx = axis_terms(g.a, cap);
  const auto ty = axis_terms(g.b, cap);
  const auto tz = axis_terms(g.c, cap);
  for (std::size_t l = 1; l <= cap; ++l) {
    if (kPi2 * (tx[l] + ty[1] + tz[1]) > ceiling) break;
    for (std::size_t n = 1; n <= cap; ++n) {
      if (kPi2 * (tx[l] + ty[n] + tz[1]) > ceiling) break;
      for (std::size_t m = 1; m <= cap; ++m) {
        const double v = kPi2 * (tx[l] + ty[n] + tz[m]);
        if (v > ceiling) break;
        visit(v);
      }
    }
  }
}

inline void check_request(std::size_t count, std::size_t index_cap) {
  if (count == 0) throw validation_error("count must be positive");
  if (index_cap == 0) throw validation_error("index cap must be positive");
}

// Shared driver: find a ceiling below the completeness bound that holds at
// least skip+count modes, collect, sort, slice.
template <class Visit>
std::vector<double> enumerate_prefix(std::size_t need, double cutoff, double guess,
                                     Visit&& visit_modes) {
  const double safe = std::nextafter(cutoff, 0.0);
  auto count_upto = [&](double ceiling) {
    std::size_t n = 0;
    visit_modes(ceiling, [&n](double) { ++n; });
    return n;
  };

  double ceiling = std::min(guess, safe);
  std::size_t have = count_upto(ceiling);
  while (have < need && ceiling < safe) {
    ceiling = std::min(2.0 * ceiling, safe);
    have = count_upto(ceiling);
  }
  if (have < need) {
    std::ostringstream msg;
    msg << std::setprecision(10) << "requested " << need
        << " eigenvalues but only " << have << " lie below truncation_safe_cutoff = " << cutoff
        << "; raise the index cap";
    throw completeness_error(msg.str());
  }

  std::vector<double> values;
  values.reserve(have);
  visit_modes(ceiling, [&values](double v) { values.push_back(v); });
  std::sort(values.begin(), values.end());
  return values;
}

} // namespace detail

/// Smallest eigenvalue the index cap excludes. Every eigenvalue strictly below
/// it is present in the capped enumeration.
inline double truncation_safe_cutoff(const RectangleGeometry& geom, std::size_t index_cap) {
  geom.validate();
  if (index_cap == 0) throw validation_error("index cap must be positive");
  const double next = static_cast<double>(index_cap) + 1.0;
  return std::min(detail::rectangle_mode(geom, next, 1.0), detail::rectangle_mode(geom, 1.0, next));
}

inline double truncation_safe_cutoff(const BoxGeometry& geom, std::size_t index_cap) {
  geom.validate();
  if (index_cap == 0) throw validation_error("index cap must be positive");
  const double next = static_cast<double>(index_cap) + 1.0;
  return std::min({detail::box_mode(geom, next, 1.0, 1.0), detail::box_mode(geom, 1.0, next, 1.0),
                   detail::box_mode(geom, 1.0, 1.0, next)});
}

/// Entries skip+1 .. skip+count of the sorted multiset
/// { pi^2 (m^2/a^2 + n^2/b^2) : 1 <= m, n <= index_cap }.
inline SpectrumSample generate_rectangle_spectrum(const RectangleGeometry& geom, std::size_t count,
                                                  std::size_t skip = 0,
                                                  std::size_t index_cap = 800) {
  geom.validate();
  detail::check_request(count, index_cap);
  const std::size_t need = skip + count;
  const double cutoff = truncation_safe_cutoff(geom, index_cap);
  // Weyl estimate of lambda_need with headroom for the boundary deficit.
  const double guess = 4.0 * std::numbers::pi * static_cast<double>(need) / geom.area() * 1.25 +
                       detail::rectangle_mode(geom, 1.0, 1.0);
  auto all = detail::enumerate_prefix(need, cutoff, guess, [&](double ceiling, auto&& visit) {
    detail::visit_rectangle_modes(geom, index_cap, ceiling, visit);
  });
  std::vector<double> values(all.begin() + static_cast<std::ptrdiff_t>(skip),
                             all.begin() + static_cast<std::ptrdiff_t>(need));
  return SpectrumSample(std::move(values), 2, skip);
}

inline SpectrumSample generate_box_spectrum(const BoxGeometry& geom, std::size_t count,
                                            std::size_t skip = 0, std::size_t index_cap = 800) {
  geom.validate();
  detail::check_request(count, index_cap);
  const std::size_t need = skip + count;
  const double cutoff = truncation_safe_cutoff(geom, index_cap);
  const double guess =
      std::pow(6.0 * kPi2 * static_cast<double>(need) / geom.volume(), 2.0 / 3.0) * 1.5 +
      detail::box_mode(geom, 1.0, 1.0, 1.0);
  auto all = detail::enumerate_prefix(need, cutoff, guess, [&](double ceiling, auto&& visit) {
    detail::visit_box_modes(geom, index_cap, ceiling, visit);
  });
  std::vector<double> values(all.begin() + static_cast<std::ptrdiff_t>(skip),
                             all.begin() + static_cast<std::ptrdiff_t>(need));
  return SpectrumSample(std::move(values), 3, skip);
}

// ---------------------------------------------------------------------------
// Eigenvalue files: one decimal per line, '#' comments, blank lines ignored.

inline SpectrumSample load_spectrum(std::istream& in, int dim,
                                    std::size_t min_count = kMinSampleLength) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s(line);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty() || s.front() == '#') continue;
    if (s.front() == '+') s.remove_prefix(1);

    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc::result_out_of_range)
      throw validation_error("line " + std::to_string(line_no) + ": value out of range");
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw parse_error("not a number: '" + std::string(s) + "'", line_no);
    if (!std::isfinite(v) || !(v > 0.0))
      throw validation_error("line " + std::to_string(line_no) +
                             ": eigenvalues must be positive and finite");
    values.push_back(v);
  }
  if (values.size() < std::max<std::size_t>(min_count, 1))
    throw size_error("fewer than " + std::to_string(std::max<std::size_t>(min_count, 1)) +
                     " eigenvalues (got " + std::to_string(values.size()) + ")");
  std::sort(values.begin(), values.end());
  return SpectrumSample(std::move(values), dim);
}

inline SpectrumSample load_spectrum(std::string_view text, int dim,
                                    std::size_t min_count = kMinSampleLength) {
  std::istringstream in{std::string(text)};
  return load_spectrum(in, dim, min_count);
}

/// Writes one value per line with 17 significant digits.
inline void write_spectrum(std::ostream& out, const SpectrumSample& sample) {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision(17);
  out.unsetf(std::ios::floatfield);
  for (double v : sample.values()) out << v << '\n';
  out.flags(old_flags);
  out.precision(old_precision);
}

inline std::string format_spectrum(const SpectrumSample& sample) {
  std::ostringstream out;
  write_spectrum(out, sample);
  return out.str();
}

} // namespace weylshape
