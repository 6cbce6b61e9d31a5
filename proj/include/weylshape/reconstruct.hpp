#pragma once

// Side-length recovery: Weyl measure plus length-spectrum peaks, resolved by
// requiring the implied side product to match the measure.

#include "weylshape/error.hpp"
#include "weylshape/lengthspec.hpp"
#include "weylshape/spectrum.hpp"
#include "weylshape/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace weylshape {

/// Which part of the sample the window tapers over. `fit_tail` zeroes the
/// fluctuations below the Weyl-fit window.
enum class WindowSpan { automatic, sample, fit_tail };

inline std::string_view to_string(WindowSpan s) {
  switch (s) {
  case WindowSpan::sample: return "sample";
  case WindowSpan::fit_tail: return "fit_tail";
  default: return "auto";
  }
}

inline WindowSpan parse_window_span(std::string_view s) {
  if (s == "auto") return WindowSpan::automatic;
  if (s == "sample") return WindowSpan::sample;
  if (s == "fit_tail" || s == "fit-tail" || s == "tail") return WindowSpan::fit_tail;
  throw validation_error("unknown window span '" + std::string(s) + "'");
}

struct ReconstructionConfig {
  double fit_start_fraction = 0.3;
  SmoothModel smooth_model = SmoothModel::three_term;
  WindowKind window = WindowKind::hann;
  WindowSpan window_span = WindowSpan::automatic;
  // Unset grid bounds resolve to l_min = 0.25, l_max = 4 * measure^{1/d}.
  std::optional<double> l_min;
  std::optional<double> l_max;
  std::size_t steps = 4096;
  // Unset resolves to 0.05 for rectangles and 0.01 for boxes.
  std::optional<double> min_prominence;
  std::size_t max_peaks = 16;
  double pair_tolerance = 0.1;
  unsigned workers = 0;

  void validate() const {
    if (!(fit_start_fraction > 0.0 && fit_start_fraction < 1.0))
      throw validation_error("fit start fraction must lie in (0, 1)");
    if (l_min && !(*l_min > 0.0)) throw validation_error("l_min must be positive");
    if (l_min && l_max && !(*l_min < *l_max)) throw validation_error("l_min must be below l_max");
    if (steps < LengthGrid::kMinSteps)
      throw validation_error("steps must be at least " + std::to_string(LengthGrid::kMinSteps));
    if (min_prominence && !(*min_prominence > 0.0 && *min_prominence < 1.0))
      throw validation_error("min prominence must lie in (0, 1)");
    if (max_peaks == 0) throw validation_error("max peaks must be positive");
    if (!(pair_tolerance > 0.0)) throw validation_error("pair tolerance must be positive");
  }

  double prominence_for(int dim) const {
    return min_prominence.value_or(dim == 2 ? 0.05 : 0.01);
  }

  WindowSpan span_for(int dim) const {
    if (window_span != WindowSpan::automatic) return window_span;
    return dim == 2 ? WindowSpan::fit_tail : WindowSpan::sample;
  }

  LengthGrid grid_for(int dim, double measure) const {
    const double lo = l_min.value_or(0.25);
    const double hi = l_max.value_or(4.0 * std::pow(measure, 1.0 / dim));
    return LengthGrid(lo, hi, steps);
  }
};

/// A pair (2-D) or triple (3-D) of orbit lengths proposed as 2x the sides.
struct SideCandidate {
  std::vector<double> lengths; // ascending
  double score = 0.0;          // |prod(L_i / 2) - measure| / measure
  double power = 0.0;          // combined peak power
};

enum class ReconstructionStatus { success, ambiguous };

inline std::string_view to_string(ReconstructionStatus s) {
  return s == ReconstructionStatus::success ? "success" : "ambiguous";
}

struct ReconstructionReport {
  int dim = 2;
  ReconstructionStatus status = ReconstructionStatus::success;
  std::vector<double> sides; // ascending; empty unless status is success
  double measure_hat = 0.0;
  double aspect_ratio = 0.0; // shortest / longest side
  double pair_score = 0.0;
  std::vector<Peak> peaks;
  std::vector<SideCandidate> alternatives;
  WeylFit fit;
  std::optional<LengthGrid> grid;
  std::vector<std::string> warnings;

  std::optional<double> a_hat() const { return side(0); }
  std::optional<double> b_hat() const { return side(1); }
  std::optional<double> c_hat() const { return side(2); }

private:
  std::optional<double> side(std::size_t i) const {
    if (i < sides.size()) return sides[i];
    return std::nullopt;
  }
};

/// Best candidate exceeded the pair tolerance. Carries the top-ranked
/// alternatives and, when raised by the pipeline, the partial report.
class ambiguity_error : public error {
public:
  ambiguity_error(const std::string& what, std::vector<SideCandidate> candidates)
      : error(what), candidates_(std::move(candidates)) {}

  const std::vector<SideCandidate>& candidates() const noexcept { return candidates_; }
  const std::optional<ReconstructionReport>& report() const noexcept { return report_; }
  void attach_report(ReconstructionReport r) { report_ = std::move(r); }

private:
  std::vector<SideCandidate> candidates_;
  std::optional<ReconstructionReport> report_;
};

namespace detail {

inline constexpr double kScoreTieTolerance = 1e-9;

inline bool ranks_before(const SideCandidate& x, const SideCandidate& y) {
  if (x.score != y.score) return x.score < y.score;
  if (x.power != y.power) return x.power > y.power;
  return x.lengths < y.lengths;
}

inline void enumerate_multisets(const std::vector<Peak>& peaks, std::size_t arity,
                                double measure, std::vector<SideCandidate>& out) {
  std::vector<std::size_t> idx(arity, 0);
  const std::size_t n = peaks.size();
  const double divisor = std::pow(2.0, static_cast<double>(arity));
  while (true) {
    SideCandidate c;
    double product = 1.0;
    for (std::size_t i : idx) {
      c.lengths.push_back(peaks[i].location);
      c.power += peaks[i].power;
      product *= peaks[i].location;
    }
    std::sort(c.lengths.begin(), c.lengths.end());
    c.score = std::abs(product / divisor - measure) / measure;
    out.push_back(std::move(c));

    // Next nondecreasing index tuple.
    std::size_t pos = arity;
    while (pos > 0 && idx[pos - 1] == n - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t k = pos; k < arity; ++k) idx[k] = idx[pos - 1];
  }
}

} // namespace detail

/// Scores every multiset of `arity` peaks (repeats allowed, so a square or a
/// cube can use one peak several times) and returns them best first.
inline std::vector<SideCandidate> rank_side_candidates(const std::vector<Peak>& peaks,
                                                       double measure_hat, std::size_t arity) {
  if (peaks.empty()) throw validation_error("side selection needs at least one peak");
  if (!(measure_hat > 0.0)) throw validation_error("measure estimate must be positive");
  if (arity != 2 && arity != 3) throw validation_error("side selection arity must be 2 or 3");
  std::vector<SideCandidate> all;
  detail::enumerate_multisets(peaks, arity, measure_hat, all);

  // Scores within 1e-9 of the minimum tie; ties go to the larger combined
  // power, then the lexicographically smaller lengths.
  double best = all.front().score;
  for (const auto& c : all) best = std::min(best, c.score);
  std::stable_partition(all.begin(), all.end(), [best](const SideCandidate& c) {
    return c.score - best <= detail::kScoreTieTolerance;
  });
  const auto tied_end = std::find_if(all.begin(), all.end(), [best](const SideCandidate& c) {
    return c.score - best > detail::kScoreTieTolerance;
  });
  std::sort(all.begin(), tied_end, [](const SideCandidate& x, const SideCandidate& y) {
    if (x.power != y.power) return x.power > y.power;
    return x.lengths < y.lengths;
  });
  std::stable_sort(tied_end, all.end(), detail::ranks_before);
  return all;
}

inline SideCandidate select_side_lengths(const std::vector<Peak>& peaks, double measure_hat,
                                         double tolerance, std::size_t arity) {
  auto ranked = rank_side_candidates(peaks, measure_hat, arity);
  if (ranked.front().score > tolerance) {
    if (ranked.size() > 3) ranked.resize(3);
    std::ostringstream msg;
    msg << "no " << (arity == 2 ? "pair" : "triple") << " of peaks matches the Weyl measure "
        << measure_hat << " within tolerance " << tolerance << " (best score "
        << ranked.front().score << ")";
    throw ambiguity_error(msg.str(), std::move(ranked));
  }
  return ranked.front();
}

/// Pair (L_short, L_long) minimizing |L1 L2 / 4 - area| / area.
inline SideCandidate select_side_pair(const std::vector<Peak>& peaks, double area_hat,
                                      double tolerance = 0.1) {
  return select_side_lengths(peaks, area_hat, tolerance, 2);
}

/// Triple minimizing |L1 L2 L3 / 8 - volume| / volume.
inline SideCandidate select_side_triple(const std::vector<Peak>& peaks, double volume_hat,
                                        double tolerance = 0.1) {
  return select_side_lengths(peaks, volume_hat, tolerance, 3);
}

namespace detail {

template <class Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (error& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  }
}

inline void add_warnings(ReconstructionReport& r, const SideCandidate& chosen) {
  const auto& L = chosen.lengths;
  if (std::adjacent_find(L.begin(), L.end()) != L.end())
    r.warnings.emplace_back("selected lengths coincide: equal-side (self-paired) solution");
  if (!r.peaks.empty()) {
    const double strongest = r.peaks.front().location;
    if (std::find(L.begin(), L.end(), strongest) == L.end())
      r.warnings.emplace_back("selected lengths do not include the strongest peak");
  }
  if (chosen.score > 0.02)
    r.warnings.emplace_back("side product deviates from the Weyl measure by more than 2%");
  if (r.fit.fit_count < 200)
    r.warnings.emplace_back("short Weyl-fit tail; measure estimate may be unreliable");
}

} // namespace detail

/// Intermediate products shared by reconstruction and length-spectrum export.
struct SpectralAnalysis {
  WeylFit fit;
  double measure_hat = 0.0;
  LengthSpectrum spectrum;
};

/// Weyl fit, fluctuations, window and S(L) on the configured (or automatic) grid.
inline SpectralAnalysis analyze_length_spectrum(const SpectrumSample& sample,
                                                const ReconstructionConfig& config = {}) {
  using detail::run_stage;
  run_stage("config", [&] { config.validate(); });
  run_stage("input", [&] { require_min_length(sample); });
  const int dim = sample.dim();

  const WeylFit fit = run_stage("weyl-fit", [&] {
    return fit_weyl_slope(sample, config.fit_start_fraction, config.smooth_model);
  });
  const double measure = estimate_measure(fit);
  return run_stage("length-spectrum", [&] {
    const LengthGrid grid = config.grid_for(dim, measure);
    const std::size_t window_begin =
        config.span_for(dim) == WindowSpan::fit_tail ? fit.fit_begin : 0;
    const auto series =
        apply_tail_window(fluctuations(sample, fit), config.window, window_begin);
    return SpectralAnalysis{fit, measure, evaluate_length_spectrum(series, grid, config.workers)};
  });
}

namespace detail {

inline ReconstructionReport reconstruct_impl(const SpectrumSample& sample,
                                             const ReconstructionConfig& config) {
  const int dim = sample.dim();
  const SpectralAnalysis analysis = analyze_length_spectrum(sample, config);
  const LengthSpectrum& spectrum = analysis.spectrum;

  ReconstructionReport report;
  report.dim = dim;
  report.fit = analysis.fit;
  report.measure_hat = analysis.measure_hat;
  report.grid = spectrum.grid;

  report.peaks = run_stage("peak-detection", [&] {
    auto peaks = find_peaks(spectrum, config.prominence_for(dim), config.max_peaks);
    if (peaks.empty()) throw peak_error("no length-spectrum peak clears the prominence threshold");
    return peaks;
  });

  SideCandidate chosen;
  try {
    chosen = run_stage("side-selection", [&] {
      return select_side_lengths(report.peaks, report.measure_hat, config.pair_tolerance,
                                 static_cast<std::size_t>(dim));
    });
  } catch (ambiguity_error& e) {
    report.status = ReconstructionStatus::ambiguous;
    report.alternatives = e.candidates();
    report.pair_score = e.candidates().front().score;
    report.warnings.emplace_back(e.what());
    e.attach_report(report);
    throw;
  }

  for (double L : chosen.lengths) report.sides.push_back(0.5 * L);
  report.pair_score = chosen.score;
  report.aspect_ratio = report.sides.front() / report.sides.back();
  add_warnings(report, chosen);
  return report;
}

} // namespace detail

/// Full 2-D pipeline: Weyl fit, fluctuations, window, S(L), peaks, pair.
inline ReconstructionReport reconstruct_rectangle(const SpectrumSample& sample,
                                                  const ReconstructionConfig& config = {}) {
  if (sample.dim() != 2) throw validation_error("reconstruct_rectangle needs a 2-D sample");
  return detail::reconstruct_impl(sample, config);
}

/// 3-D pipeline: lambda^{3/2} Weyl fit for the volume, triple selection.
inline ReconstructionReport reconstruct_box(const SpectrumSample& sample,
                                            const ReconstructionConfig& config = {}) {
  if (sample.dim() != 3) throw validation_error("reconstruct_box needs a 3-D sample");
  return detail::reconstruct_impl(sample, config);
}

inline ReconstructionReport reconstruct(const SpectrumSample& sample,
                                        const ReconstructionConfig& config = {}) {
  return detail::reconstruct_impl(sample, config);
}

} // namespace weylshape
