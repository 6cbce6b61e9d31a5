#include "weylshape/lengthspec.hpp"
#include "weylshape/reconstruct.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace weylshape;

namespace {

FluctuationSeries single_tone(double L0) {
  const auto& s = fixtures::benchmark();
  FluctuationSeries f;
  for (double v : s.values()) {
    f.sqrt_values.push_back(std::sqrt(v));
    f.fluct.push_back(std::cos(L0 * std::sqrt(v)));
  }
  f.weights.assign(f.fluct.size(), 1.0);
  return apply_window(std::move(f), WindowKind::hann);
}

FluctuationSeries benchmark_series(const ReconstructionConfig& config = {}) {
  const auto& s = fixtures::benchmark();
  const auto fit = fit_weyl_slope(s, config.fit_start_fraction, config.smooth_model);
  const std::size_t begin = config.span_for(2) == WindowSpan::fit_tail ? fit.fit_begin : 0;
  return apply_tail_window(fluctuations(s, fit), config.window, begin);
}

const LengthGrid kBenchmarkGrid{0.5, 8.0, 4096};

bool has_peak_near(const std::vector<Peak>& peaks, double L, double tol) {
  return std::any_of(peaks.begin(), peaks.end(),
                     [&](const Peak& p) { return std::abs(p.location - L) <= tol; });
}

} // namespace

TEST(ApplyWindow, RectangularIsIdentity) {
  auto f = benchmark_series();
  const auto before = f.fluct;
  f = apply_window(std::move(f), WindowKind::rectangular);
  for (double w : f.weights) ASSERT_EQ(w, 1.0);
  EXPECT_EQ(f.fluct, before);
}

TEST(ApplyWindow, HannClosedForms) {
  FluctuationSeries three{{1, 2, 3}, {0.5, -0.5, 1}, {1, 1, 1}};
  three = apply_window(three, WindowKind::hann);
  EXPECT_EQ(three.weights[0], 0.0);
  EXPECT_NEAR(three.weights[1], 1.0, 1e-15);
  EXPECT_EQ(three.weights[2], 0.0);
  EXPECT_EQ(three.fluct[1], -0.5);

  FluctuationSeries five{{1, 2, 3, 4, 5}, {1, 1, 1, 1, 1}, {1, 1, 1, 1, 1}};
  five = apply_window(five, WindowKind::hann);
  const double expected[] = {0.0, 0.5, 1.0, 0.5, 0.0};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(five.weights[i], expected[i], 1e-15) << i;
}

TEST(ApplyWindow, TailWindowZeroesTheHead) {
  FluctuationSeries f{{1, 2, 3, 4, 5, 6, 7}, {1, 1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 1, 1, 1}};
  f = apply_tail_window(f, WindowKind::hann, 2);
  EXPECT_EQ(f.weights[0], 0.0);
  EXPECT_EQ(f.weights[1], 0.0);
  const double expected[] = {0.0, 0.5, 1.0, 0.5, 0.0};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(f.weights[2 + i], expected[i], 1e-15);
  EXPECT_THROW(apply_tail_window(f, WindowKind::hann, 7), validation_error);
  EXPECT_THROW(apply_window(FluctuationSeries{}, WindowKind::hann), validation_error);
}

TEST(LengthGrid, Validation) {
  EXPECT_THROW(LengthGrid(0.0, 1.0, 100), validation_error);
  EXPECT_THROW(LengthGrid(2.0, 1.0, 100), validation_error);
  EXPECT_THROW(LengthGrid(0.5, 1.0, 63), validation_error);
  const LengthGrid g(0.5, 8.0, 4096);
  EXPECT_DOUBLE_EQ(g.at(0), 0.5);
  EXPECT_DOUBLE_EQ(g.at(4095), 8.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 7.5 / 4095.0);
}

TEST(EvaluateLengthSpectrum, NullSignal) {
  auto f = benchmark_series();
  std::fill(f.fluct.begin(), f.fluct.end(), 0.0);
  const auto spec = evaluate_length_spectrum(f, LengthGrid(0.5, 8.0, 128));
  for (double p : spec.power) ASSERT_EQ(p, 0.0);
}

TEST(EvaluateLengthSpectrum, MatchesComplexSumOracle) {
  const auto f = benchmark_series();
  std::vector<double> amp(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) amp[k] = f.weights[k] * f.fluct[k];
  const std::vector<double> lengths{0.7, 2.0, 3.3, 6.0, 6.3245};
  const auto power = evaluate_length_spectrum_at(f, lengths, 1);
  for (std::size_t j = 0; j < lengths.size(); ++j) {
    const double ref = oracle::power_at(lengths[j], f.sqrt_values, amp);
    EXPECT_NEAR(power[j], ref, 1e-9 * std::max(1.0, ref)) << lengths[j];
  }
}

TEST(EvaluateLengthSpectrum, SingleToneMaximum) {
  const auto f = single_tone(2.0);
  const auto spec = evaluate_length_spectrum(f, kBenchmarkGrid);
  const auto top = std::max_element(spec.power.begin(), spec.power.end()) - spec.power.begin();
  EXPECT_LE(std::abs(kBenchmarkGrid.at(static_cast<std::size_t>(top)) - 2.0), kBenchmarkGrid.spacing());
}

TEST(EvaluateLengthSpectrum, BenchmarkDominantPeaks) {
  const auto spec = evaluate_length_spectrum(benchmark_series(), kBenchmarkGrid);
  const auto peaks = find_peaks(spec, 0.05, 16);
  ASSERT_GE(peaks.size(), 2u);
  std::vector<double> top{peaks[0].location, peaks[1].location};
  std::sort(top.begin(), top.end());
  EXPECT_NEAR(top[0], 1.9968, 0.005);
  EXPECT_NEAR(top[1], 6.0032, 0.005);
}

TEST(EvaluateLengthSpectrum, WorkerCountDoesNotChangeResult) {
  const auto f = benchmark_series();
  const LengthGrid grid(0.5, 8.0, 512);
  const auto one = evaluate_length_spectrum(f, grid, 1);
  for (unsigned w : {2u, 3u, 8u}) EXPECT_EQ(evaluate_length_spectrum(f, grid, w).power, one.power);
}

TEST(EvaluateLengthSpectrum, PointwiseAndSignInvariant) {
  auto f = benchmark_series();
  const LengthGrid grid(0.5, 8.0, 256);
  auto lengths = grid.points();
  const auto forward = evaluate_length_spectrum_at(f, lengths);
  for (double p : forward) ASSERT_GE(p, 0.0);

  std::reverse(lengths.begin(), lengths.end());
  auto backward = evaluate_length_spectrum_at(f, lengths);
  std::reverse(backward.begin(), backward.end());
  EXPECT_EQ(backward, forward);

  for (auto& x : f.fluct) x = -x;
  EXPECT_EQ(evaluate_length_spectrum_at(f, grid.points()), forward);
}

TEST(FindPeaks, SingleToneGivesOnePeakAtDenseArgmax) {
  const auto f = single_tone(2.0);
  const auto spec = evaluate_length_spectrum(f, kBenchmarkGrid);
  const auto peaks = find_peaks(spec, 0.05, 16);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_NEAR(peaks[0].location, 2.0, kBenchmarkGrid.spacing());

  std::vector<double> amp(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) amp[k] = f.weights[k] * f.fluct[k];
  const double dense = oracle::dense_argmax(1.99, 2.01, f.sqrt_values, amp);
  EXPECT_NEAR(peaks[0].location, dense, 0.1 * kBenchmarkGrid.spacing());
  EXPECT_GE(peaks[0].power, peaks[0].prominence);
}

TEST(FindPeaks, MonotoneHasNoInteriorMaximum) {
  LengthSpectrum spec{LengthGrid(1.0, 2.0, 64), {}};
  for (int j = 0; j < 64; ++j) spec.power.push_back(j * j);
  EXPECT_TRUE(find_peaks(spec, 0.05, 16).empty());
}

TEST(FindPeaks, ProminenceUsesHigherSaddle) {
  // Peak of height 5 separated from a taller 10 by a saddle at 4: prominence 1.
  LengthSpectrum spec{LengthGrid(1.0, 2.0, 64), std::vector<double>(64, 0.0)};
  spec.power[10] = 5.0;
  for (int j = 11; j < 20; ++j) spec.power[j] = 4.0;
  spec.power[20] = 10.0;
  const auto all = find_peaks(spec, 0.01, 16);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].grid_index, 20u);
  EXPECT_DOUBLE_EQ(all[0].prominence, 10.0);
  EXPECT_EQ(all[1].grid_index, 10u);
  EXPECT_DOUBLE_EQ(all[1].prominence, 1.0);
  // 1 < 0.2 * 10, so the shoulder peak is filtered.
  EXPECT_EQ(find_peaks(spec, 0.2, 16).size(), 1u);
  EXPECT_EQ(find_peaks(spec, 0.01, 1).size(), 1u);
}

TEST(FindPeaks, BenchmarkContainsBothFundamentals) {
  const auto spec = evaluate_length_spectrum(benchmark_series(), kBenchmarkGrid);
  const auto peaks = find_peaks(spec, 0.05, 16);
  EXPECT_TRUE(has_peak_near(peaks, 1.9968, 0.02));
  EXPECT_TRUE(has_peak_near(peaks, 6.0032, 0.02));
  for (std::size_t i = 1; i < peaks.size(); ++i) EXPECT_GE(peaks[i - 1].power, peaks[i].power);
}

TEST(FindPeaks, Validation) {
  LengthSpectrum spec{LengthGrid(1.0, 2.0, 64), std::vector<double>(64, 1.0)};
  EXPECT_THROW(find_peaks(spec, 0.0, 16), validation_error);
  EXPECT_THROW(find_peaks(spec, 0.1, 0), validation_error);
  EXPECT_TRUE(find_peaks(spec, 0.1, 4).empty());
}

TEST(OrbitLengths, FundamentalsAndDiagonal) {
  const auto rect = orbit_lengths(RectangleGeometry{1.0, 3.0}, 1, 100.0);
  ASSERT_EQ(rect.size(), 3u);
  EXPECT_DOUBLE_EQ(rect[0].length, 2.0);
  EXPECT_EQ(rect[0].indices[0], 1u);
  EXPECT_DOUBLE_EQ(rect[1].length, 6.0);
  EXPECT_EQ(rect[1].indices[1], 1u);
  const auto square = orbit_lengths(RectangleGeometry{1.0, 1.0}, 1, 100.0);
  EXPECT_DOUBLE_EQ(square.back().length, 2.0 * std::sqrt(2.0));
}

TEST(OrbitLengths, EnumerationUpToIndexTwo) {
  const auto o = orbit_lengths(RectangleGeometry{1.0, 3.0}, 2, 13.0);
  const std::vector<double> expected{2.0,
                                     4.0,
                                     6.0,
                                     2.0 * std::sqrt(10.0),
                                     2.0 * std::sqrt(13.0),
                                     12.0,
                                     2.0 * std::sqrt(37.0),
                                     4.0 * std::sqrt(10.0)};
  ASSERT_EQ(o.size(), expected.size());
  for (std::size_t i = 0; i < o.size(); ++i) {
    EXPECT_NEAR(o[i].length, expected[i], 1e-12) << i;
    const double x = o[i].indices[0] * 1.0, y = o[i].indices[1] * 3.0;
    EXPECT_EQ(o[i].length, 2.0 * std::sqrt(x * x + y * y));
  }
}

TEST(OrbitLengths, Box) {
  const auto o = orbit_lengths(BoxGeometry{1.0, 2.0, 3.0}, 1, 7.0);
  ASSERT_GE(o.size(), 4u);
  EXPECT_DOUBLE_EQ(o[0].length, 2.0);
  EXPECT_DOUBLE_EQ(o[1].length, 4.0);
  EXPECT_DOUBLE_EQ(o[2].length, 2.0 * std::sqrt(5.0)); // (1,1,0)
  EXPECT_DOUBLE_EQ(o[3].length, 6.0);
  EXPECT_THROW(orbit_lengths(BoxGeometry{1.0, 2.0, 3.0}, 0, 7.0), validation_error);
}

TEST(LengthSpectrumProperties, IndexOffsetIsAbsorbedByTheRefit) {
  // A constant shift of the eigenvalue index (missing leading values) is
  // absorbed by the Weyl intercept, so the peaks stay within a grid cell.
  const ReconstructionConfig config;
  const auto& s = fixtures::benchmark();
  const auto base = find_peaks(evaluate_length_spectrum(benchmark_series(), kBenchmarkGrid), 0.05, 16);
  for (std::size_t drop : {10u, 50u}) {
    const auto d = s.drop_front(drop);
    const auto fit = fit_weyl_slope(d, 0.3, config.smooth_model);
    const auto f = apply_tail_window(fluctuations(d, fit), config.window, fit.fit_begin);
    const auto peaks = find_peaks(evaluate_length_spectrum(f, kBenchmarkGrid), 0.05, 16);
    for (double L : {2.0, 4.0, 6.0}) {
      auto near = [&](const std::vector<Peak>& ps) {
        return std::min_element(ps.begin(), ps.end(), [&](const Peak& x, const Peak& y) {
                 return std::abs(x.location - L) < std::abs(y.location - L);
               })->location;
      };
      EXPECT_NEAR(near(peaks), near(base), kBenchmarkGrid.spacing()) << drop << " " << L;
    }
  }
}

TEST(LengthSpectrumProperties, ConstantFluctuationShiftKeepsFundamentals) {
  // Adding c to every F_k adds c times the windowed density transform, which
  // itself peaks at orbit lengths; the fundamentals stay put to well under 0.5%.
  const auto base_series = benchmark_series();
  const auto base = find_peaks(evaluate_length_spectrum(base_series, kBenchmarkGrid), 0.05, 16);
  for (double c : {-100.0, -10.0, 10.0, 100.0}) {
    auto shifted = base_series;
    for (auto& x : shifted.fluct) x += c;
    const auto peaks = find_peaks(evaluate_length_spectrum(shifted, kBenchmarkGrid), 0.05, 16);
    for (double L : {2.0, 6.0}) {
      ASSERT_TRUE(has_peak_near(base, L, 0.005));
      EXPECT_TRUE(has_peak_near(peaks, L, 0.005)) << "c=" << c << " L=" << L;
    }
  }
}
