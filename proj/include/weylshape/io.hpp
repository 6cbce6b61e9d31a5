#pragma once

// Serialization: JSON reports, length-spectrum CSV, and a single SVG line
// chart of S(L) with detected peaks marked.

#include "weylshape/lengthspec.hpp"
#include "weylshape/reconstruct.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace weylshape {

inline nlohmann::json to_json(const WeylFit& fit) {
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"boundary_coefficient", fit.boundary},
          {"model", std::string(to_string(fit.model))},
          {"fraction", fit.fit_start_fraction},
          {"residual_rms", fit.residual_rms},
          {"tail_points", fit.fit_count}};
}

inline nlohmann::json to_json(const Peak& p) {
  return {{"L", p.location}, {"power", p.power}, {"prominence", p.prominence}};
}

inline nlohmann::json to_json(const ReconstructionReport& r) {
  auto optional_number = [](std::optional<double> v) -> nlohmann::json {
    if (v) return *v;
    return nullptr;
  };
  nlohmann::json j;
  j["status"] = std::string(to_string(r.status));
  j["dim"] = r.dim;
  j["a_hat"] = optional_number(r.a_hat());
  j["b_hat"] = optional_number(r.b_hat());
  if (r.dim == 3) j["c_hat"] = optional_number(r.c_hat());
  j["measure_hat"] = r.measure_hat;
  if (r.status == ReconstructionStatus::success)
    j["aspect_ratio"] = r.aspect_ratio;
  else
    j["aspect_ratio"] = nullptr;
  j["pair_score"] = r.pair_score;
  j["peaks"] = nlohmann::json::array();
  for (const auto& p : r.peaks) j["peaks"].push_back(to_json(p));
  j["fit"] = to_json(r.fit);
  if (r.grid)
    j["grid"] = {{"l_min", r.grid->l_min()}, {"l_max", r.grid->l_max()}, {"steps", r.grid->steps()}};
  if (!r.alternatives.empty()) {
    j["alternatives"] = nlohmann::json::array();
    for (const auto& c : r.alternatives)
      j["alternatives"].push_back({{"lengths", c.lengths}, {"score", c.score}, {"power", c.power}});
  }
  j["warnings"] = r.warnings;
  return j;
}

inline std::string format_number(double v, int significant) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, v);
  return buf;
}

/// Header `L,S`, one row per grid point, 12 significant digits.
inline void write_length_spectrum_csv(std::ostream& out, const LengthSpectrum& spec) {
  out << "L,S\n";
  for (std::size_t j = 0; j < spec.power.size(); ++j)
    out << format_number(spec.grid.at(j), 12) << ',' << format_number(spec.power[j], 12) << '\n';
}

inline void write_length_spectrum_svg(std::ostream& out, const LengthSpectrum& spec,
                                      const std::vector<Peak>& peaks) {
  constexpr double width = 900.0, height = 420.0;
  constexpr double left = 60.0, right = 20.0, top = 20.0, bottom = 50.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double lo = spec.grid.l_min();
  const double hi = spec.grid.l_max();
  double top_power = 0.0;
  for (double p : spec.power) top_power = std::max(top_power, p);
  if (!(top_power > 0.0)) top_power = 1.0;

  auto x_of = [&](double L) { return left + (L - lo) / (hi - lo) * plot_w; };
  auto y_of = [&](double p) { return top + plot_h * (1.0 - p / top_power); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\"/>\n</g>\n";

  out << "<g font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">\n";
  for (int t = 0; t <= 8; ++t) {
    const double L = lo + (hi - lo) * t / 8.0;
    out << "<text x=\"" << format_number(x_of(L), 6) << "\" y=\"" << top + plot_h + 16 << "\">"
        << format_number(L, 3) << "</text>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10 << "\">L</text>\n";
  out << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 18 "
      << top + plot_h / 2 << ")\">S(L) / max</text>\n</g>\n";

  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\" points=\"";
  for (std::size_t j = 0; j < spec.power.size(); ++j) {
    if (j) out << ' ';
    out << format_number(x_of(spec.grid.at(j)), 7) << ',' << format_number(y_of(spec.power[j]), 7);
  }
  out << "\"/>\n";

  out << "<g fill=\"crimson\" font-family=\"sans-serif\" font-size=\"10\">\n";
  for (const auto& p : peaks) {
    const double x = x_of(p.location);
    const double y = y_of(p.power);
    out << "<circle cx=\"" << format_number(x, 7) << "\" cy=\"" << format_number(y, 7)
        << "\" r=\"3\"/>\n<text x=\"" << format_number(x + 4, 7) << "\" y=\""
        << format_number(y - 4, 7) << "\">" << format_number(p.location, 5) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
}

} // namespace weylshape
