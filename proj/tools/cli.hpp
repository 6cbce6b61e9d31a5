#pragma once

// weylshape command line: generate | reconstruct | length-spectrum.
// Exit codes: 0 success, 2 input/config error, 3 unresolved reconstruction.

#include "weylshape/weylshape.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace weylshape::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitAmbiguous = 3;

namespace detail {

struct ConfigFlags {
  double fit_start_fraction = 0.3;
  std::string smooth_model = "three_term";
  std::string window = "hann";
  std::string window_span = "auto";
  std::optional<double> l_min;
  std::optional<double> l_max;
  std::size_t steps = 4096;
  std::optional<double> min_prominence;
  std::size_t max_peaks = 16;
  double pair_tolerance = 0.1;

  void attach(CLI::App& app, bool with_peaks) {
    app.add_option("--fit-start-fraction", fit_start_fraction,
                   "Start of the Weyl-fit tail as a fraction of the sample")
        ->capture_default_str();
    app.add_option("--smooth-model", smooth_model, "linear | three_term")->capture_default_str();
    app.add_option("--window", window, "rectangular | hann")->capture_default_str();
    app.add_option("--window-span", window_span, "auto | sample | fit_tail")->capture_default_str();
    app.add_option("--l-min", l_min, "Grid start (default 0.25)");
    app.add_option("--l-max", l_max, "Grid end (default 4 * measure^(1/dim))");
    app.add_option("--steps", steps, "Grid points")->capture_default_str();
    if (with_peaks) {
      app.add_option("--min-prominence", min_prominence,
                     "Peak prominence as a fraction of max S (default 0.05 2-D, 0.01 3-D)");
      app.add_option("--max-peaks", max_peaks, "Peaks kept for side selection")
          ->capture_default_str();
      app.add_option("--pair-tolerance", pair_tolerance,
                     "Relative area/volume mismatch accepted for the side pair")
          ->capture_default_str();
    }
  }

  ReconstructionConfig resolve() const {
    ReconstructionConfig c;
    c.fit_start_fraction = fit_start_fraction;
    c.smooth_model = parse_smooth_model(smooth_model);
    c.window = parse_window(window);
    c.window_span = parse_window_span(window_span);
    c.l_min = l_min;
    c.l_max = l_max;
    c.steps = steps;
    c.min_prominence = min_prominence;
    c.max_peaks = max_peaks;
    c.pair_tolerance = pair_tolerance;
    c.validate();
    return c;
  }
};

// Writes through `write` to a file, or to `out` when path is "-".
inline void emit(const std::string& path, std::ostream& out,
                 const std::function<void(std::ostream&)>& write) {
  if (path == "-") {
    write(out);
    out.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw validation_error("cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw validation_error("failed writing '" + path + "'");
}

inline SpectrumSample read_sample(const std::string& path, int dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open '" + path + "'");
  return load_spectrum(in, dim);
}

inline void check_dim(int dim) {
  if (dim != 2 && dim != 3) throw validation_error("--dim must be 2 or 3");
}

} // namespace detail

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recover rectangle and box side lengths from ordered Dirichlet eigenvalues"};
  app.name("weylshape");
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write the Dirichlet spectrum of a rectangle or box");
  double a = 1.0, b = 1.0;
  std::optional<double> c;
  int gen_dim = 2;
  std::size_t count = 0, skip = 0, index_cap = 800;
  std::string gen_out = "-";
  gen->add_option("--a", a, "First side")->required();
  gen->add_option("--b", b, "Second side")->required();
  gen->add_option("--c", c, "Third side (boxes)");
  gen->add_option("--dim", gen_dim, "2 or 3")->capture_default_str();
  gen->add_option("--count", count, "Eigenvalues to write")->required();
  gen->add_option("--skip", skip, "Leading eigenvalues to drop")->capture_default_str();
  gen->add_option("--index-cap", index_cap, "Largest mode index enumerated")
      ->capture_default_str();
  gen->add_option("-o,--output", gen_out, "Output file, '-' for stdout")->capture_default_str();

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Recover side lengths from an eigenvalue file");
  std::string rec_in, rec_out = "-";
  std::optional<std::string> rec_csv, rec_svg;
  int rec_dim = 2;
  detail::ConfigFlags rec_flags;
  rec->add_option("input", rec_in, "Eigenvalue file")->required();
  rec->add_option("--dim", rec_dim, "2 or 3")->capture_default_str();
  rec_flags.attach(*rec, true);
  rec->add_option("-o,--output", rec_out, "JSON report, '-' for stdout")->capture_default_str();
  rec->add_option("--csv", rec_csv, "Also write S(L) as CSV");
  rec->add_option("--svg", rec_svg, "Also write an SVG plot of S(L) with peaks");

  // length-spectrum
  auto* ls = app.add_subcommand("length-spectrum", "Export S(L) of an eigenvalue file as CSV");
  std::string ls_in, ls_out = "-";
  std::optional<std::string> ls_svg;
  int ls_dim = 2;
  detail::ConfigFlags ls_flags;
  ls->add_option("input", ls_in, "Eigenvalue file")->required();
  ls->add_option("--dim", ls_dim, "2 or 3")->capture_default_str();
  ls_flags.attach(*ls, false);
  ls->add_option("-o,--output,--csv", ls_out, "CSV output, '-' for stdout")->capture_default_str();
  ls->add_option("--svg", ls_svg, "Also write an SVG plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "weylshape: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (gen->parsed()) {
      const int dim = c ? 3 : gen_dim;
      detail::check_dim(dim);
      if (dim == 3 && !c) throw validation_error("--dim 3 needs --c");
      const SpectrumSample sample =
          dim == 2 ? generate_rectangle_spectrum({a, b}, count, skip, index_cap)
                   : generate_box_spectrum({a, b, *c}, count, skip, index_cap);
      detail::emit(gen_out, out, [&](std::ostream& os) { write_spectrum(os, sample); });
      return kExitOk;
    }

    if (rec->parsed()) {
      detail::check_dim(rec_dim);
      const ReconstructionConfig config = rec_flags.resolve();
      const SpectrumSample sample = detail::read_sample(rec_in, rec_dim);
      if (rec_csv || rec_svg) {
        const auto analysis = analyze_length_spectrum(sample, config);
        const auto peaks = find_peaks(analysis.spectrum, config.prominence_for(rec_dim),
                                      config.max_peaks);
        if (rec_csv)
          detail::emit(*rec_csv, out, [&](std::ostream& os) {
            write_length_spectrum_csv(os, analysis.spectrum);
          });
        if (rec_svg)
          detail::emit(*rec_svg, out, [&](std::ostream& os) {
            write_length_spectrum_svg(os, analysis.spectrum, peaks);
          });
      }
      try {
        const auto report = reconstruct(sample, config);
        detail::emit(rec_out, out, [&](std::ostream& os) { os << to_json(report).dump(2) << '\n'; });
        return kExitOk;
      } catch (const ambiguity_error& e) {
        if (e.report())
          detail::emit(rec_out, out,
                       [&](std::ostream& os) { os << to_json(*e.report()).dump(2) << '\n'; });
        err << "weylshape: ambiguous reconstruction: " << e.what() << '\n';
        return kExitAmbiguous;
      } catch (const peak_error& e) {
        err << "weylshape: " << e.stage() << ": " << e.what() << '\n';
        return kExitAmbiguous;
      }
    }

    if (ls->parsed()) {
      detail::check_dim(ls_dim);
      const ReconstructionConfig config = ls_flags.resolve();
      const SpectrumSample sample = detail::read_sample(ls_in, ls_dim);
      const auto analysis = analyze_length_spectrum(sample, config);
      detail::emit(ls_out, out,
                   [&](std::ostream& os) { write_length_spectrum_csv(os, analysis.spectrum); });
      if (ls_svg) {
        std::vector<Peak> peaks;
        try {
          peaks = find_peaks(analysis.spectrum, config.prominence_for(ls_dim), config.max_peaks);
        } catch (const error&) {
        }
        detail::emit(*ls_svg, out, [&](std::ostream& os) {
          write_length_spectrum_svg(os, analysis.spectrum, peaks);
        });
      }
      return kExitOk;
    }
  } catch (const completeness_error& e) {
    err << "weylshape: completeness guard (truncation_safe_cutoff): " << e.what() << '\n';
    return kExitInput;
  } catch (const error& e) {
    err << "weylshape: ";
    if (!e.stage().empty()) err << e.stage() << ": ";
    err << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

} // namespace weylshape::cli
