#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace weylshape {

/// Base of every error raised by the library. The pipeline tags errors with
/// the stage they escaped from so callers can report where inversion failed.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}

  const std::string& stage() const noexcept { return stage_; }
  void set_stage(std::string stage) { stage_ = std::move(stage); }

private:
  std::string stage_;
};

/// Invalid argument, geometry, configuration or sample contents.
class validation_error : public error {
public:
  using error::error;
};

/// Too few eigenvalues for the requested operation.
class size_error : public validation_error {
public:
  using validation_error::validation_error;
};

/// Malformed eigenvalue file.
class parse_error : public error {
public:
  parse_error(const std::string& what, std::size_t line)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// A generator request would read past the provably complete prefix of the
/// enumerated spectrum.
class completeness_error : public error {
public:
  using error::error;
};

/// Least-squares fit could not be formed (degenerate design, too few points).
class fit_error : public error {
public:
  using error::error;
};

/// No length-spectrum peak cleared the detection threshold.
class peak_error : public error {
public:
  using error::error;
};

} // namespace weylshape
