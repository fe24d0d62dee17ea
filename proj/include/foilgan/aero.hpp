#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "foilgan/geometry.hpp"

namespace foilgan {

struct FlowCondition {
  double alpha_deg = 5.0;
  double reynolds = 3.0e6;

  // Throws std::invalid_argument unless alpha is finite and reynolds > 0.
  void validate() const;
};

enum class SolveStatus { converged, non_converged };

struct ClResult {
  SolveStatus status = SolveStatus::non_converged;
  std::optional<double> cl;
  std::vector<std::string> diagnostics;

  bool converged() const { return status == SolveStatus::converged; }

  static ClResult success(double cl) { return {SolveStatus::converged, cl, {}}; }
  static ClResult failure(std::vector<std::string> diagnostics) {
    return {SolveStatus::non_converged, std::nullopt, std::move(diagnostics)};
  }

  friend bool operator==(const ClResult&, const ClResult&) = default;
};

// Linear-strength vortex panel thresholds.
inline constexpr double kMaxConditionNumber = 1e12;
inline constexpr double kKuttaTolerance = 1e-8;

// Inviscid linear-vortex panel method, one panel per pair of consecutive
// contour points, Kutta condition at the trailing edge. Never throws for
// any coordinate input; failures come back as non_converged.
ClResult panel_cl(const AirfoilShape& shape, const FlowCondition& cond);

// Raised for a misconfigured external solver (missing executable, etc.),
// as opposed to a solve that ran and did not converge.
class SolverConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct XfoilOptions {
  std::filesystem::path executable;
  std::chrono::duration<double> timeout{30.0};
  int iterations = 100;
  bool viscous = true;
};

// Name of the environment variable consulted for the XFoil executable.
inline constexpr const char* kXfoilEnvVar = "FOILGAN_XFOIL";

// Writes the coordinate file into a per-call temporary directory, drives the
// executable in batch mode and parses the last reported CL.
ClResult xfoil_cl(const AirfoilShape& shape, const FlowCondition& cond, const XfoilOptions& options);

// Parses XFoil console output. Exposed for tests.
ClResult parse_xfoil_output(const std::string& output);

// Coordinate file: name line, then "x y" per point.
void write_coordinate_file(const std::filesystem::path& path, const AirfoilShape& shape, const std::string& name);
AirfoilShape read_coordinate_file(const std::filesystem::path& path);

class ClBackend {
 public:
  virtual ~ClBackend() = default;
  virtual ClResult evaluate(const AirfoilShape& shape, const FlowCondition& cond) const = 0;
  virtual std::string id() const = 0;
};

class PanelBackend final : public ClBackend {
 public:
  ClResult evaluate(const AirfoilShape& shape, const FlowCondition& cond) const override {
    return panel_cl(shape, cond);
  }
  std::string id() const override { return "panel-linear-vortex"; }
};

class XfoilBackend final : public ClBackend {
 public:
  // Throws SolverConfigError if the executable does not exist or is not runnable.
  explicit XfoilBackend(XfoilOptions options);

  ClResult evaluate(const AirfoilShape& shape, const FlowCondition& cond) const override {
    return xfoil_cl(shape, cond, options_);
  }
  std::string id() const override { return "xfoil"; }

 private:
  XfoilOptions options_;
};

// "panel" or "xfoil"; for xfoil an empty path falls back to the environment variable.
std::unique_ptr<ClBackend> make_backend(const std::string& name, const XfoilOptions& xfoil = {});

}  // namespace foilgan
