#include "foilgan/aero.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace foilgan {

void FlowCondition::validate() const {
  if (!std::isfinite(alpha_deg)) throw std::invalid_argument("angle of attack must be finite");
  if (!(reynolds > 0.0) || !std::isfinite(reynolds)) throw std::invalid_argument("Reynolds number must be positive");
}

namespace {

constexpr double kInv2Pi = 0.5 / std::numbers::pi;

struct Panel {
  double x0, y0;  // start node
  double tx, ty;  // unit tangent
  double length;
  double xm, ym;  // collocation point
};

// Velocity (in the panel frame) at local point (x, z) induced by a linear
// vortex distribution of unit strength at the start node (a) and end node (b).
// Vorticity is clockwise-positive.
struct NodeVelocities {
  double ua, wa, ub, wb;
};

NodeVelocities linear_vortex_influence(double x, double z, double len) {
  const double r1sq = x * x + z * z;
  const double r2sq = (x - len) * (x - len) + z * z;
  const double dtheta = std::atan2(z, x - len) - std::atan2(z, x);
  const double log_r2_r1 = 0.5 * std::log(r2sq / r1sq);

  const double i0u = dtheta;
  const double i1u = x * dtheta + z * log_r2_r1;
  const double i0w = log_r2_r1;
  const double i1w = x * log_r2_r1 + len - z * dtheta;

  return {kInv2Pi * (i0u - i1u / len), kInv2Pi * (i0w - i1w / len), kInv2Pi * (i1u / len),
          kInv2Pi * (i1w / len)};
}

std::string format_double(const char* label, double v) {
  std::ostringstream os;
  os << label << ' ' << v;
  return os.str();
}

}  // namespace

ClResult panel_cl(const AirfoilShape& shape, const FlowCondition& cond) {
  if (!std::isfinite(cond.alpha_deg)) return ClResult::failure({"non-finite angle of attack"});

  const ValidityVerdict verdict = validate_contour(shape);
  if (!verdict.valid()) {
    std::vector<std::string> diagnostics;
    for (auto v : verdict.violations) diagnostics.emplace_back(to_string(v));
    return ClResult::failure(std::move(diagnostics));
  }

  const std::size_t nodes = shape.size();
  const std::size_t n_panels = nodes - 1;

  std::vector<Panel> panels(n_panels);
  for (std::size_t k = 0; k < n_panels; ++k) {
    const double dx = shape.x(k + 1) - shape.x(k);
    const double dy = shape.y(k + 1) - shape.y(k);
    const double len = std::hypot(dx, dy);
    panels[k] = {shape.x(k), shape.y(k), dx / len, dy / len, len,
                 0.5 * (shape.x(k) + shape.x(k + 1)), 0.5 * (shape.y(k) + shape.y(k + 1))};
  }

  const double alpha = cond.alpha_deg * std::numbers::pi / 180.0;
  const double vx = std::cos(alpha);
  const double vy = std::sin(alpha);

  // Rows 0..n_panels-1: zero normal velocity at each collocation point.
  // Last row: Kutta condition gamma_first + gamma_last = 0.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(nodes));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes));

  for (std::size_t i = 0; i < n_panels; ++i) {
    const Panel& pi = panels[i];
    // Outward normal for counter-clockwise ordering is the right-hand normal.
    const double nx = pi.ty;
    const double ny = -pi.tx;
    const auto row = static_cast<Eigen::Index>(i);
    rhs(row) = -(vx * nx + vy * ny);

    for (std::size_t k = 0; k < n_panels; ++k) {
      const auto ca = static_cast<Eigen::Index>(k);
      if (k == i) {
        // Only the panel-normal component survives on the panel itself.
        a(row, ca) += kInv2Pi;
        a(row, ca + 1) -= kInv2Pi;
        continue;
      }
      const Panel& pk = panels[k];
      const double dx = pi.xm - pk.x0;
      const double dy = pi.ym - pk.y0;
      const double lx = dx * pk.tx + dy * pk.ty;
      const double lz = -dx * pk.ty + dy * pk.tx;
      const NodeVelocities v = linear_vortex_influence(lx, lz, pk.length);
      // Panel frame axes: t = (tx, ty), k = (-ty, tx).
      const double t_dot_n = pk.tx * nx + pk.ty * ny;
      const double k_dot_n = -pk.ty * nx + pk.tx * ny;
      a(row, ca) += v.ua * t_dot_n + v.wa * k_dot_n;
      a(row, ca + 1) += v.ub * t_dot_n + v.wb * k_dot_n;
    }
  }
  const auto kutta = static_cast<Eigen::Index>(n_panels);
  a(kutta, 0) = 1.0;
  a(kutta, kutta) = 1.0;

  if (!a.allFinite()) return ClResult::failure({"non-finite influence coefficients"});

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > kMaxConditionNumber) {
    return ClResult::failure({"ill-conditioned influence matrix", format_double("condition estimate", 1.0 / rcond)});
  }

  Eigen::VectorXd gamma = lu.solve(rhs);
  auto kutta_residual = [&] {
    const double scale = std::max(1.0, gamma.cwiseAbs().maxCoeff());
    return std::abs(gamma(0) + gamma(kutta)) / scale;
  };
  for (int refine = 0; refine < 3 && gamma.allFinite() && kutta_residual() >= kKuttaTolerance; ++refine) {
    gamma += lu.solve(rhs - a * gamma);
  }
  if (!gamma.allFinite()) return ClResult::failure({"non-finite vortex strengths"});
  if (const double res = kutta_residual(); res >= kKuttaTolerance) {
    return ClResult::failure({"Kutta residual above tolerance", format_double("residual", res)});
  }

  double circulation = 0.0;
  for (std::size_t k = 0; k < n_panels; ++k) {
    const auto ck = static_cast<Eigen::Index>(k);
    circulation += 0.5 * panels[k].length * (gamma(ck) + gamma(ck + 1));
  }

  // Chord: trailing edge to the farthest contour point.
  const double xte = 0.5 * (shape.x(0) + shape.x(nodes - 1));
  const double yte = 0.5 * (shape.y(0) + shape.y(nodes - 1));
  double chord = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) chord = std::max(chord, std::hypot(shape.x(k) - xte, shape.y(k) - yte));

  const double cl = 2.0 * circulation / chord;
  if (!std::isfinite(cl)) return ClResult::failure({"non-finite lift coefficient"});
  return ClResult::success(cl);
}

}  // namespace foilgan
