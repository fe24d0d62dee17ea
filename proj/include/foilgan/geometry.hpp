#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace foilgan {

// Every shape handled by the models is 248 surface points, stored as the
// x block followed by the y block.
inline constexpr std::size_t kSurfacePoints = 248;
inline constexpr std::size_t kShapeDim = 2 * kSurfacePoints;

// NACA 4-digit designation "MPTT": M = max camber (% chord), P = position of
// max camber (tenths of chord), TT = thickness (% chord).
class Naca4Code {
 public:
  Naca4Code(int camber_digit, int position_digit, int thickness_digits);

  // Accepts exactly four decimal digits, e.g. "2412".
  static Naca4Code parse(std::string_view digits);

  // Four-digit number 0..9999, e.g. 2412.
  static Naca4Code from_number(int number);

  double max_camber() const { return camber_digit_ / 100.0; }
  double camber_position() const { return position_digit_ / 10.0; }
  double thickness() const { return thickness_digits_ / 100.0; }

  int number() const { return camber_digit_ * 1000 + position_digit_ * 100 + thickness_digits_; }
  std::string str() const;

  bool symmetric() const { return camber_digit_ == 0; }

  friend bool operator==(const Naca4Code&, const Naca4Code&) = default;

 private:
  int camber_digit_;
  int position_digit_;
  int thickness_digits_;
};

// Closed contour of N points, ordered trailing edge -> upper surface ->
// leading edge -> lower surface -> trailing edge.
class AirfoilShape {
 public:
  AirfoilShape() = default;

  // coords = (x_1..x_N, y_1..y_N); size must be even.
  explicit AirfoilShape(std::vector<double> coords);
  AirfoilShape(std::span<const double> xs, std::span<const double> ys);

  std::size_t size() const { return coords_.size() / 2; }
  double x(std::size_t i) const { return coords_[i]; }
  double y(std::size_t i) const { return coords_[size() + i]; }

  std::span<const double> coords() const { return coords_; }
  std::span<const double> xs() const { return {coords_.data(), size()}; }
  std::span<const double> ys() const { return {coords_.data() + size(), size()}; }

  friend bool operator==(const AirfoilShape&, const AirfoilShape&) = default;

 private:
  std::vector<double> coords_;
};

// Half-thickness distribution with the closed trailing edge coefficient set.
double naca4_half_thickness(double thickness, double x);

struct CamberPoint {
  double y;
  double slope;
};

CamberPoint naca4_camber(const Naca4Code& code, double x);

// Cosine-spaced contour: station angle phi_k = 2*pi*k/(n-1), x = (1+cos phi)/2.
// Camber is applied perpendicular to the camber line.
AirfoilShape naca4_surface(const Naca4Code& code, std::size_t n_points = kSurfacePoints);

enum class ContourViolation {
  open_contour,
  self_intersection,
  duplicate_points,
  x_out_of_range,
  reversed_orientation,
  non_finite,
};

std::string_view to_string(ContourViolation v);

struct ValidityVerdict {
  std::vector<ContourViolation> violations;

  bool valid() const { return violations.empty(); }
  bool has(ContourViolation v) const;
};

inline constexpr double kClosureTolerance = 1e-6;
inline constexpr double kMinPointSpacing = 1e-7;
inline constexpr double kMinX = -0.05;
inline constexpr double kMaxX = 1.05;

ValidityVerdict validate_contour(const AirfoilShape& shape);

// Shoelace area; positive for the expected (counter-clockwise) ordering.
double signed_area(const AirfoilShape& shape);

// True if any two non-adjacent segments of the closed polyline touch.
bool has_self_intersection(const AirfoilShape& shape);

}  // namespace foilgan
