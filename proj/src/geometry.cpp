#include "foilgan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace foilgan {

Naca4Code::Naca4Code(int camber_digit, int position_digit, int thickness_digits)
    : camber_digit_(camber_digit), position_digit_(position_digit), thickness_digits_(thickness_digits) {
  if (camber_digit < 0 || camber_digit > 9 || position_digit < 0 || position_digit > 9) {
    throw std::invalid_argument("NACA camber digits must be in 0..9");
  }
  if (thickness_digits < 1 || thickness_digits > 99) {
    throw std::invalid_argument("NACA thickness must be in 01..99");
  }
}

Naca4Code Naca4Code::parse(std::string_view digits) {
  if (digits.size() != 4 || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw std::invalid_argument("NACA code must be four digits: '" + std::string(digits) + "'");
  }
  return {digits[0] - '0', digits[1] - '0', (digits[2] - '0') * 10 + (digits[3] - '0')};
}

Naca4Code Naca4Code::from_number(int number) {
  if (number < 0 || number > 9999) throw std::invalid_argument("NACA code number out of range");
  return {number / 1000, (number / 100) % 10, number % 100};
}

std::string Naca4Code::str() const {
  std::string s(4, '0');
  s[0] = static_cast<char>('0' + camber_digit_);
  s[1] = static_cast<char>('0' + position_digit_);
  s[2] = static_cast<char>('0' + thickness_digits_ / 10);
  s[3] = static_cast<char>('0' + thickness_digits_ % 10);
  return s;
}

AirfoilShape::AirfoilShape(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.size() % 2 != 0) throw std::invalid_argument("shape vector length must be even");
}

AirfoilShape::AirfoilShape(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("x and y blocks differ in length");
  coords_.reserve(2 * xs.size());
  coords_.insert(coords_.end(), xs.begin(), xs.end());
  coords_.insert(coords_.end(), ys.begin(), ys.end());
}

double naca4_half_thickness(double thickness, double x) {
  return 5.0 * thickness *
         (0.2969 * std::sqrt(x) + x * (-0.1260 + x * (-0.3516 + x * (0.2843 + x * -0.1036))));
}

CamberPoint naca4_camber(const Naca4Code& code, double x) {
  const double m = code.max_camber();
  const double p = code.camber_position();
  if (m == 0.0) return {0.0, 0.0};
  if (x < p) {
    const double k = m / (p * p);
    return {k * (2.0 * p * x - x * x), 2.0 * k * (p - x)};
  }
  const double q = 1.0 - p;
  const double k = m / (q * q);
  return {k * ((1.0 - 2.0 * p) + 2.0 * p * x - x * x), 2.0 * k * (p - x)};
}

AirfoilShape naca4_surface(const Naca4Code& code, std::size_t n_points) {
  if (n_points % 2 != 0 || n_points < 120) {
    throw std::invalid_argument("n_points must be even and at least 120");
  }
  const double t = code.thickness();
  if (!(t > 0.0)) throw std::invalid_argument("thickness must be positive");

  std::vector<double> coords(2 * n_points);
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(n_points - 1);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double phi = dphi * static_cast<double>(k);
    const double xc = 0.5 * (1.0 + std::cos(phi));
    const double yt = naca4_half_thickness(t, xc);
    const auto [yc, slope] = naca4_camber(code, xc);
    const double theta = std::atan(slope);
    // Upper surface for phi < pi, lower surface after.
    const double side = (2 * k < n_points) ? 1.0 : -1.0;
    coords[k] = xc - side * yt * std::sin(theta);
    coords[n_points + k] = yc + side * yt * std::cos(theta);
  }
  return AirfoilShape(std::move(coords));
}

std::string_view to_string(ContourViolation v) {
  switch (v) {
    case ContourViolation::open_contour: return "open contour";
    case ContourViolation::self_intersection: return "self-intersection";
    case ContourViolation::duplicate_points: return "duplicate adjacent points";
    case ContourViolation::x_out_of_range: return "x outside [-0.05, 1.05]";
    case ContourViolation::reversed_orientation: return "reversed orientation";
    case ContourViolation::non_finite: return "non-finite coordinates";
  }
  return "unknown";
}

bool ValidityVerdict::has(ContourViolation v) const {
  return std::find(violations.begin(), violations.end(), v) != violations.end();
}

double signed_area(const AirfoilShape& shape) {
  const std::size_t n = shape.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    twice += shape.x(i) * shape.y(j) - shape.x(j) * shape.y(i);
  }
  return 0.5 * twice;
}

namespace {

struct Point {
  double x;
  double y;
};

int orientation(Point a, Point b, Point c) {
  const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point a, Point b, Point c, Point d) {
  if (std::max(a.x, b.x) < std::min(c.x, d.x) || std::max(c.x, d.x) < std::min(a.x, b.x) ||
      std::max(a.y, b.y) < std::min(c.y, d.y) || std::max(c.y, d.y) < std::min(a.y, b.y)) {
    return false;
  }
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
         (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

// Adjacent segments a->b, b->c fold back onto each other.
bool folds_back(Point a, Point b, Point c) {
  if (orientation(a, b, c) != 0) return false;
  return (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y) < 0.0;
}

}  // namespace

bool has_self_intersection(const AirfoilShape& shape) {
  const std::size_t n = shape.size();
  if (n < 4) return false;
  const std::size_t segments = n - 1;
  const bool closed = std::hypot(shape.x(0) - shape.x(n - 1), shape.y(0) - shape.y(n - 1)) <= kClosureTolerance;
  auto pt = [&](std::size_t i) { return Point{shape.x(i), shape.y(i)}; };

  for (std::size_t i = 0; i + 1 < segments; ++i) {
    if (folds_back(pt(i), pt(i + 1), pt(i + 2))) return true;
  }
  if (closed && folds_back(pt(n - 2), pt(0), pt(1))) return true;

  for (std::size_t i = 0; i < segments; ++i) {
    const Point a = pt(i);
    const Point b = pt(i + 1);
    for (std::size_t j = i + 2; j < segments; ++j) {
      if (closed && i == 0 && j == segments - 1) continue;
      if (segments_touch(a, b, pt(j), pt(j + 1))) return true;
    }
  }
  return false;
}

ValidityVerdict validate_contour(const AirfoilShape& shape) {
  ValidityVerdict verdict;
  const std::size_t n = shape.size();
  if (n < 4) {
    verdict.violations.push_back(ContourViolation::open_contour);
    return verdict;
  }
  const auto coords = shape.coords();
  if (!std::all_of(coords.begin(), coords.end(), [](double v) { return std::isfinite(v); })) {
    verdict.violations.push_back(ContourViolation::non_finite);
    return verdict;
  }

  if (std::hypot(shape.x(0) - shape.x(n - 1), shape.y(0) - shape.y(n - 1)) > kClosureTolerance) {
    verdict.violations.push_back(ContourViolation::open_contour);
  }
  if (has_self_intersection(shape)) verdict.violations.push_back(ContourViolation::self_intersection);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::hypot(shape.x(i + 1) - shape.x(i), shape.y(i + 1) - shape.y(i)) < kMinPointSpacing) {
      verdict.violations.push_back(ContourViolation::duplicate_points);
      break;
    }
  }
  const auto xs = shape.xs();
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (*lo < kMinX || *hi > kMaxX) verdict.violations.push_back(ContourViolation::x_out_of_range);
  if (!(signed_area(shape) > 0.0)) verdict.violations.push_back(ContourViolation::reversed_orientation);
  return verdict;
}

}  // namespace foilgan
