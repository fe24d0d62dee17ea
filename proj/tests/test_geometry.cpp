#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "foilgan/geometry.hpp"

using namespace foilgan;

TEST(Naca4Code, ParsesAndPrints) {
  const auto c = Naca4Code::parse("2412");
  EXPECT_DOUBLE_EQ(c.max_camber(), 0.02);
  EXPECT_DOUBLE_EQ(c.camber_position(), 0.4);
  EXPECT_DOUBLE_EQ(c.thickness(), 0.12);
  EXPECT_EQ(c.str(), "2412");
  EXPECT_EQ(Naca4Code::from_number(12).str(), "0012");
  EXPECT_TRUE(Naca4Code::from_number(12).symmetric());
}

TEST(Naca4Code, RejectsBadDigits) {
  EXPECT_THROW(Naca4Code::parse("24a2"), std::invalid_argument);
  EXPECT_THROW(Naca4Code::parse("241"), std::invalid_argument);
  EXPECT_THROW(Naca4Code::from_number(2400), std::invalid_argument);
  EXPECT_THROW(Naca4Code::from_number(10000), std::invalid_argument);
}

TEST(Naca4, HalfThicknessAtMaxThicknessStation) {
  EXPECT_NEAR(naca4_half_thickness(0.12, 0.30), 0.0600, 0.0005);
  EXPECT_NEAR(naca4_half_thickness(0.12, 1.0), 0.0, 1e-12);  // closed trailing edge
  EXPECT_DOUBLE_EQ(naca4_half_thickness(0.12, 0.0), 0.0);
}

TEST(Naca4, CamberPeakAtPosition) {
  const auto c = Naca4Code::parse("2412");
  EXPECT_NEAR(naca4_camber(c, 0.40).y, 0.02, 1e-9);
  EXPECT_NEAR(naca4_camber(c, 0.40).slope, 0.0, 1e-9);
  for (double x = 0.0; x <= 1.0; x += 0.01) EXPECT_LE(naca4_camber(c, x).y, 0.02 + 1e-12);
}

TEST(Naca4, CamberContinuousAtPosition) {
  for (int m = 1; m <= 9; ++m) {
    for (int p = 1; p <= 9; ++p) {
      const Naca4Code c(m, p, 12);
      const double xp = c.camber_position();
      const double h = 1e-12;
      EXPECT_NEAR(naca4_camber(c, xp - h).y, naca4_camber(c, xp + h).y, 1e-9);
      EXPECT_NEAR(naca4_camber(c, xp - h).slope, naca4_camber(c, xp + h).slope, 1e-9);
    }
  }
}

TEST(Naca4, SymmetricSurfaceMirrors) {
  const auto s = naca4_surface(Naca4Code::parse("0012"));
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    // Point i and n-1-i sit at the same station on opposite surfaces.
    EXPECT_NEAR(s.x(i), s.x(n - 1 - i), 1e-9);
    EXPECT_NEAR(s.y(i), -s.y(n - 1 - i), 1e-9);
  }
}

TEST(Naca4, SurfaceLayout) {
  const auto s = naca4_surface(Naca4Code::parse("4415"));
  ASSERT_EQ(s.size(), kSurfacePoints);
  EXPECT_EQ(s.coords().size(), kShapeDim);
  // TE -> upper -> LE -> lower -> TE
  EXPECT_NEAR(s.x(0), 1.0, 1e-12);
  EXPECT_NEAR(s.x(kSurfacePoints - 1), 1.0, 1e-12);
  EXPECT_GT(s.y(kSurfacePoints / 4), 0.0);
  EXPECT_LT(s.y(3 * kSurfacePoints / 4), 0.0);
  EXPECT_GT(signed_area(s), 0.0);
  const auto xs = s.xs();
  const double xmin = *std::min_element(xs.begin(), xs.end());
  EXPECT_LT(xmin, 1e-3);
  // Clustered at both ends.
  EXPECT_LT(s.x(0) - s.x(1), s.x(60) - s.x(61));
}

TEST(Naca4, SurfaceRejectsBadCounts) {
  EXPECT_THROW(naca4_surface(Naca4Code::parse("0012"), 247), std::invalid_argument);
  EXPECT_THROW(naca4_surface(Naca4Code::parse("0012"), 100), std::invalid_argument);
}

TEST(Validate, EveryCodeProducesValidContourOrOnlyXRange) {
  // Thick, highly cambered sections push the leading edge past x = -0.05;
  // nothing else may fail.
  std::size_t x_range = 0;
  for (int number = 1; number <= 9999; ++number) {
    if (number % 100 == 0) continue;
    const auto code = Naca4Code::from_number(number);
    const auto v = validate_contour(naca4_surface(code));
    for (auto kind : v.violations) {
      ASSERT_EQ(kind, ContourViolation::x_out_of_range) << code.str() << ": " << to_string(kind);
    }
    if (!v.valid()) ++x_range;
  }
  EXPECT_LT(x_range, 1000u);
}

TEST(Validate, ModerateSectionsAreValid) {
  for (const char* c : {"0006", "0012", "2412", "4412", "6409", "0030", "9999"}) {
    const auto v = validate_contour(naca4_surface(Naca4Code::parse(c)));
    if (std::string(c) == "9999") continue;
    EXPECT_TRUE(v.valid()) << c;
  }
  EXPECT_TRUE(validate_contour(naca4_surface(Naca4Code::parse("2412"))).violations.empty());
}

TEST(Validate, DuplicateAdjacentPoints) {
  const auto s = naca4_surface(Naca4Code::parse("2412"));
  std::vector<double> c(s.coords().begin(), s.coords().end());
  const std::size_t n = s.size();
  c[50] = c[51];
  c[n + 50] = c[n + 51];
  const auto v = validate_contour(AirfoilShape(c));
  EXPECT_TRUE(v.has(ContourViolation::duplicate_points));
  EXPECT_EQ(to_string(ContourViolation::duplicate_points), "duplicate adjacent points");
}

TEST(Validate, ReversedOrientation) {
  const auto s = naca4_surface(Naca4Code::parse("2412"));
  std::vector<double> xs(s.xs().rbegin(), s.xs().rend());
  std::vector<double> ys(s.ys().rbegin(), s.ys().rend());
  const AirfoilShape r(xs, ys);
  EXPECT_LT(signed_area(r), 0.0);
  EXPECT_NEAR(signed_area(r), -signed_area(s), 1e-15);
  const auto v = validate_contour(r);
  EXPECT_TRUE(v.has(ContourViolation::reversed_orientation));
  EXPECT_EQ(v.violations.size(), 1u);
}

TEST(Validate, OpenContour) {
  const auto s = naca4_surface(Naca4Code::parse("0012"));
  std::vector<double> c(s.coords().begin(), s.coords().end());
  c[s.size()] += 1e-3;  // lift first y
  EXPECT_TRUE(validate_contour(AirfoilShape(c)).has(ContourViolation::open_contour));
  c[s.size()] = s.y(0) + 5e-7;
  EXPECT_FALSE(validate_contour(AirfoilShape(c)).has(ContourViolation::open_contour));
}

TEST(Validate, SelfIntersection) {
  const auto s = naca4_surface(Naca4Code::parse("0012"));
  std::vector<double> c(s.coords().begin(), s.coords().end());
  const std::size_t n = s.size();
  // Push one upper-surface point through the lower surface.
  c[n + 60] = -0.2;
  const auto v = validate_contour(AirfoilShape(c));
  EXPECT_TRUE(v.has(ContourViolation::self_intersection));
}

TEST(Validate, XOutOfRangeAndNonFinite) {
  const auto s = naca4_surface(Naca4Code::parse("0012"));
  std::vector<double> c(s.coords().begin(), s.coords().end());
  c[100] = 1.2;
  EXPECT_TRUE(validate_contour(AirfoilShape(c)).has(ContourViolation::x_out_of_range));
  c[100] = std::nan("");
  EXPECT_TRUE(validate_contour(AirfoilShape(c)).has(ContourViolation::non_finite));
}

TEST(Validate, TinyContours) {
  EXPECT_FALSE(validate_contour(AirfoilShape(std::vector<double>{})).valid());
  EXPECT_FALSE(validate_contour(AirfoilShape(std::vector<double>{0, 1, 0, 0})).valid());
}

TEST(Geometry, SelfIntersectionOnSimplePolygons) {
  // Square (closed, last == first) and a bow tie.
  const std::vector<double> sx{1, 0, 0, 1, 1}, sy{0, 0, 1, 1, 0};
  EXPECT_FALSE(has_self_intersection(AirfoilShape(sx, sy)));
  const std::vector<double> bx{0, 1, 1, 0, 0}, by{0, 1, 0, 1, 0};
  EXPECT_TRUE(has_self_intersection(AirfoilShape(bx, by)));
}

TEST(AirfoilShape, RejectsOddLength) {
  EXPECT_THROW(AirfoilShape(std::vector<double>{1, 2, 3}), std::invalid_argument);
  const std::vector<double> a{1, 2}, b{1};
  EXPECT_THROW(AirfoilShape(a, b), std::invalid_argument);
}
