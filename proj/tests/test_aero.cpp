#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "foilgan/aero.hpp"
#include "support.hpp"

using namespace foilgan;
using foilgan::testing::TempDir;

namespace {

AirfoilShape naca(const char* code) { return naca4_surface(Naca4Code::parse(code)); }

FlowCondition at(double alpha) { return {alpha, 3e6}; }

bool mentions(const ClResult& r, const std::string& text) {
  return std::any_of(r.diagnostics.begin(), r.diagnostics.end(),
                     [&](const std::string& d) { return d.find(text) != std::string::npos; });
}

}  // namespace

TEST(PanelCl, SymmetricSectionAtZeroIncidence) {
  const auto r = panel_cl(naca("0012"), at(0.0));
  ASSERT_TRUE(r.converged());
  EXPECT_NEAR(*r.cl, 0.0, 1e-3);
}

TEST(PanelCl, ThinAirfoilEstimate) {
  const auto r = panel_cl(naca("0012"), at(5.0));
  ASSERT_TRUE(r.converged());
  const double thin = 2.0 * std::numbers::pi * std::sin(5.0 * std::numbers::pi / 180.0);
  EXPECT_NEAR(*r.cl, thin, 0.15 * thin);
  EXPECT_GT(*r.cl, thin);  // thickness adds lift in potential flow
}

TEST(PanelCl, CamberAddsLift) {
  const double c0 = *panel_cl(naca("0012"), at(5.0)).cl;
  const double c2 = *panel_cl(naca("2412"), at(5.0)).cl;
  const double c4 = *panel_cl(naca("4412"), at(5.0)).cl;
  EXPECT_LT(c0, c2);
  EXPECT_LT(c2, c4);
  // Zero-lift angle of a 2% cambered section is about -2 deg.
  const double z = *panel_cl(naca("2412"), at(-2.1)).cl;
  EXPECT_NEAR(z, 0.0, 0.05);
}

TEST(PanelCl, MirrorAntisymmetry) {
  for (const char* code : {"0006", "0012", "0021"}) {
    for (double a : {0.5, 2.0, 5.0, 8.0}) {
      const auto p = panel_cl(naca(code), at(a));
      const auto m = panel_cl(naca(code), at(-a));
      ASSERT_TRUE(p.converged() && m.converged());
      EXPECT_NEAR(*p.cl, -*m.cl, 1e-6) << code << " alpha " << a;
    }
  }
}

TEST(PanelCl, MonotonicInAlpha) {
  for (const char* code : {"0012", "2412", "4415", "6409", "0030"}) {
    double prev = -1e9;
    for (double a = -2.0; a <= 8.0 + 1e-9; a += 0.5) {
      const auto r = panel_cl(naca(code), at(a));
      ASSERT_TRUE(r.converged());
      EXPECT_GT(*r.cl, prev) << code << " alpha " << a;
      prev = *r.cl;
    }
  }
}

TEST(PanelCl, LiftSlopeNearTwoPi) {
  const double a = *panel_cl(naca("0012"), at(2.0)).cl;
  const double b = *panel_cl(naca("0012"), at(4.0)).cl;
  const double slope = (b - a) / (2.0 * std::numbers::pi / 180.0);
  EXPECT_GT(slope, 2.0 * std::numbers::pi);
  EXPECT_LT(slope, 1.2 * 2.0 * std::numbers::pi);
}

TEST(PanelCl, Deterministic) {
  const auto s = naca("2412");
  EXPECT_EQ(panel_cl(s, at(5.0)), panel_cl(s, at(5.0)));
}

TEST(PanelCl, InsensitiveToPointCount) {
  const double coarse = *panel_cl(naca4_surface(Naca4Code::parse("2412"), 160), at(5.0)).cl;
  const double fine = *panel_cl(naca4_surface(Naca4Code::parse("2412"), 400), at(5.0)).cl;
  EXPECT_NEAR(coarse, fine, 0.01);
}

TEST(PanelCl, SelfIntersectionIsNonConverged) {
  const auto s = naca("0012");
  std::vector<double> c(s.coords().begin(), s.coords().end());
  c[s.size() + 60] = -0.2;
  const auto r = panel_cl(AirfoilShape(c), at(5.0));
  EXPECT_FALSE(r.converged());
  EXPECT_FALSE(r.cl.has_value());
  EXPECT_TRUE(mentions(r, "self-intersection"));
}

TEST(PanelCl, DegenerateInputs) {
  for (const auto& c : std::vector<std::vector<double>>{
           {}, {0, 0}, {1, 0, 1, 0, 0, 0}, std::vector<double>(496, 0.0), std::vector<double>(496, std::nan(""))}) {
    const auto r = panel_cl(AirfoilShape(c), at(5.0));
    EXPECT_FALSE(r.converged());
    EXPECT_FALSE(r.diagnostics.empty());
  }
  std::vector<double> inf(496, 0.5);
  inf[7] = INFINITY;
  EXPECT_FALSE(panel_cl(AirfoilShape(inf), at(5.0)).converged());
}

TEST(PanelCl, RandomVectorsNeverThrow) {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto base = naca("2412");
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> v(kShapeDim);
    const int mode = trial % 3;
    for (std::size_t i = 0; i < kShapeDim; ++i) {
      if (mode == 0) v[i] = n(rng);
      if (mode == 1) v[i] = u(rng);
      if (mode == 2) v[i] = base.coords()[i] + 0.01 * n(rng);
    }
    ClResult r;
    ASSERT_NO_THROW(r = panel_cl(AirfoilShape(v), at(5.0)));
    if (r.converged()) {
      ASSERT_TRUE(r.cl && std::isfinite(*r.cl));
    } else {
      ASSERT_FALSE(r.diagnostics.empty());
      ASSERT_FALSE(r.cl.has_value());
    }
  }
}

TEST(FlowCondition, Validates) {
  EXPECT_NO_THROW((FlowCondition{5.0, 3e6}.validate()));
  EXPECT_THROW((FlowCondition{std::nan(""), 3e6}.validate()), std::invalid_argument);
  EXPECT_THROW((FlowCondition{5.0, 0.0}.validate()), std::invalid_argument);
}

TEST(CoordinateFile, RoundTrip) {
  TempDir dir;
  const auto s = naca("2412");
  write_coordinate_file(dir / "f.dat", s, "NACA 2412");
  const auto back = read_coordinate_file(dir / "f.dat");
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(back.x(i), s.x(i), 1e-9);
    EXPECT_NEAR(back.y(i), s.y(i), 1e-9);
  }
  std::ifstream in(dir / "f.dat");
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "NACA 2412");
}

// ---- xfoil adapter, driven by stand-in executables

namespace {

std::filesystem::path fake_solver(const TempDir& dir, const std::string& name, const std::string& body) {
  const auto p = dir / name;
  std::ofstream out(p);
  out << "#!/bin/sh\n" << body << "\n";
  out.close();
  std::filesystem::permissions(p, std::filesystem::perms::owner_all);
  return p;
}

XfoilOptions options_for(const std::filesystem::path& exe, double timeout = 10.0) {
  XfoilOptions o;
  o.executable = exe;
  o.timeout = std::chrono::duration<double>(timeout);
  return o;
}

}  // namespace

TEST(ParseXfoil, LastClWins) {
  const auto r = parse_xfoil_output("a = 5.000  CL =  0.5000\n   Cm = -0.05\n a = 5.000 CL = 0.8123   Cm = -0.05\n");
  ASSERT_TRUE(r.converged());
  EXPECT_DOUBLE_EQ(*r.cl, 0.8123);
}

TEST(ParseXfoil, FailuresAreNonConverged) {
  EXPECT_FALSE(parse_xfoil_output("").converged());
  EXPECT_FALSE(parse_xfoil_output("").diagnostics.empty());
  EXPECT_FALSE(parse_xfoil_output(" CL = 0.5\n VISCAL:  Convergence failed\n").converged());
  EXPECT_FALSE(parse_xfoil_output(" CL = garbage\n").converged());
}

TEST(XfoilAdapter, ParsesFakeSolverOutput) {
  TempDir dir;
  // Consumes the command stream and checks the coordinate file exists.
  const auto exe = fake_solver(dir, "xf", "cat > /dev/null\ntest -f foil.dat || exit 3\necho ' a =  5.000   CL =  0.6123'");
  const auto r = xfoil_cl(naca("0012"), at(5.0), options_for(exe));
  ASSERT_TRUE(r.converged()) << (r.diagnostics.empty() ? "" : r.diagnostics.front());
  EXPECT_DOUBLE_EQ(*r.cl, 0.6123);
}

TEST(XfoilAdapter, SendsFlowCondition) {
  TempDir dir;
  const auto log = dir / "commands.log";
  const auto exe = fake_solver(dir, "xf", "cat > '" + log.string() + "'\necho 'CL = 0.1'");
  ASSERT_TRUE(xfoil_cl(naca("0012"), {3.5, 1e6}, options_for(exe)).converged());
  const std::string cmds = foilgan::testing::slurp(log);
  EXPECT_NE(cmds.find("ALFA 3.5"), std::string::npos);
  EXPECT_NE(cmds.find("VISC 1e+06"), std::string::npos);
  EXPECT_NE(cmds.find("LOAD foil.dat"), std::string::npos);
}

TEST(XfoilAdapter, TimeoutIsNonConverged) {
  TempDir dir;
  const auto exe = fake_solver(dir, "xf", "sleep 20");
  const auto start = std::chrono::steady_clock::now();
  const auto r = xfoil_cl(naca("0012"), at(5.0), options_for(exe, 0.3));
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
  EXPECT_FALSE(r.converged());
  EXPECT_TRUE(mentions(r, "timeout"));
}

TEST(XfoilAdapter, NoOutputIsNonConverged) {
  TempDir dir;
  const auto exe = fake_solver(dir, "xf", "cat > /dev/null");
  const auto r = xfoil_cl(naca("0012"), at(5.0), options_for(exe));
  EXPECT_FALSE(r.converged());
  EXPECT_TRUE(mentions(r, "no CL"));
}

TEST(XfoilAdapter, CrashIsNonConverged) {
  TempDir dir;
  const auto exe = fake_solver(dir, "xf", "kill -SEGV $$");
  const auto r = xfoil_cl(naca("0012"), at(5.0), options_for(exe));
  EXPECT_FALSE(r.converged());
  EXPECT_FALSE(r.diagnostics.empty());
}

TEST(XfoilAdapter, MissingExecutableIsConfigError) {
  EXPECT_THROW(xfoil_cl(naca("0012"), at(5.0), options_for("/nonexistent/xfoil")), SolverConfigError);
  EXPECT_THROW(XfoilBackend(options_for("/nonexistent/xfoil")), SolverConfigError);
}

TEST(Backends, Factory) {
  EXPECT_EQ(make_backend("panel")->id(), "panel-linear-vortex");
  EXPECT_THROW(make_backend("vlm"), std::invalid_argument);
  unsetenv(kXfoilEnvVar);
  EXPECT_THROW(make_backend("xfoil"), SolverConfigError);
  TempDir dir;
  const auto exe = fake_solver(dir, "xf", "echo 'CL = 0.25'");
  setenv(kXfoilEnvVar, exe.c_str(), 1);
  const auto b = make_backend("xfoil");
  unsetenv(kXfoilEnvVar);
  EXPECT_EQ(b->id(), "xfoil");
  EXPECT_DOUBLE_EQ(*b->evaluate(naca("0012"), at(0.0)).cl, 0.25);
}

// Cross-check against a real XFoil when one is configured.
TEST(XfoilAdapter, AgreesWithPanelSolver) {
  const char* env = std::getenv(kXfoilEnvVar);
  if (!env || !*env) GTEST_SKIP() << "no xfoil executable configured (" << kXfoilEnvVar << ")";
  const XfoilOptions o = options_for(env, 60.0);
  const auto zero = xfoil_cl(naca("0012"), at(0.0), o);
  ASSERT_TRUE(zero.converged());
  EXPECT_NEAR(*zero.cl, 0.0, 0.01);
  const auto xf = xfoil_cl(naca("2412"), at(5.0), o);
  ASSERT_TRUE(xf.converged());
  EXPECT_LT(std::abs(*xf.cl - *panel_cl(naca("2412"), at(5.0)).cl), 0.2);
}
