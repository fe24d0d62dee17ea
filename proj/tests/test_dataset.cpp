#include <gtest/gtest.h>

#include <fstream>

#include "foilgan/dataset.hpp"
#include "support.hpp"

using namespace foilgan;
using foilgan::testing::TempDir;

namespace {

class NeverConverges final : public ClBackend {
 public:
  ClResult evaluate(const AirfoilShape&, const FlowCondition&) const override {
    return ClResult::failure({"stub"});
  }
  std::string id() const override { return "never"; }
};

// CL = a * max thickness of the contour; lets tests steer records across the
// [0, 2] bounds through the thickness digits.
class ThicknessBackend final : public ClBackend {
 public:
  explicit ThicknessBackend(double scale) : scale_(scale) {}
  ClResult evaluate(const AirfoilShape& s, const FlowCondition&) const override {
    double hi = -1e9, lo = 1e9;
    for (std::size_t i = 0; i < s.size(); ++i) {
      hi = std::max(hi, s.y(i));
      lo = std::min(lo, s.y(i));
    }
    const double t = hi - lo;
    if (t > 0.5) return ClResult::failure({"too thick"});
    return ClResult::success(scale_ * t - 1.0);
  }
  std::string id() const override { return "thickness"; }

 private:
  double scale_;
};

DatasetManifest small_manifest(std::size_t n) {
  DatasetManifest m;
  m.solver_id = "panel-linear-vortex";
  m.flow = {5.0, 3e6};
  for (std::size_t i = 0; i < n; ++i) {
    const auto code = Naca4Code(static_cast<int>(i % 10), 4, 10 + static_cast<int>(i));
    m.records.push_back({code, naca4_surface(code), 0.1 + 0.3 * static_cast<double>(i) + 1.0 / 3.0});
  }
  m.normalization = {m.records.front().cl, m.records.back().cl};
  return m;
}

}  // namespace

TEST(Codes, EnumerationSkipsZeroThickness) {
  const auto codes = all_naca4_codes();
  EXPECT_EQ(codes.size(), 9900u);
  EXPECT_EQ(codes.front().str(), "0001");
  EXPECT_EQ(codes.back().str(), "9999");
  for (std::size_t i = 1; i < codes.size(); ++i) ASSERT_LT(codes[i - 1].number(), codes[i].number());
}

TEST(BuildDataset, SingleCodeAtFiveDegrees) {
  PanelBackend panel;
  const std::vector<Naca4Code> codes{Naca4Code::parse("0012")};
  const auto m = build_dataset(codes, {5.0, 3e6}, panel);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_GT(m.records[0].cl, 0.5);
  EXPECT_LT(m.records[0].cl, 0.7);
  EXPECT_EQ(m.solver_id, "panel-linear-vortex");
  EXPECT_EQ(m.records[0].shape, naca4_surface(codes[0]));
}

TEST(BuildDataset, ZeroLiftIsRetained) {
  // The symmetric section at zero incidence sits on the inclusive lower bound
  // only if its CL is not slightly negative; the solver must return >= 0 or
  // the record is dropped, so pin both outcomes to the inclusive semantics.
  PanelBackend panel;
  const std::vector<Naca4Code> codes{Naca4Code::parse("0012")};
  const double cl = *panel_cl(naca4_surface(codes[0]), {0.0, 3e6}).cl;
  if (cl >= 0.0) {
    EXPECT_EQ(build_dataset(codes, {0.0, 3e6}, panel).size(), 1u);
  } else {
    EXPECT_THROW(build_dataset(codes, {0.0, 3e6}, panel), EmptyDatasetError);
  }
}

TEST(BuildDataset, SymmetricCodesAtZeroIncidence) {
  PanelBackend panel;
  std::vector<Naca4Code> codes;
  for (int t = 6; t <= 30; t += 3) codes.emplace_back(0, 0, t);
  BuildStats stats;
  const auto m = build_dataset(codes, {0.0, 3e6}, panel, 1, &stats);
  for (const auto& r : m.records) EXPECT_NEAR(r.cl, 0.0, 1e-3);
  EXPECT_EQ(stats.evaluated, codes.size());
  EXPECT_EQ(stats.retained + stats.non_converged + stats.below_range + stats.above_range, stats.evaluated);
}

TEST(BuildDataset, FiltersInclusiveRangeAndKeepsOrder) {
  std::vector<Naca4Code> codes;
  for (int t = 1; t <= 60; ++t) codes.emplace_back(0, 0, t);
  ThicknessBackend backend(20.0);  // cl = 20 t - 1: t < 0.05 -> negative, t > 0.15 -> above 2
  BuildStats stats;
  const auto m = build_dataset(codes, {5.0, 3e6}, backend, 3, &stats);
  EXPECT_GT(stats.below_range, 0u);
  EXPECT_GT(stats.above_range, 0u);
  EXPECT_EQ(stats.retained, m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_GE(m.records[i].cl, 0.0);
    EXPECT_LE(m.records[i].cl, 2.0);
    if (i > 0) EXPECT_LT(m.records[i - 1].code.number(), m.records[i].code.number());
  }
  EXPECT_LE(m.normalization.min, m.normalization.max);
  for (const auto& r : m.records) {
    EXPECT_GE(r.cl, m.normalization.min);
    EXPECT_LE(r.cl, m.normalization.max);
  }
  // Same result for any job count.
  EXPECT_EQ(build_dataset(codes, {5.0, 3e6}, backend, 1), m);
}

TEST(BuildDataset, Idempotent) {
  PanelBackend panel;
  std::vector<Naca4Code> codes;
  for (int n : {12, 2412, 4412, 6409, 9999, 1, 5530}) codes.push_back(Naca4Code::from_number(n));
  const auto first = build_dataset(codes, {5.0, 3e6}, panel, 2);
  std::vector<Naca4Code> kept;
  for (const auto& r : first.records) kept.push_back(r.code);
  EXPECT_EQ(build_dataset(kept, {5.0, 3e6}, panel, 2), first);
}

TEST(BuildDataset, EmptyIsAnError) {
  NeverConverges none;
  const std::vector<Naca4Code> codes{Naca4Code::parse("0012")};
  EXPECT_THROW(build_dataset(codes, {5.0, 3e6}, none), EmptyDatasetError);
}

TEST(Histogram, SingleRecord) {
  auto m = small_manifest(1);
  m.records[0].cl = 0.55;
  const auto h = cl_histogram(m);
  ASSERT_EQ(h.size(), 20u);
  for (std::size_t b = 0; b < h.size(); ++b) {
    EXPECT_EQ(h[b].count, b == 5 ? 1u : 0u);
  }
  EXPECT_DOUBLE_EQ(h[5].lo, 0.5);
  EXPECT_NEAR(h[5].hi, 0.6, 1e-12);
}

TEST(Histogram, EdgesAndTopBin) {
  auto m = small_manifest(4);
  m.records[0].cl = 0.0;
  m.records[1].cl = 0.3;
  m.records[2].cl = 1.2;
  m.records[3].cl = 2.0;
  const auto h = cl_histogram(m);
  EXPECT_EQ(h[0].count, 1u);
  EXPECT_EQ(h[3].count, 1u);
  EXPECT_EQ(h[12].count, 1u);
  EXPECT_EQ(h[19].count, 1u);  // 2.0 falls in the closed top bin
  std::size_t total = 0;
  for (const auto& b : h) total += b.count;
  EXPECT_EQ(total, 4u);
}

TEST(Persistence, RoundTrip) {
  TempDir dir;
  const auto m = small_manifest(3);
  save(m, dir / "d.csv");
  EXPECT_TRUE(std::filesystem::exists(metadata_path(dir / "d.csv")));
  EXPECT_EQ(load(dir / "d.csv"), m);
}

TEST(Persistence, WrongMagic) {
  TempDir dir;
  save(small_manifest(3), dir / "d.csv");
  std::string meta = foilgan::testing::slurp(metadata_path(dir / "d.csv"));
  meta.replace(0, 3, "xyz");
  std::ofstream(metadata_path(dir / "d.csv")) << meta;
  EXPECT_THROW(load(dir / "d.csv"), DatasetSchemaError);
}

TEST(Persistence, WrongVersion) {
  TempDir dir;
  save(small_manifest(3), dir / "d.csv");
  std::string meta = foilgan::testing::slurp(metadata_path(dir / "d.csv"));
  const auto pos = meta.find("schema_version=1");
  ASSERT_NE(pos, std::string::npos);
  meta.replace(pos, 16, "schema_version=9");
  std::ofstream(metadata_path(dir / "d.csv")) << meta;
  EXPECT_THROW(load(dir / "d.csv"), DatasetSchemaError);
}

TEST(Persistence, TruncatedMidRecord) {
  TempDir dir;
  save(small_manifest(3), dir / "d.csv");
  const std::string table = foilgan::testing::slurp(dir / "d.csv");
  for (double frac : {0.5, 0.8, 0.99}) {
    std::ofstream(dir / "d.csv", std::ios::binary | std::ios::trunc)
        << table.substr(0, static_cast<std::size_t>(static_cast<double>(table.size()) * frac));
    EXPECT_THROW(load(dir / "d.csv"), DatasetTruncatedError) << frac;
  }
  // Whole records missing.
  const auto last_record = table.rfind('\n', table.size() - 2);
  std::ofstream(dir / "d.csv", std::ios::binary | std::ios::trunc) << table.substr(0, last_record + 1);
  EXPECT_THROW(load(dir / "d.csv"), DatasetTruncatedError);
}

TEST(Persistence, MalformedValues) {
  TempDir dir;
  save(small_manifest(2), dir / "d.csv");
  std::string table = foilgan::testing::slurp(dir / "d.csv");
  const auto line2 = table.find('\n') + 1;
  const auto comma = table.find(',', line2);
  table.replace(comma + 1, 1, "q");
  std::ofstream(dir / "d.csv", std::ios::binary | std::ios::trunc) << table;
  EXPECT_THROW(load(dir / "d.csv"), DatasetSchemaError);
}

TEST(Persistence, MissingFiles) {
  TempDir dir;
  EXPECT_THROW(load(dir / "nope.csv"), DatasetError);
}

TEST(Shuffle, SeededPermutation) {
  const auto a = shuffled_indices(100, 7);
  EXPECT_EQ(a, shuffled_indices(100, 7));
  EXPECT_NE(a, shuffled_indices(100, 8));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
}
