#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "foilgan/aero.hpp"
#include "foilgan/geometry.hpp"

namespace foilgan {

inline constexpr double kMinLabel = 0.0;
inline constexpr double kMaxLabel = 2.0;
inline constexpr int kDatasetSchemaVersion = 1;

struct LabeledAirfoil {
  Naca4Code code;
  AirfoilShape shape;
  double cl;

  friend bool operator==(const LabeledAirfoil&, const LabeledAirfoil&) = default;
};

struct LabelRange {
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const LabelRange&, const LabelRange&) = default;
};

struct DatasetManifest {
  std::vector<LabeledAirfoil> records;
  FlowCondition flow;
  std::string solver_id;
  LabelRange normalization;

  std::size_t size() const { return records.size(); }

  friend bool operator==(const DatasetManifest& a, const DatasetManifest& b) {
    return a.records == b.records && a.flow.alpha_deg == b.flow.alpha_deg && a.flow.reynolds == b.flow.reynolds &&
           a.solver_id == b.solver_id && a.normalization == b.normalization;
  }
};

struct BuildStats {
  std::size_t evaluated = 0;
  std::size_t retained = 0;
  std::size_t non_converged = 0;
  std::size_t below_range = 0;
  std::size_t above_range = 0;
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyDatasetError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

// Wrong magic, unsupported schema version or malformed header.
class DatasetSchemaError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

// File ends before the declared number of complete records.
class DatasetTruncatedError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

// All definable 4-digit codes in ascending order. Codes with zero thickness
// (xx00) have no contour and are skipped, leaving 9,900.
std::vector<Naca4Code> all_naca4_codes();

// Keeps a code iff its CL converges and lies in [0, 2] (both ends inclusive).
// Record order follows `codes` regardless of `jobs`.
DatasetManifest build_dataset(std::span<const Naca4Code> codes, const FlowCondition& cond, const ClBackend& backend,
                              unsigned jobs = 1, BuildStats* stats = nullptr);

struct HistogramBin {
  double lo;
  double hi;
  std::size_t count;
};

// Bins of `bin_width` covering [0, 2]; the top bin is closed on the right.
std::vector<HistogramBin> cl_histogram(const DatasetManifest& manifest, double bin_width = 0.1);

// Writes `table_path` (code,cl,x1..x248,y1..y248) and its metadata header at
// metadata_path(table_path). Doubles are written in shortest round-trip form.
void save(const DatasetManifest& manifest, const std::filesystem::path& table_path);
DatasetManifest load(const std::filesystem::path& table_path);

std::filesystem::path metadata_path(const std::filesystem::path& table_path);

// Seeded Fisher-Yates permutation of [0, n).
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

}  // namespace foilgan
