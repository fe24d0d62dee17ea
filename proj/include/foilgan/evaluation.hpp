#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "foilgan/aero.hpp"
#include "foilgan/nets.hpp"

namespace foilgan {

enum class Outcome { nonconverged, success, failure };

std::string_view to_string(Outcome o);

struct SweepConfig {
  double label_start = 0.10;
  double label_step = 0.01;
  double label_end = 1.50;  // inclusive
  std::size_t samples_per_label = 20;
  double failure_threshold = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
  // start + i * step for every i with start + i * step <= end (+ 1e-9).
  std::vector<double> labels() const;
};

Outcome classify(double label, const ClResult& result, double threshold);

// (1/N) sum_i ||x_i - mean||^2. Throws std::invalid_argument for N < 2 or
// ragged input.
double diversity_mu(std::span<const std::vector<double>> shapes);

struct SweepSample {
  std::size_t label_index;
  std::vector<double> shape;
  ClResult result;
  Outcome outcome;
};

struct LabelRow {
  double label = 0.0;
  std::size_t n_nonconverged = 0;
  std::size_t n_failure = 0;
  std::size_t n_success = 0;
  double mse = 0.0;  // over converged samples; NaN when none converged
  double mu = 0.0;   // over all samples
  double smooth_rate = 0.0;
};

struct SweepAggregate {
  double rate_nonconverged = 0.0;
  double rate_failure = 0.0;
  double rate_success = 0.0;
  double mse = 0.0;         // equal weight per label with any converged sample
  double mse_pooled = 0.0;  // weighted by converged counts
  double mu = 0.0;          // mean of per-label mu
};

struct SweepReport {
  SweepConfig config;
  std::string backend_id;
  std::vector<LabelRow> rows;
  SweepAggregate aggregate;
  std::vector<SweepSample> samples;  // label-major, samples_per_label each
};

// Per label: draw samples_per_label latent vectors from a stream seeded by
// (seed, label index), generate, evaluate CL, classify. Results are identical
// for any `jobs`.
SweepReport run_sweep(const Generator<double>& generator, const SweepConfig& sweep, const ClBackend& backend,
                      const FlowCondition& cond, unsigned jobs = 1);

// Fills rows and aggregate from samples (exposed for tests).
void summarize(SweepReport& report);

inline const std::vector<double> kDefaultExportLabels{0.1, 0.5, 1.0, 1.4};

// Writes into out_dir:
//   sweep_table.csv   label,n_nonconv,n_fail,n_success,mse,mu,smooth_rate (+ aggregate row)
//   scatter.csv       label,cl_recalc for converged samples
//   series.csv        label,smooth_rate,mse,mu
//   summary.json      aggregate metrics and sweep settings
//   shapes/label_<L>/shape_<k>.dat for each label in export_labels
void emit_report(const SweepReport& report, const std::filesystem::path& out_dir,
                 std::span<const double> export_labels = kDefaultExportLabels);

}  // namespace foilgan
