#include "foilgan/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>

#include "foilgan/parallel.hpp"
#include "foilgan/rng.hpp"

namespace foilgan {

namespace fs = std::filesystem;

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::nonconverged: return "nonconverged";
    case Outcome::success: return "success";
    case Outcome::failure: return "failure";
  }
  return "unknown";
}

void SweepConfig::validate() const {
  if (!(label_step > 0.0)) throw std::invalid_argument("label step must be positive");
  if (!(label_end >= label_start)) throw std::invalid_argument("label end must not precede label start");
  if (samples_per_label < 2) throw std::invalid_argument("samples_per_label must be at least 2");
  if (!(failure_threshold > 0.0)) throw std::invalid_argument("failure threshold must be positive");
}

std::vector<double> SweepConfig::labels() const {
  validate();
  const auto count = static_cast<std::size_t>(std::floor((label_end - label_start) / label_step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::round((label_start + static_cast<double>(i) * label_step) * 1e12) / 1e12;
  }
  return out;
}

Outcome classify(double label, const ClResult& result, double threshold) {
  if (!result.converged() || !result.cl) return Outcome::nonconverged;
  return std::abs(*result.cl - label) <= threshold ? Outcome::success : Outcome::failure;
}

double diversity_mu(std::span<const std::vector<double>> shapes) {
  if (shapes.size() < 2) throw std::invalid_argument("diversity needs at least two shapes");
  const std::size_t dim = shapes.front().size();
  // Deviations are taken from the first shape so identical inputs give exactly zero.
  const auto& ref = shapes.front();
  std::vector<double> mean(dim, 0.0);
  for (const auto& s : shapes) {
    if (s.size() != dim) throw std::invalid_argument("shapes differ in dimension");
    for (std::size_t k = 0; k < dim; ++k) mean[k] += s[k] - ref[k];
  }
  const double inv_n = 1.0 / static_cast<double>(shapes.size());
  for (double& m : mean) m *= inv_n;
  double total = 0.0;
  for (const auto& s : shapes) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = s[k] - ref[k] - mean[k];
      total += d * d;
    }
  }
  return total * inv_n;
}

void summarize(SweepReport& report) {
  const std::vector<double> labels = report.config.labels();
  const std::size_t per = report.config.samples_per_label;
  if (report.samples.size() != labels.size() * per) throw std::invalid_argument("sample count does not match sweep");

  report.rows.assign(labels.size(), {});
  SweepAggregate agg;
  double sq_err_total = 0.0;
  std::size_t converged_total = 0;
  std::size_t labels_with_mse = 0;
  for (std::size_t li = 0; li < labels.size(); ++li) {
    LabelRow& row = report.rows[li];
    row.label = labels[li];
    double sq_err = 0.0;
    std::vector<std::vector<double>> shapes;
    shapes.reserve(per);
    for (std::size_t k = 0; k < per; ++k) {
      const SweepSample& s = report.samples[li * per + k];
      shapes.push_back(s.shape);
      switch (s.outcome) {
        case Outcome::nonconverged: ++row.n_nonconverged; break;
        case Outcome::failure: ++row.n_failure; break;
        case Outcome::success: ++row.n_success; break;
      }
      if (s.outcome != Outcome::nonconverged) sq_err += (*s.result.cl - row.label) * (*s.result.cl - row.label);
    }
    const std::size_t converged = row.n_failure + row.n_success;
    row.mse = converged > 0 ? sq_err / static_cast<double>(converged) : std::numeric_limits<double>::quiet_NaN();
    row.mu = diversity_mu(shapes);
    row.smooth_rate = static_cast<double>(converged) / static_cast<double>(per);

    agg.rate_nonconverged += static_cast<double>(row.n_nonconverged);
    agg.rate_failure += static_cast<double>(row.n_failure);
    agg.rate_success += static_cast<double>(row.n_success);
    agg.mu += row.mu;
    if (converged > 0) {
      agg.mse += row.mse;
      ++labels_with_mse;
    }
    sq_err_total += sq_err;
    converged_total += converged;
  }
  const double total = static_cast<double>(report.samples.size());
  agg.rate_nonconverged /= total;
  agg.rate_failure /= total;
  agg.rate_success /= total;
  agg.mu /= static_cast<double>(labels.size());
  agg.mse = labels_with_mse > 0 ? agg.mse / static_cast<double>(labels_with_mse) : std::numeric_limits<double>::quiet_NaN();
  agg.mse_pooled = converged_total > 0 ? sq_err_total / static_cast<double>(converged_total)
                                       : std::numeric_limits<double>::quiet_NaN();
  report.aggregate = agg;
}

SweepReport run_sweep(const Generator<double>& generator, const SweepConfig& sweep, const ClBackend& backend,
                      const FlowCondition& cond, unsigned jobs) {
  sweep.validate();
  cond.validate();
  const std::vector<double> labels = sweep.labels();
  const std::size_t per = sweep.samples_per_label;
  const auto batch = static_cast<Eigen::Index>(per);

  SweepReport report;
  report.config = sweep;
  report.backend_id = backend.id();
  report.samples.resize(labels.size() * per);

  const std::uint64_t sweep_seed = derive_seed(sweep.seed, static_cast<std::uint64_t>(SeedStream::sweep));
  for (std::size_t li = 0; li < labels.size(); ++li) {
    Rng rng(derive_seed(sweep_seed, li));
    const Mat<double> z = generator.sample_latent(batch, rng);
    const Mat<double> x = generator.generate(z, RowVec<double>::Constant(batch, labels[li]));
    for (Eigen::Index k = 0; k < batch; ++k) {
      SweepSample& s = report.samples[li * per + static_cast<std::size_t>(k)];
      s.label_index = li;
      s.shape.assign(x.col(k).data(), x.col(k).data() + x.rows());
    }
  }

  parallel_for(report.samples.size(), jobs, [&](std::size_t i) {
    SweepSample& s = report.samples[i];
    s.result = backend.evaluate(AirfoilShape(s.shape), cond);
    s.outcome = classify(labels[s.label_index], s.result, sweep.failure_threshold);
  });

  summarize(report);
  return report;
}

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string num(double v) { return std::isnan(v) ? "nan" : fmt("%.9g", v); }

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

nlohmann::json nullable(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

}  // namespace

void emit_report(const SweepReport& report, const fs::path& out_dir, std::span<const double> export_labels) {
  fs::create_directories(out_dir);
  const std::size_t per = report.config.samples_per_label;

  {
    auto out = open_out(out_dir / "sweep_table.csv");
    out << "label,n_nonconv,n_fail,n_success,mse,mu,smooth_rate\n";
    std::size_t nc = 0;
    std::size_t nf = 0;
    std::size_t ns = 0;
    for (const auto& r : report.rows) {
      out << fmt("%.6g", r.label) << ',' << r.n_nonconverged << ',' << r.n_failure << ',' << r.n_success << ','
          << num(r.mse) << ',' << num(r.mu) << ',' << num(r.smooth_rate) << '\n';
      nc += r.n_nonconverged;
      nf += r.n_failure;
      ns += r.n_success;
    }
    out << "aggregate," << nc << ',' << nf << ',' << ns << ',' << num(report.aggregate.mse) << ','
        << num(report.aggregate.mu) << ',' << num(1.0 - report.aggregate.rate_nonconverged) << '\n';
  }
  {
    auto out = open_out(out_dir / "scatter.csv");
    out << "label,cl_recalc\n";
    for (const auto& s : report.samples) {
      if (s.outcome == Outcome::nonconverged) continue;
      out << fmt("%.6g", report.rows[s.label_index].label) << ',' << num(*s.result.cl) << '\n';
    }
  }
  {
    auto out = open_out(out_dir / "series.csv");
    out << "label,smooth_rate,mse,mu\n";
    for (const auto& r : report.rows) {
      out << fmt("%.6g", r.label) << ',' << num(r.smooth_rate) << ',' << num(r.mse) << ',' << num(r.mu) << '\n';
    }
  }
  {
    const auto& a = report.aggregate;
    nlohmann::ordered_json j;
    j["backend"] = report.backend_id;
    j["labels"] = {{"start", report.config.label_start},
                   {"step", report.config.label_step},
                   {"end", report.config.label_end},
                   {"count", report.rows.size()}};
    j["samples_per_label"] = per;
    j["failure_threshold"] = report.config.failure_threshold;
    j["seed"] = report.config.seed;
    j["rate_nonconverged"] = a.rate_nonconverged;
    j["rate_failure"] = a.rate_failure;
    j["rate_success"] = a.rate_success;
    j["mse"] = nullable(a.mse);
    j["mse_pooled"] = nullable(a.mse_pooled);
    j["mu"] = a.mu;
    j["mse_scope"] = "converged shapes only";
    j["mu_scope"] = "all generated shapes, mean of per-label values";
    auto out = open_out(out_dir / "summary.json");
    out << j.dump(2) << '\n';
  }

  for (double target : export_labels) {
    for (std::size_t li = 0; li < report.rows.size(); ++li) {
      if (std::abs(report.rows[li].label - target) > 1e-9) continue;
      const fs::path dir = out_dir / "shapes" / fmt("label_%.4f", report.rows[li].label);
      fs::create_directories(dir);
      for (std::size_t k = 0; k < per; ++k) {
        const SweepSample& s = report.samples[li * per + k];
        std::string name = "label=" + fmt("%.6g", report.rows[li].label) + " sample=" + std::to_string(k) + " " +
                           std::string(to_string(s.outcome));
        if (s.result.cl) name += " cl=" + num(*s.result.cl);
        char file[32];
        std::snprintf(file, sizeof file, "shape_%02zu.dat", k);
        write_coordinate_file(dir / file, AirfoilShape(s.shape), name);
      }
    }
  }
}

}  // namespace foilgan
