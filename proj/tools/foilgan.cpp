// foilgan command line: build-dataset, train, generate, sweep, report, js-check.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "foilgan/aero.hpp"
#include "foilgan/checkpoint.hpp"
#include "foilgan/config.hpp"
#include "foilgan/dataset.hpp"
#include "foilgan/evaluation.hpp"
#include "foilgan/losses.hpp"
#include "foilgan/numfmt.hpp"
#include "foilgan/rng.hpp"
#include "foilgan/training.hpp"

namespace fs = std::filesystem;
using namespace foilgan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Raised for anything the user can fix by changing flags or config.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::string out = ".";
  bool force = false;
};

struct Flags {
  // build-dataset
  std::optional<double> alpha;
  std::optional<double> reynolds;
  std::optional<std::string> backend;
  std::optional<std::string> xfoil;
  std::vector<std::string> codes;
  // train
  std::optional<std::string> regime;
  std::optional<std::size_t> latent_dim;
  std::optional<std::size_t> iterations;
  std::string dataset;
  // generate / sweep
  std::string checkpoint;
  std::optional<std::string> labels;
  std::optional<std::size_t> n;
  std::vector<double> generate_labels;
  // report
  std::vector<std::string> sweeps;
  std::vector<std::string> names;
  // js-check
  std::size_t trials = 100;
  bool equal = false;
};

// Validation failures in settings are usage errors, not runtime errors.
template <typename F>
void checked(F&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void set(PipelineConfig& c, const std::string& key, const std::string& value) { apply_setting(c, key, value); }

void apply_labels(PipelineConfig& c, const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw UsageError("--labels expects start:step:end, got '" + spec + "'");
  set(c, "sweep.label_start", parts[0]);
  set(c, "sweep.label_step", parts[1]);
  set(c, "sweep.label_end", parts[2]);
}

// File, then --set pairs, then the dedicated flags.
PipelineConfig effective_config(const Common& common, const Flags& f) {
  PipelineConfig c = common.config_path.empty() ? PipelineConfig{} : load_config(common.config_path);
  for (const auto& kv : common.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    set(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (common.seed) set(c, "run.seed", std::to_string(*common.seed));
  if (common.jobs) set(c, "run.jobs", std::to_string(*common.jobs));
  if (f.alpha) set(c, "flow.alpha", format_double(*f.alpha));
  if (f.reynolds) set(c, "flow.reynolds", format_double(*f.reynolds));
  if (f.backend) set(c, "solver.backend", *f.backend);
  if (f.xfoil) set(c, "solver.xfoil_path", *f.xfoil);
  if (f.regime) set(c, "train.regime", *f.regime);
  if (f.latent_dim) set(c, "train.latent_dim", std::to_string(*f.latent_dim));
  if (f.iterations) set(c, "train.total_iterations", std::to_string(*f.iterations));
  if (f.labels) apply_labels(c, *f.labels);
  if (f.n) set(c, "sweep.samples_per_label", std::to_string(*f.n));
  return c;
}

// Output subdirectories must be absent or empty unless --force.
void claim(const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_directory(dir)) throw UsageError(dir.string() + " exists and is not a directory");
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    if (!force) throw UsageError(dir.string() + " is not empty (use --force to overwrite)");
    fs::remove_all(dir);
  }
}

void echo_config(const PipelineConfig& c, const fs::path& out, const std::string& sub) {
  fs::create_directories(out / "logs");
  std::ofstream f(out / "logs" / (sub + "_config.ini"));
  f << to_ini(c);
  if (!f) throw std::runtime_error("cannot write effective config");
}

std::unique_ptr<ClBackend> backend_for(const PipelineConfig& c) {
  std::unique_ptr<ClBackend> b;
  checked([&] { b = make_backend(c.backend, c.xfoil); });
  return b;
}

fs::path resolve_dataset(const std::string& p) {
  if (p.empty()) throw UsageError("--dataset is required");
  const fs::path path(p);
  if (fs::is_directory(path)) {
    if (fs::exists(path / "dataset" / "dataset.csv")) return path / "dataset" / "dataset.csv";
    return path / "dataset.csv";
  }
  return path;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------- build-dataset

int run_build_dataset(const Common& common, const Flags& f) {
  const PipelineConfig c = effective_config(common, f);
  checked([&] { c.flow.validate(); });
  const auto backend = backend_for(c);
  const fs::path out(common.out);
  claim(out / "dataset", common.force);

  std::vector<Naca4Code> codes;
  checked([&] {
    for (const auto& c : f.codes) codes.push_back(Naca4Code::parse(c));
  });
  if (codes.empty()) codes = all_naca4_codes();
  BuildStats stats;
  std::cout << "evaluating " << codes.size() << " NACA 4-digit sections at alpha=" << c.flow.alpha_deg
            << " Re=" << c.flow.reynolds << " with " << backend->id() << "\n";
  DatasetManifest ds;
  try {
    ds = build_dataset(codes, c.flow, *backend, c.jobs, &stats);
  } catch (const EmptyDatasetError& e) {
    std::cerr << "error: " << e.what() << " (" << stats.non_converged << " non-converged, " << stats.below_range
              << " below 0, " << stats.above_range << " above 2)\n";
    return kExitRuntime;
  }

  fs::create_directories(out / "dataset");
  save(ds, out / "dataset" / "dataset.csv");
  echo_config(c, out, "build-dataset");

  std::cout << "retained " << stats.retained << " of " << stats.evaluated << "; eliminated "
            << stats.evaluated - stats.retained << " (non-converged " << stats.non_converged << ", cl<0 "
            << stats.below_range << ", cl>2 " << stats.above_range << ")\n";
  const auto hist = cl_histogram(ds);
  std::size_t peak = 1;
  for (const auto& b : hist) peak = std::max(peak, b.count);
  std::cout << "cl histogram:\n";
  for (const auto& b : hist) {
    std::cout << "  [" << fixed(b.lo, 1) << ", " << fixed(b.hi, 1) << ") " << std::string(40 * b.count / peak, '#')
              << " " << b.count << "\n";
  }
  std::cout << "wrote " << (out / "dataset" / "dataset.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- train

int run_train(const Common& common, const Flags& f) {
  const PipelineConfig c = effective_config(common, f);
  const TrainConfig tc = c.train_config();
  const GeneratorSpec gs = c.generator_spec();
  const CriticSpec cs = c.critic_spec();
  checked([&] {
    tc.validate();
    gs.validate();
    cs.validate();
  });
  if (cs.head != required_head(tc.regime)) {
    throw UsageError("regime " + std::string(to_string(tc.regime)) + " needs a " +
                     std::string(to_string(required_head(tc.regime))) + " critic head, config asks for " +
                     std::string(to_string(cs.head)));
  }
  const fs::path table = resolve_dataset(f.dataset);
  const fs::path out(common.out);
  claim(out / "checkpoints", common.force);

  const DatasetManifest ds = load(table);
  fs::create_directories(out / "checkpoints");
  echo_config(c, out, "train");

  std::cout << "training " << to_string(tc.regime) << " (latent " << tc.latent_dim << ") on " << ds.size()
            << " records for " << tc.total_iterations << " iterations, seed " << tc.seed << "\n";
  TrainOptions opts;
  opts.checkpoint_dir = out / "checkpoints";
  opts.on_iteration = [&](const LossRecord& r) {
    if (c.log_every == 0) return;
    if (r.iteration % c.log_every != 0 && r.iteration != 1 && r.iteration != tc.total_iterations) return;
    std::printf("iter %7zu  critic %+.6f  generator %+.6f  core %+.6f  penalty %.6f\n", r.iteration, r.critic_loss,
                r.generator_loss, r.critic_core, r.penalty);
    std::fflush(stdout);
  };
  try {
    const auto result = train<float>(ds, gs, cs, tc, opts);
    write_loss_history(result.run.loss_history, out / "logs" / "loss_history.csv");
    std::cout << "wrote " << (out / "checkpoints" / "final.ckpt").string() << " and "
              << (out / "logs" / "loss_history.csv").string() << "\n";
  } catch (const TrainingDivergedError& e) {
    const auto& s = e.snapshot();
    std::cerr << "training diverged: " << e.what() << "\n  snapshot: iteration " << s.iteration << " critic "
              << s.critic_loss << " generator " << s.generator_loss << " core " << s.critic_core << " penalty "
              << s.penalty << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- generate

Checkpoint load_ckpt(const std::string& path) {
  if (path.empty()) throw UsageError("--checkpoint is required");
  return load_checkpoint(path);
}

int run_generate(const Common& common, const Flags& f) {
  const PipelineConfig c = effective_config(common, f);
  if (f.generate_labels.empty()) throw UsageError("--label is required");
  const auto backend = backend_for(c);
  const Checkpoint ckpt = load_ckpt(f.checkpoint);
  const std::size_t n = f.n.value_or(c.sweep.samples_per_label);
  if (n == 0) throw UsageError("--n must be positive");
  const fs::path out(common.out);
  claim(out / "generated", common.force);
  echo_config(c, out, "generate");

  const Generator<double> gen = restore_generator<double>(ckpt);
  const std::uint64_t seed = derive_seed(c.seed, static_cast<std::uint64_t>(SeedStream::sweep));
  for (std::size_t li = 0; li < f.generate_labels.size(); ++li) {
    const double label = f.generate_labels[li];
    Rng rng(derive_seed(seed, li));
    const auto batch = static_cast<Eigen::Index>(n);
    const Mat<double> x = gen.generate(gen.sample_latent(batch, rng), RowVec<double>::Constant(batch, label));
    const fs::path dir = out / "generated" / ("label_" + fixed(label, 4));
    fs::create_directories(dir);
    for (Eigen::Index k = 0; k < batch; ++k) {
      const AirfoilShape shape(std::vector<double>(x.col(k).data(), x.col(k).data() + x.rows()));
      const ClResult r = backend->evaluate(shape, c.flow);
      std::string name = "label=" + format_double(label) + " sample=" + std::to_string(k);
      if (r.converged()) {
        name += " cl=" + format_double(*r.cl);
      } else {
        name += " nonconverged";
      }
      char file[32];
      std::snprintf(file, sizeof file, "shape_%02lld.dat", static_cast<long long>(k));
      write_coordinate_file(dir / file, shape, name);
      std::cout << name << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

int run_sweep_cmd(const Common& common, const Flags& f) {
  const PipelineConfig c = effective_config(common, f);
  const SweepConfig sc = c.sweep_config();
  checked([&] {
    sc.validate();
    c.flow.validate();
  });
  const auto backend = backend_for(c);
  const Checkpoint ckpt = load_ckpt(f.checkpoint);
  const fs::path out(common.out);
  claim(out / "sweep", common.force);
  echo_config(c, out, "sweep");

  const Generator<double> gen = restore_generator<double>(ckpt);
  std::cout << "sweeping " << sc.labels().size() << " labels x " << sc.samples_per_label << " shapes ("
            << to_string(ckpt.regime) << ", iteration " << ckpt.iteration << ") with " << backend->id() << "\n";
  const SweepReport rep = run_sweep(gen, sc, *backend, c.flow, c.jobs);
  emit_report(rep, out / "sweep", c.export_labels);
  const auto& a = rep.aggregate;
  std::printf("non-converged %.1f%%  failure %.1f%%  success %.1f%%  mse %.4g  mu %.4g\n", 100 * a.rate_nonconverged,
              100 * a.rate_failure, 100 * a.rate_success, a.mse, a.mu);
  return kExitOk;
}

// ---------------------------------------------------------------- report

int run_report(const Common& common, const Flags& f) {
  if (f.sweeps.empty()) throw UsageError("--sweep is required (one per model)");
  if (!f.names.empty() && f.names.size() != f.sweeps.size()) throw UsageError("--name count must match --sweep count");
  std::vector<nlohmann::json> summaries;
  for (const auto& s : f.sweeps) {
    fs::path p(s);
    if (fs::is_directory(p / "sweep")) p /= "sweep";
    std::ifstream in(p / "summary.json");
    if (!in) throw std::runtime_error("cannot read " + (p / "summary.json").string());
    summaries.push_back(nlohmann::json::parse(in));
  }
  const fs::path out(common.out);
  claim(out / "report", common.force);
  fs::create_directories(out / "report");

  std::ofstream csv(out / "report" / "comparison.csv");
  csv << "model,rate_nonconverged,rate_failure,rate_success,mse,mse_pooled,mu\n";
  std::printf("%-16s %10s %10s %10s %10s %10s\n", "model", "nonconv", "failure", "success", "mse", "mu");
  auto value = [](const nlohmann::json& j, const char* k) {
    return j.at(k).is_null() ? std::nan("") : j.at(k).get<double>();
  };
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& j = summaries[i];
    const std::string name = f.names.empty() ? f.sweeps[i] : f.names[i];
    csv << name << ',' << format_double(value(j, "rate_nonconverged")) << ','
        << format_double(value(j, "rate_failure")) << ',' << format_double(value(j, "rate_success")) << ','
        << format_double(value(j, "mse")) << ',' << format_double(value(j, "mse_pooled")) << ','
        << format_double(value(j, "mu")) << '\n';
    std::printf("%-16s %9.1f%% %9.1f%% %9.1f%% %10.4g %10.4g\n", name.c_str(), 100 * value(j, "rate_nonconverged"),
                100 * value(j, "rate_failure"), 100 * value(j, "rate_success"), value(j, "mse"), value(j, "mu"));
  }
  if (!csv) throw std::runtime_error("cannot write comparison table");
  return kExitOk;
}

// ---------------------------------------------------------------- js-check

std::vector<double> random_distribution(std::size_t k, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution zero(0.15);
  std::vector<double> p(k);
  double sum = 0.0;
  for (auto& v : p) {
    v = zero(rng) ? 0.0 : e(rng);
    sum += v;
  }
  if (sum == 0.0) {
    p[0] = 1.0;
    sum = 1.0;
  }
  for (auto& v : p) v /= sum;
  return p;
}

int run_js_check(const Common& common, const Flags& f) {
  const PipelineConfig c = effective_config(common, f);
  if (f.trials == 0) throw UsageError("--trials must be at least 1");
  Rng rng = make_rng(c.seed, SeedStream::shuffle);
  std::uniform_int_distribution<std::size_t> size(2, 32);
  double worst = 0.0;
  JsIdentity last{};
  for (std::size_t t = 0; t < f.trials; ++t) {
    const std::size_t k = size(rng);
    const auto pr = random_distribution(k, rng);
    const auto pg = f.equal ? pr : random_distribution(k, rng);
    last = js_identity_check(pr, pg);
    worst = std::max(worst, std::abs(last.value_at_optimum - last.rhs));
  }
  if (f.trials == 1) {
    std::printf("V(D*,G) = %.17g\n2 JS - 2 log 2 = %.17g\n", last.value_at_optimum, last.rhs);
  }
  std::printf("trials %zu  max |V(D*,G) - (2 JS - 2 log 2)| = %.3e\n", f.trials, worst);
  return worst > 1e-9 ? kExitRuntime : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional GAN airfoil design pipeline"};
  app.require_subcommand(1);
  Common common;
  Flags f;

  app.add_option("--config", common.config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--set", common.sets, "Override a config key: section.key=value (repeatable)");
  app.add_option("--seed", common.seed, "Master seed");
  app.add_option("--jobs", common.jobs, "Worker threads for CL evaluation");
  app.add_option("--out", common.out, "Output root (dataset/, checkpoints/, sweep/, logs/)");
  app.add_flag("--force", common.force, "Overwrite existing outputs");

  auto* build = app.add_subcommand("build-dataset", "Enumerate NACA 4-digit sections and label them with CL");
  build->add_option("--alpha", f.alpha, "Angle of attack [deg]");
  build->add_option("--reynolds", f.reynolds, "Reynolds number (xfoil only)");
  build->add_option("--backend", f.backend, "panel or xfoil");
  build->add_option("--xfoil", f.xfoil, "Path to the xfoil executable");
  build->add_option("--codes", f.codes, "Restrict to these 4-digit codes (default: all 9,900)")->delimiter(',');

  auto* trn = app.add_subcommand("train", "Train a cgan or cwgan-gp model");
  trn->add_option("--regime", f.regime, "cgan or cwgan-gp");
  trn->add_option("--latent-dim", f.latent_dim, "Latent dimension");
  trn->add_option("--iterations", f.iterations, "Training iterations");
  trn->add_option("--dataset", f.dataset, "Dataset table, or a directory holding dataset/dataset.csv")->required();

  auto* gen = app.add_subcommand("generate", "Generate shapes for given labels from a checkpoint");
  gen->add_option("--checkpoint", f.checkpoint, "Checkpoint file")->required();
  gen->add_option("--label", f.generate_labels, "Target CL (repeatable)")->required();
  gen->add_option("--n", f.n, "Shapes per label");
  gen->add_option("--backend", f.backend, "panel or xfoil");
  gen->add_option("--xfoil", f.xfoil, "Path to the xfoil executable");

  auto* swp = app.add_subcommand("sweep", "Evaluate a checkpoint over a label sweep");
  swp->add_option("--checkpoint", f.checkpoint, "Checkpoint file")->required();
  swp->add_option("--backend", f.backend, "panel or xfoil");
  swp->add_option("--xfoil", f.xfoil, "Path to the xfoil executable");
  swp->add_option("--labels", f.labels, "start:step:end");
  swp->add_option("--n", f.n, "Shapes per label");

  auto* rep = app.add_subcommand("report", "Compare sweep summaries side by side");
  rep->add_option("--sweep", f.sweeps, "Sweep output directory (repeatable)")->required();
  rep->add_option("--name", f.names, "Display name per sweep");

  auto* js = app.add_subcommand("js-check", "Check the optimal-discriminator JS identity on random distributions");
  js->add_option("--trials", f.trials, "Random distribution pairs");
  js->add_flag("--equal", f.equal, "Use p_r = p_g");

  for (auto* sub : {build, trn, gen, swp, rep, js}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*build) return run_build_dataset(common, f);
    if (*trn) return run_train(common, f);
    if (*gen) return run_generate(common, f);
    if (*swp) return run_sweep_cmd(common, f);
    if (*rep) return run_report(common, f);
    if (*js) return run_js_check(common, f);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverConfigError& e) {
    std::cerr << "solver config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
