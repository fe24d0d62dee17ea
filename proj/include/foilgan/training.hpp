#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "foilgan/checkpoint.hpp"
#include "foilgan/dataset.hpp"
#include "foilgan/losses.hpp"
#include "foilgan/nets.hpp"
#include "foilgan/rng.hpp"

namespace foilgan {

enum class PenaltySampling { interpolates, real_only };

std::string_view to_string(PenaltySampling s);
PenaltySampling parse_penalty_sampling(std::string_view name);
std::string_view to_string(GeneratorLossForm f);
GeneratorLossForm parse_generator_loss(std::string_view name);

struct TrainConfig {
  Regime regime = Regime::cwgan_gp;
  std::size_t latent_dim = 3;
  double learning_rate = 1e-4;
  std::size_t critic_steps_per_iter = 5;
  double gp_lambda = 10.0;
  std::size_t batch_size = 64;
  std::size_t total_iterations = 20000;
  std::uint64_t seed = 0;

  PenaltySampling gp_sampling = PenaltySampling::interpolates;
  GeneratorLossForm cgan_generator_loss = GeneratorLossForm::non_saturating;
  // Unset: 0.5 for both regimes, 0.9 (cwgan_gp) or 0.999 (cgan).
  std::optional<double> beta1;
  std::optional<double> beta2;
  std::size_t checkpoint_every = 0;

  double adam_beta1() const { return beta1.value_or(0.5); }
  double adam_beta2() const { return beta2.value_or(regime == Regime::cwgan_gp ? 0.9 : 0.999); }

  void validate() const;
};

struct LossRecord {
  std::size_t iteration = 0;
  double critic_loss = 0.0;     // last critic step: core (+ penalty for cwgan_gp)
  double generator_loss = 0.0;
  double critic_core = 0.0;     // cgan: loss_D; cwgan_gp: mean f_fake - mean f_real
  double penalty = 0.0;
};

struct CheckpointRef {
  std::size_t iteration;
  std::filesystem::path path;
};

struct TrainRun {
  TrainConfig config;
  std::vector<LossRecord> loss_history;
  std::vector<CheckpointRef> checkpoints;
};

class TrainingDivergedError : public NumericalError {
 public:
  TrainingDivergedError(const std::string& what, LossRecord snapshot) : NumericalError(what), snapshot_(snapshot) {}
  const LossRecord& snapshot() const { return snapshot_; }

 private:
  LossRecord snapshot_;
};

// Writes "iteration,critic_loss,generator_loss,critic_core,penalty" rows.
void write_loss_history(const std::vector<LossRecord>& history, const std::filesystem::path& path);

template <typename T>
class Adam {
 public:
  Adam(const Parameters<T>& like, double lr, double beta1, double beta2, double eps = 1e-8)
      : m_(zeros_like(like)), v_(zeros_like(like)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(Parameters<T>& params, const Parameters<T>& grads) {
    ++t_;
    const T b1 = static_cast<T>(beta1_);
    const T b2 = static_cast<T>(beta2_);
    const T c1 = static_cast<T>(1.0 - std::pow(beta1_, static_cast<double>(t_)));
    const T c2 = static_cast<T>(1.0 - std::pow(beta2_, static_cast<double>(t_)));
    const T lr = static_cast<T>(lr_);
    const T eps = static_cast<T>(eps_);
    auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
      m.array() = b1 * m.array() + (T(1) - b1) * g.array();
      v.array() = b2 * v.array() + (T(1) - b2) * g.array().square();
      p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    };
    for (std::size_t l = 0; l < params.size(); ++l) {
      update(params[l].weight, m_[l].weight, v_[l].weight, grads[l].weight);
      update(params[l].bias, m_[l].bias, v_[l].bias, grads[l].bias);
    }
  }

  std::size_t steps() const { return t_; }

 private:
  Parameters<T> m_;
  Parameters<T> v_;
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  std::size_t t_ = 0;
};

// lambda * mean_b (||grad_x f(x_hat_b | y_b)||_2 - 1)^2 with
// x_hat = u x_real + (1 - u) x_fake, u ~ U[0, 1] per sample (or x_hat = x_real
// for real_only). The gradient is taken w.r.t. the shape coordinates only.
// Adds the parameter gradient of the penalty to `grads` when given.
template <typename T>
double gradient_penalty(const Critic<T>& critic, const Mat<T>& x_real, const Mat<T>& x_fake, const RowVec<T>& labels,
                        double lambda, Rng& rng, PenaltySampling sampling = PenaltySampling::interpolates,
                        Parameters<T>* grads = nullptr) {
  if (x_real.rows() != x_fake.rows() || x_real.cols() != x_fake.cols()) {
    throw std::invalid_argument("real and fake batches differ in shape");
  }
  if (sampling == PenaltySampling::real_only) return critic.gradient_penalty_at(x_real, labels, lambda, grads);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Mat<T> x_hat(x_real.rows(), x_real.cols());
  for (Eigen::Index b = 0; b < x_real.cols(); ++b) {
    const T u = static_cast<T>(uniform(rng));
    x_hat.col(b) = u * x_real.col(b) + (T(1) - u) * x_fake.col(b);
  }
  return critic.gradient_penalty_at(x_hat, labels, lambda, grads);
}

template <typename T>
struct TrainOutcome {
  TrainRun run;
  Generator<T> generator;
  Critic<T> critic;
};

struct TrainOptions {
  // Checkpoints are written here when set: every checkpoint_every iterations
  // and once at the end.
  std::optional<std::filesystem::path> checkpoint_dir;
  std::function<void(const LossRecord&)> on_iteration;
  // Called after every critic step and generator step with
  // (is_critic_step, generator hash before, generator hash after,
  //  critic hash before, critic hash after). Test hook; costs a hash per step.
  std::function<void(bool, std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t)> on_update;
};

// Adversarial training loop. Each iteration runs critic_steps_per_iter critic
// updates followed by one generator update, both with Adam. Deterministic
// given config.seed.
template <typename T>
TrainOutcome<T> train(const DatasetManifest& dataset, const GeneratorSpec& gen_spec, const CriticSpec& critic_spec,
                      const TrainConfig& config, const TrainOptions& options = {}) {
  config.validate();
  if (dataset.records.empty()) throw std::invalid_argument("training needs a non-empty dataset");
  if (gen_spec.latent_dim != config.latent_dim) throw std::invalid_argument("generator latent_dim differs from config");
  if (critic_spec.head != required_head(config.regime)) {
    throw std::invalid_argument(std::string("regime ") + std::string(to_string(config.regime)) + " requires the " +
                                std::string(to_string(required_head(config.regime))) + " critic head");
  }
  if (critic_spec.input_dim != gen_spec.output_dim) throw std::invalid_argument("critic input_dim differs from generator output");

  const auto n = static_cast<Eigen::Index>(dataset.records.size());
  const auto dim = static_cast<Eigen::Index>(gen_spec.output_dim);
  Mat<T> data(dim, n);
  RowVec<T> data_labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& rec = dataset.records[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(rec.shape.coords().size()) != dim) throw std::invalid_argument("record dimension mismatch");
    for (Eigen::Index k = 0; k < dim; ++k) data(k, i) = static_cast<T>(rec.shape.coords()[static_cast<std::size_t>(k)]);
    data_labels(i) = static_cast<T>(rec.cl);
  }

  Rng gen_init = make_rng(config.seed, SeedStream::generator_init);
  Rng critic_init = make_rng(config.seed, SeedStream::critic_init);
  Rng batch_rng = make_rng(config.seed, SeedStream::batches);
  Rng latent_rng = make_rng(config.seed, SeedStream::latent);
  Rng penalty_rng = make_rng(config.seed, SeedStream::penalty);

  TrainOutcome<T> out{{config, {}, {}}, Generator<T>(gen_spec, gen_init), Critic<T>(critic_spec, critic_init)};
  Generator<T>& gen = out.generator;
  Critic<T>& critic = out.critic;

  Adam<T> gen_opt(gen.parameters(), config.learning_rate, config.adam_beta1(), config.adam_beta2());
  Adam<T> critic_opt(critic.parameters(), config.learning_rate, config.adam_beta1(), config.adam_beta2());
  Parameters<T> gen_grads = zeros_like(gen.parameters());
  Parameters<T> critic_grads = zeros_like(critic.parameters());

  const auto batch = static_cast<Eigen::Index>(config.batch_size);
  const T inv_batch = T(1) / static_cast<T>(batch);

  // Epoch-wise shuffled real batches.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::size_t cursor = order.size();
  auto next_real_batch = [&](Mat<T>& x, RowVec<T>& y) {
    x.resize(dim, batch);
    y.resize(batch);
    for (Eigen::Index b = 0; b < batch; ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), batch_rng);
        cursor = 0;
      }
      const Eigen::Index i = order[cursor++];
      x.col(b) = data.col(i);
      y(b) = data_labels(i);
    }
  };
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  auto random_labels = [&] {
    RowVec<T> y(batch);
    for (Eigen::Index b = 0; b < batch; ++b) y(b) = data_labels(pick(batch_rng));
    return y;
  };
  auto to_doubles = [](const Mat<T>& m) {
    std::vector<double> v(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) v[static_cast<std::size_t>(i)] = static_cast<double>(m.data()[i]);
    return v;
  };
  auto sigmoid_all = [](const Mat<T>& logits) {
    std::vector<double> v(static_cast<std::size_t>(logits.size()));
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
      v[static_cast<std::size_t>(i)] = static_cast<double>(Critic<T>::sigmoid(logits.data()[i]));
    }
    return v;
  };
  auto hashes = [&] { return std::pair{parameter_hash(gen.parameters()), parameter_hash(critic.parameters())}; };

  auto save = [&](std::size_t iteration, const std::string& name) {
    if (!options.checkpoint_dir) return;
    const auto path = *options.checkpoint_dir / name;
    save_checkpoint(make_checkpoint(config.regime, config.seed, iteration, gen, critic), path);
    out.run.checkpoints.push_back({iteration, path});
  };

  Mat<T> x_real;
  RowVec<T> y_real;
  MlpCache<T> cache_real;
  MlpCache<T> cache_fake;
  MlpCache<T> gen_cache;

  for (std::size_t it = 1; it <= config.total_iterations; ++it) {
    LossRecord rec;
    rec.iteration = it;

    for (std::size_t step = 0; step < config.critic_steps_per_iter; ++step) {
      const auto before = options.on_update ? hashes() : std::pair<std::uint64_t, std::uint64_t>{};
      next_real_batch(x_real, y_real);
      const Mat<T> x_fake = gen.generate(gen.sample_latent(batch, latent_rng), y_real);
      set_zero(critic_grads);
      const Mat<T> a_real = critic.logits(x_real, y_real, &cache_real);
      const Mat<T> a_fake = critic.logits(x_fake, y_real, &cache_fake);

      if (config.regime == Regime::cwgan_gp) {
        const AdversarialLosses l = wgan_losses(to_doubles(a_real), to_doubles(a_fake));
        critic.backward_logits(cache_real, Mat<T>::Constant(1, batch, -inv_batch), &critic_grads);
        critic.backward_logits(cache_fake, Mat<T>::Constant(1, batch, inv_batch), &critic_grads);
        rec.critic_core = l.critic;
        rec.penalty = gradient_penalty(critic, x_real, x_fake, y_real, config.gp_lambda, penalty_rng, config.gp_sampling,
                                       &critic_grads);
        rec.critic_loss = rec.critic_core + rec.penalty;
      } else {
        const AdversarialLosses l = cgan_losses(sigmoid_all(a_real), sigmoid_all(a_fake), config.cgan_generator_loss);
        // d/da of -log sigmoid(a) is sigmoid(a) - 1; of -log(1 - sigmoid(a)) is sigmoid(a).
        const Mat<T> d_real = a_real.unaryExpr([&](T a) { return (Critic<T>::sigmoid(a) - T(1)) * inv_batch; });
        const Mat<T> d_fake = a_fake.unaryExpr([&](T a) { return Critic<T>::sigmoid(a) * inv_batch; });
        critic.backward_logits(cache_real, d_real, &critic_grads);
        critic.backward_logits(cache_fake, d_fake, &critic_grads);
        rec.critic_core = l.critic;
        rec.critic_loss = l.critic;
      }
      if (!std::isfinite(rec.critic_loss)) {
        throw TrainingDivergedError("non-finite critic loss at iteration " + std::to_string(it), rec);
      }
      critic_opt.step(critic.parameters(), critic_grads);
      if (options.on_update) {
        const auto after = hashes();
        options.on_update(true, before.first, after.first, before.second, after.second);
      }
    }

    const auto before = options.on_update ? hashes() : std::pair<std::uint64_t, std::uint64_t>{};
    const RowVec<T> y_gen = random_labels();
    const Mat<T> x_gen = gen.generate(gen.sample_latent(batch, latent_rng), y_gen, &gen_cache);
    const Mat<T> a_gen = critic.logits(x_gen, y_gen, &cache_fake);
    Mat<T> d_gen;
    if (config.regime == Regime::cwgan_gp) {
      rec.generator_loss = -static_cast<double>(a_gen.mean());
      d_gen = Mat<T>::Constant(1, batch, -inv_batch);
    } else {
      const std::vector<double> p = sigmoid_all(a_gen);
      rec.generator_loss = cgan_losses(p, p, config.cgan_generator_loss).generator;
      if (config.cgan_generator_loss == GeneratorLossForm::non_saturating) {
        d_gen = a_gen.unaryExpr([&](T a) { return (Critic<T>::sigmoid(a) - T(1)) * inv_batch; });
      } else {
        d_gen = a_gen.unaryExpr([&](T a) { return -Critic<T>::sigmoid(a) * inv_batch; });
      }
    }
    if (!std::isfinite(rec.generator_loss)) {
      throw TrainingDivergedError("non-finite generator loss at iteration " + std::to_string(it), rec);
    }
    const Mat<T> dx = critic.backward_logits(cache_fake, d_gen, nullptr);
    set_zero(gen_grads);
    gen.backward(gen_cache, dx, gen_grads);
    gen_opt.step(gen.parameters(), gen_grads);
    if (options.on_update) {
      const auto after = hashes();
      options.on_update(false, before.first, after.first, before.second, after.second);
    }

    out.run.loss_history.push_back(rec);
    if (options.on_iteration) options.on_iteration(rec);
    if (config.checkpoint_every > 0 && it % config.checkpoint_every == 0 && it != config.total_iterations) {
      char name[32];
      std::snprintf(name, sizeof name, "iter_%07zu.ckpt", it);
      save(it, name);
    }
  }
  save(config.total_iterations, "final.ckpt");
  return out;
}

}  // namespace foilgan
