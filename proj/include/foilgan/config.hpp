#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "foilgan/aero.hpp"
#include "foilgan/evaluation.hpp"
#include "foilgan/nets.hpp"
#include "foilgan/training.hpp"

namespace foilgan {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One schema shared by every subcommand. File form is INI:
//
//   [run]     seed, jobs
//   [flow]    alpha, reynolds
//   [solver]  backend, xfoil_path, xfoil_timeout, xfoil_iterations, xfoil_viscous
//   [train]   regime, latent_dim, learning_rate, critic_steps_per_iter, gp_lambda,
//             gp_sampling, batch_size, total_iterations, beta1, beta2,
//             cgan_generator_loss, checkpoint_every, log_every
//   [nets]    generator_widths, critic_widths, critic_head
//   [sweep]   label_start, label_step, label_end, samples_per_label,
//             failure_threshold, export_labels
struct PipelineConfig {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  FlowCondition flow;
  std::string backend = "panel";
  XfoilOptions xfoil;
  TrainConfig train;
  std::size_t log_every = 100;
  std::vector<std::size_t> generator_widths{64, 128, 256, 512};
  std::vector<std::size_t> critic_widths{512, 256};
  // Unset means "the head the regime requires".
  std::optional<CriticHead> critic_head;
  SweepConfig sweep;
  std::vector<double> export_labels = kDefaultExportLabels;

  GeneratorSpec generator_spec() const;
  CriticSpec critic_spec() const;
  // Train config with the run seed folded in.
  TrainConfig train_config() const;
  SweepConfig sweep_config() const;
};

// Defaults overlaid with the file. Unknown sections or keys, duplicate keys
// and malformed values raise ConfigError.
PipelineConfig load_config(const std::filesystem::path& path);

// key is "section.key"; the same validation as the file applies.
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

// All keys, every value explicit, in schema order. Parses back to an equal config.
std::string to_ini(const PipelineConfig& config);

std::vector<std::string> known_keys();

}  // namespace foilgan
