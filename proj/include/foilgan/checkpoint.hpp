#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "foilgan/nets.hpp"

namespace foilgan {

enum class Regime { cgan, cwgan_gp };

std::string_view to_string(Regime regime);
// Accepts "cgan", "cwgan_gp" and "cwgan-gp".
Regime parse_regime(std::string_view name);

// The head each regime trains with.
CriticHead required_head(Regime regime);

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  Regime regime = Regime::cwgan_gp;
  std::uint64_t seed = 0;
  std::size_t iteration = 0;
  GeneratorSpec generator_spec;
  CriticSpec critic_spec;
  Parameters<double> generator;
  Parameters<double> critic;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename T>
Checkpoint make_checkpoint(Regime regime, std::uint64_t seed, std::size_t iteration, const Generator<T>& gen,
                           const Critic<T>& critic) {
  return {regime,
          seed,
          iteration,
          gen.spec(),
          critic.spec(),
          cast_parameters<double>(gen.parameters()),
          cast_parameters<double>(critic.parameters())};
}

// Binary container: 8-byte magic, u32 version, u64 header length, JSON
// header (specs, regime, seed, iteration, tensor table), then every tensor as
// little-endian float64 in declared order (generator layers, critic layers;
// per layer weight column-major, then bias).
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

// Rejects bad magic, unknown version, truncated data and tensor shapes that
// disagree with the stored specs. When expected specs are given, they must
// match the stored ones.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<GeneratorSpec>& expected_generator = std::nullopt,
                           const std::optional<CriticSpec>& expected_critic = std::nullopt);

template <typename T>
Generator<T> restore_generator(const Checkpoint& ckpt) {
  Generator<T> gen(ckpt.generator_spec);
  assign_parameters(gen.parameters(), ckpt.generator);
  return gen;
}

template <typename T>
Critic<T> restore_critic(const Checkpoint& ckpt) {
  Critic<T> critic(ckpt.critic_spec);
  assign_parameters(critic.parameters(), ckpt.critic);
  return critic;
}

}  // namespace foilgan
