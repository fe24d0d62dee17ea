#include "foilgan/training.hpp"

#include <fstream>

#include "foilgan/numfmt.hpp"

namespace foilgan {

std::string_view to_string(PenaltySampling s) { return s == PenaltySampling::interpolates ? "interpolates" : "real_only"; }

PenaltySampling parse_penalty_sampling(std::string_view name) {
  if (name == "interpolates") return PenaltySampling::interpolates;
  if (name == "real_only") return PenaltySampling::real_only;
  throw std::invalid_argument("unknown gp_sampling '" + std::string(name) + "' (expected interpolates or real_only)");
}

std::string_view to_string(GeneratorLossForm f) {
  return f == GeneratorLossForm::non_saturating ? "non_saturating" : "minimax";
}

GeneratorLossForm parse_generator_loss(std::string_view name) {
  if (name == "non_saturating") return GeneratorLossForm::non_saturating;
  if (name == "minimax") return GeneratorLossForm::minimax;
  throw std::invalid_argument("unknown generator loss '" + std::string(name) + "' (expected non_saturating or minimax)");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (critic_steps_per_iter < 1) throw std::invalid_argument("critic_steps_per_iter must be at least 1");
  if (!(gp_lambda >= 0.0)) throw std::invalid_argument("gp_lambda must be non-negative");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (latent_dim < 1) throw std::invalid_argument("latent_dim must be at least 1");
  const double b1 = adam_beta1();
  const double b2 = adam_beta2();
  if (!(b1 >= 0.0 && b1 < 1.0) || !(b2 >= 0.0 && b2 < 1.0)) throw std::invalid_argument("Adam betas must be in [0, 1)");
}

void write_loss_history(const std::vector<LossRecord>& history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iteration,critic_loss,generator_loss,critic_core,penalty\n";
  for (const auto& r : history) {
    out << r.iteration << ',' << format_double(r.critic_loss) << ',' << format_double(r.generator_loss) << ','
        << format_double(r.critic_core) << ',' << format_double(r.penalty) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace foilgan
