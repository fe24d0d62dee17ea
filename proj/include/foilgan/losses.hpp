#pragma once

#include <span>
#include <stdexcept>

namespace foilgan {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GeneratorLossForm { non_saturating, minimax };

struct AdversarialLosses {
  double critic;
  double generator;
};

// Probabilities are clamped to [eps, 1 - eps] before taking logs.
inline constexpr double kProbabilityClamp = 1e-7;

// loss_D = -mean(log d_real) - mean(log(1 - d_fake));
// loss_G = -mean(log d_fake) (non-saturating) or mean(log(1 - d_fake)) (minimax).
// Throws NumericalError for empty batches or values outside [0, 1] / NaN.
AdversarialLosses cgan_losses(std::span<const double> d_real, std::span<const double> d_fake,
                              GeneratorLossForm form = GeneratorLossForm::non_saturating);

// critic core = mean(f_fake) - mean(f_real), generator = -mean(f_fake).
// The EM estimate is the negated critic core.
AdversarialLosses wgan_losses(std::span<const double> f_real, std::span<const double> f_fake);

struct JsIdentity {
  double value_at_optimum;  // V(D*, G) with D* = p_r / (p_r + p_g)
  double rhs;               // 2 JS(p_r || p_g) - 2 log 2
};

// Both sides computed independently; 0 log 0 is taken as 0. Throws
// std::invalid_argument unless both are non-negative, equally sized and sum
// to 1 within 1e-9.
JsIdentity js_identity_check(std::span<const double> p_r, std::span<const double> p_g);

}  // namespace foilgan
