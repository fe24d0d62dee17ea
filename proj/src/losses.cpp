#include "foilgan/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace foilgan {

namespace {

double clamp_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw NumericalError("discriminator output outside [0, 1]");
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

double mean_of(std::span<const double> v, double (*f)(double)) {
  double s = 0.0;
  for (double x : v) s += f(x);
  return s / static_cast<double>(v.size());
}

void require_finite(std::span<const double> v) {
  if (v.empty()) throw NumericalError("empty critic batch");
  if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
    throw NumericalError("non-finite critic output");
  }
}

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

void check_distribution(std::span<const double> p) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("probabilities must be finite and non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("distribution is not normalized");
}

}  // namespace

AdversarialLosses cgan_losses(std::span<const double> d_real, std::span<const double> d_fake, GeneratorLossForm form) {
  if (d_real.empty() || d_fake.empty()) throw NumericalError("empty discriminator batch");
  const double log_real = mean_of(d_real, [](double p) { return std::log(clamp_probability(p)); });
  const double log_one_minus_fake = mean_of(d_fake, [](double p) { return std::log1p(-clamp_probability(p)); });
  const double loss_d = -log_real - log_one_minus_fake;
  const double loss_g = form == GeneratorLossForm::non_saturating
                            ? -mean_of(d_fake, [](double p) { return std::log(clamp_probability(p)); })
                            : log_one_minus_fake;
  if (!std::isfinite(loss_d) || !std::isfinite(loss_g)) throw NumericalError("non-finite cGAN loss");
  return {loss_d, loss_g};
}

AdversarialLosses wgan_losses(std::span<const double> f_real, std::span<const double> f_fake) {
  require_finite(f_real);
  require_finite(f_fake);
  const double mean_real = std::accumulate(f_real.begin(), f_real.end(), 0.0) / static_cast<double>(f_real.size());
  const double mean_fake = std::accumulate(f_fake.begin(), f_fake.end(), 0.0) / static_cast<double>(f_fake.size());
  return {mean_fake - mean_real, -mean_fake};
}

JsIdentity js_identity_check(std::span<const double> p_r, std::span<const double> p_g) {
  if (p_r.size() != p_g.size() || p_r.empty()) throw std::invalid_argument("distributions must share a non-empty support");
  check_distribution(p_r);
  check_distribution(p_g);

  double value = 0.0;
  double kl_r = 0.0;
  double kl_g = 0.0;
  for (std::size_t i = 0; i < p_r.size(); ++i) {
    const double total = p_r[i] + p_g[i];
    if (total == 0.0) continue;
    const double d_star = p_r[i] / total;
    value += xlogy(p_r[i], d_star) + xlogy(p_g[i], 1.0 - d_star);
    const double mix = 0.5 * total;
    kl_r += xlogy(p_r[i], p_r[i] / mix);
    kl_g += xlogy(p_g[i], p_g[i] / mix);
  }
  const double js = 0.5 * kl_r + 0.5 * kl_g;
  return {value, 2.0 * js - 2.0 * std::numbers::ln2};
}

}  // namespace foilgan
