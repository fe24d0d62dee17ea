#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "foilgan/geometry.hpp"
#include "foilgan/rng.hpp"

namespace foilgan {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

enum class CriticHead { sigmoid, linear };

std::string_view to_string(CriticHead head);
CriticHead parse_critic_head(std::string_view name);

struct GeneratorSpec {
  std::size_t latent_dim = 3;
  std::vector<std::size_t> hidden_widths{64, 128, 256, 512};
  std::size_t output_dim = kShapeDim;
  std::size_t label_dim = 1;

  void validate() const;
  // Layer sizes from input (latent + label) to output.
  std::vector<std::size_t> layer_sizes() const;
  std::size_t parameter_count() const;

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

struct CriticSpec {
  std::size_t input_dim = kShapeDim;
  std::vector<std::size_t> hidden_widths{512, 256};
  std::size_t output_dim = 1;
  std::size_t label_dim = 1;
  CriticHead head = CriticHead::linear;

  void validate() const;
  std::vector<std::size_t> layer_sizes() const;
  std::size_t parameter_count() const;

  friend bool operator==(const CriticSpec&, const CriticSpec&) = default;
};

// Closed-form parameter count of a fully connected stack: sum of (in + 1) * out.
std::size_t dense_parameter_count(std::span<const std::size_t> layer_sizes);

enum class Activation { relu, leaky_relu };
inline constexpr double kLeakySlope = 0.2;
inline constexpr double kInitStd = 0.02;

template <typename T>
struct DenseLayer {
  Mat<T> weight;  // out x in
  Vec<T> bias;    // out
};

template <typename T>
using Parameters = std::vector<DenseLayer<T>>;

template <typename T>
Parameters<T> zeros_like(const Parameters<T>& p) {
  Parameters<T> z(p.size());
  for (std::size_t l = 0; l < p.size(); ++l) {
    z[l].weight = Mat<T>::Zero(p[l].weight.rows(), p[l].weight.cols());
    z[l].bias = Vec<T>::Zero(p[l].bias.size());
  }
  return z;
}

template <typename T>
void set_zero(Parameters<T>& p) {
  for (auto& layer : p) {
    layer.weight.setZero();
    layer.bias.setZero();
  }
}

template <typename T>
std::size_t count_parameters(const Parameters<T>& p) {
  std::size_t n = 0;
  for (const auto& layer : p) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  return n;
}

// Declared order: per layer, weight (column-major) then bias.
template <typename T>
std::vector<double> flatten(const Parameters<T>& p) {
  std::vector<double> flat;
  flat.reserve(count_parameters(p));
  for (const auto& layer : p) {
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) flat.push_back(static_cast<double>(layer.weight.data()[i]));
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) flat.push_back(static_cast<double>(layer.bias.data()[i]));
  }
  return flat;
}

template <typename T>
void unflatten(Parameters<T>& p, std::span<const double> flat) {
  if (flat.size() != count_parameters(p)) throw std::invalid_argument("parameter vector length mismatch");
  std::size_t k = 0;
  for (auto& layer : p) {
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = static_cast<T>(flat[k++]);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias.data()[i] = static_cast<T>(flat[k++]);
  }
}

// FNV-1a over the raw parameter bytes.
template <typename T>
std::uint64_t parameter_hash(const Parameters<T>& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const T* data, Eigen::Index n) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n) * sizeof(T); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& layer : p) {
    mix(layer.weight.data(), layer.weight.size());
    mix(layer.bias.data(), layer.bias.size());
  }
  return h;
}

template <typename T>
struct MlpCache {
  std::vector<Mat<T>> inputs;  // input to each layer
  std::vector<Mat<T>> pre;     // pre-activation of each layer
};

// Fully connected stack; hidden layers use `hidden`, the output layer is linear.
// Samples are columns.
template <typename T>
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::span<const std::size_t> layer_sizes, Activation hidden) : hidden_(hidden) {
    if (layer_sizes.size() < 2) throw std::invalid_argument("an MLP needs input and output sizes");
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
      DenseLayer<T> layer;
      layer.weight = Mat<T>::Zero(static_cast<Eigen::Index>(layer_sizes[l + 1]), static_cast<Eigen::Index>(layer_sizes[l]));
      layer.bias = Vec<T>::Zero(static_cast<Eigen::Index>(layer_sizes[l + 1]));
      params_.push_back(std::move(layer));
    }
  }

  void init_normal(Rng& rng, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (auto& layer : params_) {
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = static_cast<T>(dist(rng));
      layer.bias.setZero();
    }
  }

  std::size_t input_dim() const { return static_cast<std::size_t>(params_.front().weight.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(params_.back().weight.rows()); }
  Activation hidden_activation() const { return hidden_; }

  Parameters<T>& parameters() { return params_; }
  const Parameters<T>& parameters() const { return params_; }

  Mat<T> forward(const Mat<T>& input, MlpCache<T>* cache) const {
    if (static_cast<std::size_t>(input.rows()) != input_dim()) {
      throw std::invalid_argument("MLP input has " + std::to_string(input.rows()) + " rows, expected " +
                                  std::to_string(input_dim()));
    }
    if (cache) {
      cache->inputs.resize(params_.size());
      cache->pre.resize(params_.size());
    }
    Mat<T> h = input;
    for (std::size_t l = 0; l < params_.size(); ++l) {
      Mat<T> a = params_[l].weight * h;
      a.colwise() += params_[l].bias;
      if (cache) {
        cache->inputs[l] = std::move(h);
        cache->pre[l] = a;
      }
      if (l + 1 < params_.size()) {
        h = activate(a);
      } else {
        h = std::move(a);
      }
    }
    return h;
  }

  // dout = dLoss/dOutput. Adds parameter gradients to `grads` when given and
  // returns dLoss/dInput.
  Mat<T> backward(const MlpCache<T>& cache, const Mat<T>& dout, Parameters<T>* grads) const {
    Mat<T> delta = dout;
    for (std::size_t l = params_.size(); l-- > 0;) {
      if (grads) {
        (*grads)[l].weight.noalias() += delta * cache.inputs[l].transpose();
        (*grads)[l].bias += delta.rowwise().sum();
      }
      Mat<T> g = params_[l].weight.transpose() * delta;
      if (l > 0) {
        delta = g.cwiseProduct(derivative(cache.pre[l - 1]));
      } else {
        return g;
      }
    }
    return delta;
  }

  // Gradient penalty on a scalar-output MLP:
  //   value = lambda / B * sum_b (||g_b|| - 1)^2,
  // g_b the gradient of output b w.r.t. the first `n_penalized` input rows.
  // Hidden activations are piecewise linear, so the second-order terms vanish
  // and the parameter gradient follows from differentiating the input-gradient
  // recursion g = W1^T D1 W2^T D2 ... wL. Biases receive no gradient.
  double input_gradient_penalty(const MlpCache<T>& cache, std::size_t n_penalized, double lambda, Parameters<T>* grads,
                                std::vector<double>* norms = nullptr) const {
    if (output_dim() != 1) throw std::invalid_argument("gradient penalty needs a scalar output");
    const std::size_t depth = params_.size();
    const Eigen::Index batch = cache.inputs[0].cols();
    const auto n_pen = static_cast<Eigen::Index>(n_penalized);

    // Forward sweep of the input-gradient recursion. deltas[l] is dOutput/dPre[l].
    std::vector<Mat<T>> deltas(depth);
    std::vector<Mat<T>> slopes(depth);
    deltas[depth - 1] = Mat<T>::Ones(1, batch);
    for (std::size_t l = depth - 1; l > 0; --l) {
      slopes[l - 1] = derivative(cache.pre[l - 1]);
      deltas[l - 1] = (params_[l].weight.transpose() * deltas[l]).cwiseProduct(slopes[l - 1]);
    }
    const Mat<T> g0 = params_[0].weight.transpose() * deltas[0];

    // r = dValue/dg0, zero on the unpenalized (label) rows.
    Mat<T> r = Mat<T>::Zero(g0.rows(), batch);
    double value = 0.0;
    if (norms) norms->assign(static_cast<std::size_t>(batch), 0.0);
    const double scale = lambda / static_cast<double>(batch);
    for (Eigen::Index b = 0; b < batch; ++b) {
      const double norm = static_cast<double>(g0.col(b).head(n_pen).norm());
      if (norms) (*norms)[static_cast<std::size_t>(b)] = norm;
      value += (norm - 1.0) * (norm - 1.0);
      if (norm > 0.0) {
        r.col(b).head(n_pen) = g0.col(b).head(n_pen) * static_cast<T>(scale * 2.0 * (norm - 1.0) / norm);
      }
    }
    value *= scale;

    if (grads) {
      for (std::size_t l = 0; l < depth; ++l) {
        // g_{l} = W_{l}^T delta_{l}  =>  dValue/dW_l = delta_l r^T, dValue/ddelta_l = W_l r.
        (*grads)[l].weight.noalias() += deltas[l] * r.transpose();
        if (l + 1 == depth) break;
        Mat<T> s = params_[l].weight * r;
        r = s.cwiseProduct(slopes[l]);
      }
    }
    return value;
  }

 private:
  Mat<T> activate(const Mat<T>& a) const {
    if (hidden_ == Activation::relu) return a.cwiseMax(T(0));
    return a.unaryExpr([](T v) { return v > T(0) ? v : static_cast<T>(kLeakySlope) * v; });
  }

  Mat<T> derivative(const Mat<T>& a) const {
    const T neg = hidden_ == Activation::relu ? T(0) : static_cast<T>(kLeakySlope);
    return a.unaryExpr([neg](T v) { return v > T(0) ? T(1) : neg; });
  }

  Parameters<T> params_;
  Activation hidden_ = Activation::relu;
};

template <typename T>
Mat<T> stack_with_labels(const Mat<T>& top, const RowVec<T>& labels) {
  if (top.cols() != labels.cols()) throw std::invalid_argument("batch size differs between inputs and labels");
  Mat<T> in(top.rows() + 1, top.cols());
  in.topRows(top.rows()) = top;
  in.bottomRows(1) = labels;
  return in;
}

// G(z | y): rectifier hidden layers, linear output. Label appended to z.
template <typename T>
class Generator {
 public:
  explicit Generator(GeneratorSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const auto sizes = spec_.layer_sizes();
    net_ = Mlp<T>(sizes, Activation::relu);
  }

  Generator(GeneratorSpec spec, Rng& init_rng) : Generator(std::move(spec)) { net_.init_normal(init_rng, kInitStd); }

  const GeneratorSpec& spec() const { return spec_; }
  Parameters<T>& parameters() { return net_.parameters(); }
  const Parameters<T>& parameters() const { return net_.parameters(); }

  // z: latent_dim x B, labels: 1 x B -> output_dim x B.
  Mat<T> generate(const Mat<T>& z, const RowVec<T>& labels, MlpCache<T>* cache = nullptr) const {
    if (static_cast<std::size_t>(z.rows()) != spec_.latent_dim) {
      throw std::invalid_argument("latent vector has dimension " + std::to_string(z.rows()) + ", expected " +
                                  std::to_string(spec_.latent_dim));
    }
    if (!labels.allFinite()) throw std::invalid_argument("generation label must be finite");
    return net_.forward(stack_with_labels(z, labels), cache);
  }

  std::vector<double> generate_one(std::span<const double> z, double label) const {
    Mat<T> zm(static_cast<Eigen::Index>(z.size()), 1);
    for (std::size_t i = 0; i < z.size(); ++i) zm(static_cast<Eigen::Index>(i), 0) = static_cast<T>(z[i]);
    RowVec<T> y(1);
    y(0) = static_cast<T>(label);
    const Mat<T> out = generate(zm, y);
    std::vector<double> v(static_cast<std::size_t>(out.rows()));
    for (Eigen::Index i = 0; i < out.rows(); ++i) v[static_cast<std::size_t>(i)] = static_cast<double>(out(i, 0));
    return v;
  }

  // Returns nothing: only parameter gradients are of interest upstream of z.
  void backward(const MlpCache<T>& cache, const Mat<T>& dout, Parameters<T>& grads) const {
    net_.backward(cache, dout, &grads);
  }

  Mat<T> sample_latent(Eigen::Index batch, Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat<T> z(static_cast<Eigen::Index>(spec_.latent_dim), batch);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = static_cast<T>(normal(rng));
    return z;
  }

 private:
  GeneratorSpec spec_;
  Mlp<T> net_;
};

// D(x | y) / f_w(x | y): leaky-rectifier hidden layers, label appended to x.
template <typename T>
class Critic {
 public:
  explicit Critic(CriticSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const auto sizes = spec_.layer_sizes();
    net_ = Mlp<T>(sizes, Activation::leaky_relu);
  }

  Critic(CriticSpec spec, Rng& init_rng) : Critic(std::move(spec)) { net_.init_normal(init_rng, kInitStd); }

  const CriticSpec& spec() const { return spec_; }
  Parameters<T>& parameters() { return net_.parameters(); }
  const Parameters<T>& parameters() const { return net_.parameters(); }

  // Pre-head output, 1 x B.
  Mat<T> logits(const Mat<T>& x, const RowVec<T>& labels, MlpCache<T>* cache = nullptr) const {
    check_input(x);
    return net_.forward(stack_with_labels(x, labels), cache);
  }

  // Head applied: in (0,1) for sigmoid, unbounded for linear.
  Mat<T> criticize(const Mat<T>& x, const RowVec<T>& labels, MlpCache<T>* cache = nullptr) const {
    Mat<T> out = logits(x, labels, cache);
    if (spec_.head == CriticHead::sigmoid) out = out.unaryExpr([](T v) { return sigmoid(v); });
    return out;
  }

  // dlogits = dLoss/dlogits (1 x B). Returns dLoss/dx (input_dim x B), label row dropped.
  Mat<T> backward_logits(const MlpCache<T>& cache, const Mat<T>& dlogits, Parameters<T>* grads) const {
    Mat<T> din = net_.backward(cache, dlogits, grads);
    return din.topRows(static_cast<Eigen::Index>(spec_.input_dim));
  }

  // Same as backward_logits but with dLoss/dOutput after the head.
  Mat<T> backward_output(const MlpCache<T>& cache, const Mat<T>& dout, Parameters<T>* grads) const {
    Mat<T> dlogits = dout;
    if (spec_.head == CriticHead::sigmoid) {
      const Mat<T>& a = cache.pre.back();
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        const T s = sigmoid(a.data()[i]);
        dlogits.data()[i] *= s * (T(1) - s);
      }
    }
    return backward_logits(cache, dlogits, grads);
  }

  // d criticize / dx for each column.
  Mat<T> input_gradient(const Mat<T>& x, const RowVec<T>& labels) const {
    MlpCache<T> cache;
    const Mat<T> out = criticize(x, labels, &cache);
    return backward_output(cache, Mat<T>::Ones(1, out.cols()), nullptr);
  }

  // Requires the linear head; see Mlp::input_gradient_penalty.
  double gradient_penalty_at(const Mat<T>& x, const RowVec<T>& labels, double lambda, Parameters<T>* grads,
                             std::vector<double>* norms = nullptr) const {
    if (spec_.head != CriticHead::linear) throw std::invalid_argument("gradient penalty requires the linear critic head");
    MlpCache<T> cache;
    logits(x, labels, &cache);
    return net_.input_gradient_penalty(cache, spec_.input_dim, lambda, grads, norms);
  }

  static T sigmoid(T v) {
    return v >= T(0) ? T(1) / (T(1) + std::exp(-v)) : std::exp(v) / (T(1) + std::exp(v));
  }

 private:
  void check_input(const Mat<T>& x) const {
    if (static_cast<std::size_t>(x.rows()) != spec_.input_dim) {
      throw std::invalid_argument("critic input has dimension " + std::to_string(x.rows()) + ", expected " +
                                  std::to_string(spec_.input_dim));
    }
  }

  CriticSpec spec_;
  Mlp<T> net_;
};

template <typename T, typename U>
Parameters<T> cast_parameters(const Parameters<U>& p) {
  Parameters<T> out(p.size());
  for (std::size_t l = 0; l < p.size(); ++l) {
    out[l].weight = p[l].weight.template cast<T>();
    out[l].bias = p[l].bias.template cast<T>();
  }
  return out;
}

template <typename T>
void assign_parameters(Parameters<T>& dst, const Parameters<double>& src) {
  if (dst.size() != src.size()) throw std::invalid_argument("layer count mismatch");
  for (std::size_t l = 0; l < dst.size(); ++l) {
    if (dst[l].weight.rows() != src[l].weight.rows() || dst[l].weight.cols() != src[l].weight.cols() ||
        dst[l].bias.size() != src[l].bias.size()) {
      throw std::invalid_argument("layer shape mismatch");
    }
    dst[l].weight = src[l].weight.template cast<T>();
    dst[l].bias = src[l].bias.template cast<T>();
  }
}

}  // namespace foilgan
