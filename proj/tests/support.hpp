#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "foilgan/nets.hpp"

namespace foilgan::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "foilgan_test_XXXXXX").string();
    if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void fill_normal(Parameters<double>& params, std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> n(0.0, stddev);
  for (auto& layer : params) {
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = n(rng);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias.data()[i] = n(rng);
  }
}

// Small random critic with scale-1/sqrt(fan_in) weights so activations are
// not all on one side of the kink.
inline Critic<double> random_critic(std::mt19937_64& rng, std::size_t input_dim, std::vector<std::size_t> hidden,
                                    CriticHead head) {
  CriticSpec spec;
  spec.input_dim = input_dim;
  spec.hidden_widths = std::move(hidden);
  spec.head = head;
  Critic<double> c(spec);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& layer : c.parameters()) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = n(rng) * scale;
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias.data()[i] = 0.3 * n(rng);
  }
  return c;
}

inline Mat<double> random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat<double> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

inline RowVec<double> random_labels(Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  RowVec<double> y(cols);
  for (Eigen::Index i = 0; i < cols; ++i) y(i) = u(rng);
  return y;
}

// |a - b| <= tol * max(|a|, |b|, floor)
inline bool rel_close(double a, double b, double tol, double floor = 1e-6) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace foilgan::testing
