#include "foilgan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

namespace foilgan {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

std::string_view to_string(CriticHead head) { return head == CriticHead::sigmoid ? "sigmoid" : "linear"; }

CriticHead parse_critic_head(std::string_view name) {
  if (name == "sigmoid") return CriticHead::sigmoid;
  if (name == "linear") return CriticHead::linear;
  throw std::invalid_argument("unknown critic head '" + std::string(name) + "'");
}

std::string_view to_string(Regime regime) { return regime == Regime::cgan ? "cgan" : "cwgan_gp"; }

Regime parse_regime(std::string_view name) {
  if (name == "cgan") return Regime::cgan;
  if (name == "cwgan_gp" || name == "cwgan-gp") return Regime::cwgan_gp;
  throw std::invalid_argument("unknown regime '" + std::string(name) + "' (expected cgan or cwgan-gp)");
}

CriticHead required_head(Regime regime) { return regime == Regime::cgan ? CriticHead::sigmoid : CriticHead::linear; }

std::size_t dense_parameter_count(std::span<const std::size_t> layer_sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) n += (layer_sizes[l] + 1) * layer_sizes[l + 1];
  return n;
}

void GeneratorSpec::validate() const {
  if (latent_dim < 1) throw std::invalid_argument("latent_dim must be at least 1");
  if (label_dim != 1) throw std::invalid_argument("generator label_dim must be 1");
  if (output_dim != kShapeDim) throw std::invalid_argument("generator output_dim must be " + std::to_string(kShapeDim));
  for (auto w : hidden_widths) {
    if (w == 0) throw std::invalid_argument("hidden widths must be positive");
  }
}

std::vector<std::size_t> GeneratorSpec::layer_sizes() const {
  std::vector<std::size_t> sizes{latent_dim + label_dim};
  sizes.insert(sizes.end(), hidden_widths.begin(), hidden_widths.end());
  sizes.push_back(output_dim);
  return sizes;
}

std::size_t GeneratorSpec::parameter_count() const { return dense_parameter_count(layer_sizes()); }

void CriticSpec::validate() const {
  if (input_dim < 1) throw std::invalid_argument("critic input_dim must be positive");
  if (label_dim != 1) throw std::invalid_argument("critic label_dim must be 1");
  if (output_dim != 1) throw std::invalid_argument("critic output_dim must be 1");
  for (auto w : hidden_widths) {
    if (w == 0) throw std::invalid_argument("hidden widths must be positive");
  }
}

std::vector<std::size_t> CriticSpec::layer_sizes() const {
  std::vector<std::size_t> sizes{input_dim + label_dim};
  sizes.insert(sizes.end(), hidden_widths.begin(), hidden_widths.end());
  sizes.push_back(output_dim);
  return sizes;
}

std::size_t CriticSpec::parameter_count() const { return dense_parameter_count(layer_sizes()); }

namespace {

constexpr char kMagic[8] = {'F', 'G', 'A', 'N', 'C', 'K', 'P', 'T'};

json tensor_table(const char* net, const Parameters<double>& p) {
  json t = json::array();
  for (std::size_t l = 0; l < p.size(); ++l) {
    t.push_back({{"name", std::string(net) + ".layer" + std::to_string(l) + ".weight"},
                 {"rows", p[l].weight.rows()},
                 {"cols", p[l].weight.cols()}});
    t.push_back({{"name", std::string(net) + ".layer" + std::to_string(l) + ".bias"},
                 {"rows", p[l].bias.size()},
                 {"cols", 1}});
  }
  return t;
}

void write_tensors(std::ofstream& out, const Parameters<double>& p) {
  for (const auto& layer : p) {
    out.write(reinterpret_cast<const char*>(layer.weight.data()),
              static_cast<std::streamsize>(layer.weight.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(layer.bias.data()),
              static_cast<std::streamsize>(layer.bias.size() * sizeof(double)));
  }
}

void read_exact(std::ifstream& in, char* dst, std::size_t n, const fs::path& path) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw CheckpointError("truncated checkpoint " + path.string());
}

void read_tensors(std::ifstream& in, Parameters<double>& p, const fs::path& path) {
  for (auto& layer : p) {
    read_exact(in, reinterpret_cast<char*>(layer.weight.data()), static_cast<std::size_t>(layer.weight.size()) * sizeof(double), path);
    read_exact(in, reinterpret_cast<char*>(layer.bias.data()), static_cast<std::size_t>(layer.bias.size()) * sizeof(double), path);
  }
}

Parameters<double> shaped_like(std::span<const std::size_t> sizes) {
  Parameters<double> p;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    p.push_back({Mat<double>::Zero(static_cast<Eigen::Index>(sizes[l + 1]), static_cast<Eigen::Index>(sizes[l])),
                 Vec<double>::Zero(static_cast<Eigen::Index>(sizes[l + 1]))});
  }
  return p;
}

void check_shapes(const Parameters<double>& p, std::span<const std::size_t> sizes, const char* net) {
  bool ok = p.size() + 1 == sizes.size();
  for (std::size_t l = 0; ok && l < p.size(); ++l) {
    ok = static_cast<std::size_t>(p[l].weight.rows()) == sizes[l + 1] &&
         static_cast<std::size_t>(p[l].weight.cols()) == sizes[l] &&
         static_cast<std::size_t>(p[l].bias.size()) == sizes[l + 1];
  }
  if (!ok) throw CheckpointError(std::string(net) + " parameters do not match its spec");
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const fs::path& path) {
  check_shapes(ckpt.generator, ckpt.generator_spec.layer_sizes(), "generator");
  check_shapes(ckpt.critic, ckpt.critic_spec.layer_sizes(), "critic");

  json header;
  header["format"] = "foilgan-checkpoint";
  header["regime"] = std::string(to_string(ckpt.regime));
  header["seed"] = ckpt.seed;
  header["iteration"] = ckpt.iteration;
  header["generator"] = {{"latent_dim", ckpt.generator_spec.latent_dim},
                         {"hidden_widths", ckpt.generator_spec.hidden_widths},
                         {"output_dim", ckpt.generator_spec.output_dim},
                         {"label_dim", ckpt.generator_spec.label_dim}};
  header["critic"] = {{"input_dim", ckpt.critic_spec.input_dim},
                      {"hidden_widths", ckpt.critic_spec.hidden_widths},
                      {"output_dim", ckpt.critic_spec.output_dim},
                      {"label_dim", ckpt.critic_spec.label_dim},
                      {"head", std::string(to_string(ckpt.critic_spec.head))}};
  json tensors = tensor_table("generator", ckpt.generator);
  for (auto& t : tensor_table("critic", ckpt.critic)) tensors.push_back(t);
  header["tensors"] = tensors;

  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof kMagic);
  const std::uint32_t version = kCheckpointVersion;
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_tensors(out, ckpt.generator);
  write_tensors(out, ckpt.critic);
  if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const fs::path& path, const std::optional<GeneratorSpec>& expected_generator,
                           const std::optional<CriticSpec>& expected_critic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  char magic[8];
  read_exact(in, magic, sizeof magic, path);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw CheckpointError("not a checkpoint file: " + path.string());
  std::uint32_t version = 0;
  std::uint64_t len = 0;
  read_exact(in, reinterpret_cast<char*>(&version), sizeof version, path);
  if (version != kCheckpointVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  read_exact(in, reinterpret_cast<char*>(&len), sizeof len, path);
  if (len > (1u << 24)) throw CheckpointError("implausible checkpoint header length");
  std::string text(len, '\0');
  read_exact(in, text.data(), len, path);

  Checkpoint ckpt;
  try {
    const json header = json::parse(text);
    ckpt.regime = parse_regime(header.at("regime").get<std::string>());
    ckpt.seed = header.at("seed").get<std::uint64_t>();
    ckpt.iteration = header.at("iteration").get<std::size_t>();
    const auto& g = header.at("generator");
    ckpt.generator_spec.latent_dim = g.at("latent_dim").get<std::size_t>();
    ckpt.generator_spec.hidden_widths = g.at("hidden_widths").get<std::vector<std::size_t>>();
    ckpt.generator_spec.output_dim = g.at("output_dim").get<std::size_t>();
    ckpt.generator_spec.label_dim = g.at("label_dim").get<std::size_t>();
    const auto& c = header.at("critic");
    ckpt.critic_spec.input_dim = c.at("input_dim").get<std::size_t>();
    ckpt.critic_spec.hidden_widths = c.at("hidden_widths").get<std::vector<std::size_t>>();
    ckpt.critic_spec.output_dim = c.at("output_dim").get<std::size_t>();
    ckpt.critic_spec.label_dim = c.at("label_dim").get<std::size_t>();
    ckpt.critic_spec.head = parse_critic_head(c.at("head").get<std::string>());
    ckpt.generator_spec.validate();
    ckpt.critic_spec.validate();
  } catch (const json::exception& e) {
    throw CheckpointError("malformed checkpoint header: " + std::string(e.what()));
  } catch (const std::invalid_argument& e) {
    throw CheckpointError("invalid checkpoint header: " + std::string(e.what()));
  }

  if (expected_generator && !(*expected_generator == ckpt.generator_spec)) {
    throw CheckpointError("checkpoint generator spec does not match the requested spec");
  }
  if (expected_critic && !(*expected_critic == ckpt.critic_spec)) {
    throw CheckpointError("checkpoint critic spec does not match the requested spec");
  }

  ckpt.generator = shaped_like(ckpt.generator_spec.layer_sizes());
  ckpt.critic = shaped_like(ckpt.critic_spec.layer_sizes());
  read_tensors(in, ckpt.generator, path);
  read_tensors(in, ckpt.critic, path);
  if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError("trailing bytes in checkpoint " + path.string());
  return ckpt;
}

}  // namespace foilgan
