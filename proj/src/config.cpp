#include "foilgan/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <functional>
#include <sstream>

#include "foilgan/numfmt.hpp"

namespace foilgan {

GeneratorSpec PipelineConfig::generator_spec() const {
  GeneratorSpec spec;
  spec.latent_dim = train.latent_dim;
  spec.hidden_widths = generator_widths;
  return spec;
}

CriticSpec PipelineConfig::critic_spec() const {
  CriticSpec spec;
  spec.hidden_widths = critic_widths;
  spec.head = critic_head.value_or(required_head(train.regime));
  return spec;
}

TrainConfig PipelineConfig::train_config() const {
  TrainConfig t = train;
  t.seed = seed;
  return t;
}

SweepConfig PipelineConfig::sweep_config() const {
  SweepConfig s = sweep;
  s.seed = seed;
  return s;
}

namespace {

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  if (!try_parse_double(v, out) || !std::isfinite(out)) throw ConfigError("'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + std::string(key) + "' expects true or false, got '" + std::string(v) + "'");
}

template <typename Fn>
auto split_list(std::string_view v, Fn&& parse) {
  std::vector<decltype(parse(std::string_view{}))> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    std::string_view item = v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(parse(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items, std::string (*fmt)(T)) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

std::string size_str(std::size_t v) { return std::to_string(v); }
std::string dbl_str(double v) { return format_double(v); }

struct KeySpec {
  const char* section;
  const char* key;
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      {"run", "seed", [](auto& c, auto v) { c.seed = to_uint("seed", v); },
       [](const auto& c) { return std::to_string(c.seed); }},
      {"run", "jobs",
       [](auto& c, auto v) {
         const auto j = to_uint("jobs", v);
         if (j < 1 || j > 1024) throw ConfigError("'jobs' must be in 1..1024");
         c.jobs = static_cast<unsigned>(j);
       },
       [](const auto& c) { return std::to_string(c.jobs); }},
      {"flow", "alpha", [](auto& c, auto v) { c.flow.alpha_deg = to_double("alpha", v); },
       [](const auto& c) { return format_double(c.flow.alpha_deg); }},
      {"flow", "reynolds",
       [](auto& c, auto v) {
         c.flow.reynolds = to_double("reynolds", v);
         if (!(c.flow.reynolds > 0.0)) throw ConfigError("'reynolds' must be positive");
       },
       [](const auto& c) { return format_double(c.flow.reynolds); }},
      {"solver", "backend",
       [](auto& c, auto v) {
         if (v != "panel" && v != "xfoil") throw ConfigError("'backend' must be panel or xfoil");
         c.backend = std::string(v);
       },
       [](const auto& c) { return c.backend; }},
      {"solver", "xfoil_path", [](auto& c, auto v) { c.xfoil.executable = std::string(v); },
       [](const auto& c) { return c.xfoil.executable.string(); }},
      {"solver", "xfoil_timeout",
       [](auto& c, auto v) {
         const double t = to_double("xfoil_timeout", v);
         if (!(t > 0.0)) throw ConfigError("'xfoil_timeout' must be positive");
         c.xfoil.timeout = std::chrono::duration<double>(t);
       },
       [](const auto& c) { return format_double(c.xfoil.timeout.count()); }},
      {"solver", "xfoil_iterations", [](auto& c, auto v) { c.xfoil.iterations = static_cast<int>(to_uint("xfoil_iterations", v)); },
       [](const auto& c) { return std::to_string(c.xfoil.iterations); }},
      {"solver", "xfoil_viscous", [](auto& c, auto v) { c.xfoil.viscous = to_bool("xfoil_viscous", v); },
       [](const auto& c) { return std::string(c.xfoil.viscous ? "true" : "false"); }},
      {"train", "regime",
       [](auto& c, auto v) {
         try {
           c.train.regime = parse_regime(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       },
       [](const auto& c) { return std::string(to_string(c.train.regime)); }},
      {"train", "latent_dim",
       [](auto& c, auto v) {
         c.train.latent_dim = to_uint("latent_dim", v);
         if (c.train.latent_dim < 1) throw ConfigError("'latent_dim' must be at least 1");
       },
       [](const auto& c) { return std::to_string(c.train.latent_dim); }},
      {"train", "learning_rate",
       [](auto& c, auto v) {
         c.train.learning_rate = to_double("learning_rate", v);
         if (!(c.train.learning_rate > 0.0)) throw ConfigError("'learning_rate' must be positive");
       },
       [](const auto& c) { return format_double(c.train.learning_rate); }},
      {"train", "critic_steps_per_iter",
       [](auto& c, auto v) {
         c.train.critic_steps_per_iter = to_uint("critic_steps_per_iter", v);
         if (c.train.critic_steps_per_iter < 1) throw ConfigError("'critic_steps_per_iter' must be at least 1");
       },
       [](const auto& c) { return std::to_string(c.train.critic_steps_per_iter); }},
      {"train", "gp_lambda",
       [](auto& c, auto v) {
         c.train.gp_lambda = to_double("gp_lambda", v);
         if (c.train.gp_lambda < 0.0) throw ConfigError("'gp_lambda' must be non-negative");
       },
       [](const auto& c) { return format_double(c.train.gp_lambda); }},
      {"train", "gp_sampling",
       [](auto& c, auto v) {
         try {
           c.train.gp_sampling = parse_penalty_sampling(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       },
       [](const auto& c) { return std::string(to_string(c.train.gp_sampling)); }},
      {"train", "batch_size",
       [](auto& c, auto v) {
         c.train.batch_size = to_uint("batch_size", v);
         if (c.train.batch_size < 1) throw ConfigError("'batch_size' must be at least 1");
       },
       [](const auto& c) { return std::to_string(c.train.batch_size); }},
      {"train", "total_iterations", [](auto& c, auto v) { c.train.total_iterations = to_uint("total_iterations", v); },
       [](const auto& c) { return std::to_string(c.train.total_iterations); }},
      {"train", "beta1", [](auto& c, auto v) { c.train.beta1 = to_double("beta1", v); },
       [](const auto& c) { return format_double(c.train.adam_beta1()); }},
      {"train", "beta2", [](auto& c, auto v) { c.train.beta2 = to_double("beta2", v); },
       [](const auto& c) { return format_double(c.train.adam_beta2()); }},
      {"train", "cgan_generator_loss",
       [](auto& c, auto v) {
         try {
           c.train.cgan_generator_loss = parse_generator_loss(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       },
       [](const auto& c) { return std::string(to_string(c.train.cgan_generator_loss)); }},
      {"train", "checkpoint_every", [](auto& c, auto v) { c.train.checkpoint_every = to_uint("checkpoint_every", v); },
       [](const auto& c) { return std::to_string(c.train.checkpoint_every); }},
      {"train", "log_every", [](auto& c, auto v) { c.log_every = to_uint("log_every", v); },
       [](const auto& c) { return std::to_string(c.log_every); }},
      {"nets", "generator_widths",
       [](auto& c, auto v) { c.generator_widths = split_list(v, [](std::string_view s) { return static_cast<std::size_t>(to_uint("generator_widths", s)); }); },
       [](const auto& c) { return join<std::size_t>(c.generator_widths, size_str); }},
      {"nets", "critic_widths",
       [](auto& c, auto v) { c.critic_widths = split_list(v, [](std::string_view s) { return static_cast<std::size_t>(to_uint("critic_widths", s)); }); },
       [](const auto& c) { return join<std::size_t>(c.critic_widths, size_str); }},
      {"nets", "critic_head",
       [](auto& c, auto v) {
         if (v == "auto") {
           c.critic_head.reset();
           return;
         }
         try {
           c.critic_head = parse_critic_head(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       },
       [](const auto& c) { return c.critic_head ? std::string(to_string(*c.critic_head)) : std::string("auto"); }},
      {"sweep", "label_start", [](auto& c, auto v) { c.sweep.label_start = to_double("label_start", v); },
       [](const auto& c) { return format_double(c.sweep.label_start); }},
      {"sweep", "label_step", [](auto& c, auto v) { c.sweep.label_step = to_double("label_step", v); },
       [](const auto& c) { return format_double(c.sweep.label_step); }},
      {"sweep", "label_end", [](auto& c, auto v) { c.sweep.label_end = to_double("label_end", v); },
       [](const auto& c) { return format_double(c.sweep.label_end); }},
      {"sweep", "samples_per_label", [](auto& c, auto v) { c.sweep.samples_per_label = to_uint("samples_per_label", v); },
       [](const auto& c) { return std::to_string(c.sweep.samples_per_label); }},
      {"sweep", "failure_threshold", [](auto& c, auto v) { c.sweep.failure_threshold = to_double("failure_threshold", v); },
       [](const auto& c) { return format_double(c.sweep.failure_threshold); }},
      {"sweep", "export_labels",
       [](auto& c, auto v) { c.export_labels = split_list(v, [](std::string_view s) { return to_double("export_labels", s); }); },
       [](const auto& c) { return join<double>(c.export_labels, dbl_str); }},
  };
  return keys;
}

const KeySpec* find_key(std::string_view section, std::string_view key) {
  for (const auto& k : schema()) {
    if (section == k.section && key == k.key) return &k;
  }
  return nullptr;
}

}  // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("cannot parse config: " + std::string(e.what()));
  }
  PipelineConfig config;
  for (const auto& [section, body] : tree) {
    const bool known_section = std::any_of(schema().begin(), schema().end(), [&](const KeySpec& k) { return section == k.section; });
    if (!known_section || !body.data().empty()) throw ConfigError("unknown config section or top-level key '" + section + "'");
    for (const auto& [key, value] : body) {
      const KeySpec* spec = find_key(section, key);
      if (!spec) throw ConfigError("unknown config key '" + section + "." + key + "'");
      spec->set(config, value.data());
    }
  }
  return config;
}

void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value) {
  const auto dot = key.find('.');
  if (dot == std::string_view::npos) throw ConfigError("setting '" + std::string(key) + "' must be section.key");
  const KeySpec* spec = find_key(key.substr(0, dot), key.substr(dot + 1));
  if (!spec) throw ConfigError("unknown config key '" + std::string(key) + "'");
  spec->set(config, value);
}

std::string to_ini(const PipelineConfig& config) {
  std::ostringstream os;
  std::string_view current;
  for (const auto& k : schema()) {
    if (current != k.section) {
      if (!current.empty()) os << '\n';
      os << '[' << k.section << "]\n";
      current = k.section;
    }
    os << k.key << " = " << k.get(config) << '\n';
  }
  return os.str();
}

std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& k : schema()) keys.push_back(std::string(k.section) + "." + k.key);
  return keys;
}

}  // namespace foilgan
