#include <gtest/gtest.h>

#include <fstream>

#include "foilgan/config.hpp"
#include "support.hpp"

using namespace foilgan;
namespace ft = foilgan::testing;

namespace {

std::filesystem::path write(const ft::TempDir& dir, const std::string& text) {
  const auto p = dir / "c.ini";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Config, DefaultsMatchTrainingTable) {
  const PipelineConfig c;
  EXPECT_EQ(c.train.regime, Regime::cwgan_gp);
  EXPECT_DOUBLE_EQ(c.flow.alpha_deg, 5.0);
  EXPECT_EQ(c.generator_spec(), GeneratorSpec{});
  EXPECT_EQ(c.critic_spec(), CriticSpec{});
  PipelineConfig g = c;
  g.train.regime = Regime::cgan;
  EXPECT_EQ(g.critic_spec().head, CriticHead::sigmoid);
}

TEST(Config, LoadsSectionsAndFoldsSeed) {
  ft::TempDir dir;
  const auto p = write(dir,
                       "[run]\nseed = 42\njobs = 3\n\n[train]\nregime = cgan\nlatent_dim = 6\n"
                       "[sweep]\nsamples_per_label = 4\nexport_labels = 0.5, 1.0\n[nets]\ngenerator_widths = 8, 16\n");
  const auto c = load_config(p);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.jobs, 3u);
  EXPECT_EQ(c.train.regime, Regime::cgan);
  EXPECT_EQ(c.train_config().seed, 42u);
  EXPECT_EQ(c.sweep_config().seed, 42u);
  EXPECT_EQ(c.generator_spec().latent_dim, 6u);
  EXPECT_EQ(c.generator_spec().hidden_widths, (std::vector<std::size_t>{8, 16}));
  EXPECT_EQ(c.sweep.samples_per_label, 4u);
  EXPECT_EQ(c.export_labels, (std::vector<double>{0.5, 1.0}));
}

TEST(Config, RejectsUnknownKeysAndSections) {
  ft::TempDir dir;
  EXPECT_THROW(load_config(write(dir, "[train]\nlearning_rat = 0.1\n")), ConfigError);
  EXPECT_THROW(load_config(write(dir, "[trian]\nlearning_rate = 0.1\n")), ConfigError);
  EXPECT_THROW(load_config(write(dir, "seed = 3\n")), ConfigError);
  EXPECT_THROW(load_config(write(dir, "[train]\nregime = gan\n")), ConfigError);
  EXPECT_THROW(load_config(write(dir, "[train]\nlearning_rate = fast\n")), ConfigError);
  EXPECT_THROW(load_config(write(dir, "[run]\nseed = -1\n")), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.ini"), ConfigError);
}

TEST(Config, ApplySetting) {
  PipelineConfig c;
  apply_setting(c, "train.gp_lambda", "5");
  EXPECT_DOUBLE_EQ(c.train.gp_lambda, 5.0);
  apply_setting(c, "nets.critic_head", "sigmoid");
  EXPECT_EQ(c.critic_spec().head, CriticHead::sigmoid);
  EXPECT_THROW(apply_setting(c, "train.nope", "1"), ConfigError);
  EXPECT_THROW(apply_setting(c, "gp_lambda", "1"), ConfigError);
}

TEST(Config, IniRoundTrip) {
  ft::TempDir dir;
  PipelineConfig c;
  c.seed = 9;
  c.train.regime = Regime::cgan;
  c.train.beta2 = 0.95;
  c.critic_head = CriticHead::linear;
  c.sweep.label_end = 1.0;
  c.export_labels = {0.25};
  const std::string text = to_ini(c);
  const auto back = load_config(write(dir, text));
  EXPECT_EQ(to_ini(back), text);
  for (const auto& key : known_keys()) {
    const auto dot = key.find('.');
    EXPECT_NE(text.find(key.substr(dot + 1) + " = "), std::string::npos) << key;
  }
}
