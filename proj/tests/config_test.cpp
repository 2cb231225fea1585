#include "kickrl/config.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace kickrl {
namespace {

ExperimentConfig Parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

TEST(Config, DefaultsMatchProtocol) {
  const ExperimentConfig c;
  EXPECT_EQ(c.episodes, 3000);
  EXPECT_EQ(c.seeds.size(), 5u);
  EXPECT_EQ(c.moving_average_window, 250);
  EXPECT_EQ(c.sim.dt, 0.05);
  EXPECT_EQ(c.sim.episode_steps, 40);
  EXPECT_EQ(c.sim.forward_speed, 2.55);
  EXPECT_EQ(c.sim.spawn_distance, 2.0);
  EXPECT_EQ(c.agent.gamma, 0.99);
  EXPECT_EQ(c.agent.batch_size, 64);
  EXPECT_EQ(c.agent.replay_capacity, 50000);
  EXPECT_EQ(c.agent.target_sync_interval, 200);
  EXPECT_EQ(c.agent.warmup_transitions, 1000);
  EXPECT_EQ(c.agent.hidden_width, 64);
  std::vector<std::string> names;
  for (const auto& e : default_ablation_encodings()) names.push_back(e.name());
  EXPECT_EQ(names, (std::vector<std::string>{"rcs", "rcs+2", "rcs+4", "acs"}));
}

TEST(Config, ParsesKeysCommentsAndBlankLines) {
  const ExperimentConfig c = Parse(
      "# protocol\n"
      "encoding = rcs+4\n"
      "\n"
      "episodes=120   # short\n"
      "seeds = 7, 8 ,9\n"
      "sim.dt = 0.025\n"
      "agent.learning_rate = 5e-4\n"
      "agent.batch_size = 32\n"
      "window = 10\n"
      "output_dir = out/dir\n");
  EXPECT_EQ(c.encoding, Encoding::rcs_plus(4));
  EXPECT_EQ(c.episodes, 120);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{7, 8, 9}));
  EXPECT_EQ(c.sim.dt, 0.025);
  EXPECT_EQ(c.agent.learning_rate, 5e-4);
  EXPECT_EQ(c.agent.batch_size, 32);
  EXPECT_EQ(c.moving_average_window, 10);
  EXPECT_EQ(c.output_dir, "out/dir");
  EXPECT_EQ(c.sim.spawn_distance, 2.0);
}

TEST(Config, FormatThenParseRoundTrips) {
  ExperimentConfig c;
  c.encoding = Encoding::acs();
  c.sim.ball_speed_max = 7.0 / 3.0;
  c.agent.learning_rate = 0.1 + 0.2;
  c.seeds = {18446744073709551615ULL, 0};
  EXPECT_EQ(Parse(format_config(c)), c);
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_THROW(Parse("nonsense\n"), std::invalid_argument);
  try {
    Parse("episodes = 3\nsim.unknown = 1\n");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(Parse("episodes = ten\n"), std::invalid_argument);
  EXPECT_THROW(Parse("episodes = 0\n"), std::invalid_argument);
  EXPECT_THROW(Parse("seeds = \n"), std::invalid_argument);
  EXPECT_THROW(Parse("encoding = xyz\n"), std::invalid_argument);
  EXPECT_THROW(Parse("sim.dt = -1\n"), std::invalid_argument);
}

TEST(Config, AblationDifferencesIgnoreEncodingAndOutput) {
  ExperimentConfig a, b;
  b.encoding = Encoding::acs();
  b.output_dir = "elsewhere";
  EXPECT_TRUE(ablation_differences(a, b).empty());
  b.agent.learning_rate = 0.01;
  b.sim.dt = 0.1;
  EXPECT_EQ(ablation_differences(a, b),
            (std::vector<std::string>{"sim.dt", "agent.learning_rate"}));
}

TEST(Config, LoadReportsMissingFile) {
  EXPECT_THROW(load_config("/nonexistent/kickrl.cfg"), std::runtime_error);
}

}  // namespace
}  // namespace kickrl
