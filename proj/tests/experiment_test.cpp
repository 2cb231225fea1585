#include "kickrl/experiment.hpp"

#include <gtest/gtest.h>

namespace kickrl {
namespace {

ExperimentConfig SmallConfig(const char* encoding, int episodes) {
  ExperimentConfig c;
  c.encoding = Encoding::parse(encoding);
  c.episodes = episodes;
  c.seeds = {1, 2, 3};
  c.moving_average_window = 5;
  c.agent.warmup_transitions = 64;
  c.agent.epsilon_decay_episodes = 10;
  c.output_dir.clear();
  return c;
}

TEST(MovingAverage, Examples) {
  EXPECT_EQ(moving_average({1, 2, 3, 4}, 2), (std::vector<double>{1, 1.5, 2.5, 3.5}));
  const std::vector<double> s{3, -1, 4, 1, 5};
  EXPECT_EQ(moving_average(s, 1), s);
  EXPECT_EQ(moving_average({7, 7, 7, 7, 7}, 3), (std::vector<double>{7, 7, 7, 7, 7}));
  EXPECT_TRUE(moving_average({}, 4).empty());
  EXPECT_THROW(moving_average({1}, 0), std::invalid_argument);
}

TEST(MovingAverage, MatchesDirectWindowMean) {
  Rng rng(1);
  std::vector<double> s;
  for (int i = 0; i < 600; ++i) s.push_back(rng.uniform(-4, 13));
  const auto ma = moving_average(s, 250);
  for (std::size_t i : {0u, 1u, 248u, 249u, 250u, 599u}) {
    const std::size_t lo = i >= 249 ? i - 249 : 0;
    double sum = 0;
    for (std::size_t k = lo; k <= i; ++k) sum += s[k];
    EXPECT_NEAR(ma[i], sum / static_cast<double>(i - lo + 1), 1e-12);
  }
}

TEST(Median, OddAndEven) {
  EXPECT_EQ(median({3, 1, 2}), 2);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(StreamSeeds, DistinctPerStream) {
  EXPECT_NE(stream_seed(1, Stream::Environment), stream_seed(1, Stream::Agent));
  EXPECT_NE(stream_seed(1, Stream::Agent), stream_seed(1, Stream::Dummies));
  EXPECT_NE(stream_seed(1, Stream::Environment), stream_seed(2, Stream::Environment));
}

TEST(RunEpisode, FortyTransitionsAndConsistentReturn) {
  const ExperimentConfig c = SmallConfig("rcs", 1);
  AgentConfig ac = c.agent;
  ac.warmup_transitions = 1000000;
  DqnAgent agent(6, ac, 5);
  Rng env(6), dummies(7);
  for (int e = 1; e <= 30; ++e) {
    const std::size_t before = agent.replay().size();
    const EpisodeLog log = run_episode(c.sim, c.encoding, agent, env, dummies, e, 1.0);
    EXPECT_EQ(agent.replay().size() - before, 40u);
    EXPECT_EQ(log.episode_index, e);
    EXPECT_EQ(log.epsilon, 1.0);
    EXPECT_EQ(log.contact_happened, log.first_contact_step.has_value());
    if (!log.contact_happened) {
      EXPECT_EQ(log.total_reward, -4.0);
    } else {
      const int k = *log.first_contact_step;
      const double bonus = log.total_reward + 0.1 * (k - 1);
      EXPECT_GE(bonus, -3.0 - 1e-9);
      EXPECT_LE(bonus, 12.996 + 1e-9);
    }
    EXPECT_GE(log.total_reward, -0.1 * 39 - 3.0 - 1e-9);
    EXPECT_LE(log.total_reward, 12.996 + 1e-9);
  }
  // Every 40th stored transition closes an episode.
  for (std::size_t i = 0; i < agent.replay().size(); ++i) {
    EXPECT_EQ(agent.replay().at(i).terminal, (i + 1) % 40 == 0);
  }
}

TEST(RunEpisode, WidthMismatchIsConfigurationError) {
  DqnAgent agent(6, AgentConfig{}, 1);
  Rng env(1), dummies(2);
  EXPECT_THROW(run_episode(SimConfig{}, Encoding::acs(), agent, env, dummies, 1, 1.0),
               std::invalid_argument);
}

TEST(RunExperiment, ShapeContract) {
  const RunResult r = run_experiment(SmallConfig("rcs", 10), 2);
  ASSERT_EQ(r.runs.size(), 3u);
  for (std::size_t s = 0; s < 3; ++s) {
    EXPECT_EQ(r.runs[s].seed, r.config.seeds[s]);
    EXPECT_EQ(r.runs[s].episodes.size(), 10u);
    EXPECT_EQ(r.runs[s].moving_average.size(), 10u);
    for (int e = 0; e < 10; ++e) {
      EXPECT_EQ(r.runs[s].episodes[static_cast<std::size_t>(e)].episode_index, e + 1);
      EXPECT_EQ(r.runs[s].episodes[static_cast<std::size_t>(e)].epsilon,
                r.config.agent.epsilon_at(e));
    }
  }
}

TEST(RunExperiment, RepeatableAndIndependentOfParallelism) {
  const ExperimentConfig c = SmallConfig("rcs+2", 8);
  const RunResult a = run_experiment(c, 1);
  const RunResult b = run_experiment(c, 3);
  for (std::size_t s = 0; s < a.runs.size(); ++s) {
    EXPECT_EQ(a.runs[s].episodes, b.runs[s].episodes);
    EXPECT_EQ(a.runs[s].moving_average, b.runs[s].moving_average);
  }
}

TEST(RunExperiment, EncodingsShareEnvironmentStream) {
  // Same seed, pure exploration, no learning: the ball sequence and actions
  // agree across encodings, so returns agree episode by episode.
  ExperimentConfig rcs = SmallConfig("rcs", 6);
  rcs.agent.epsilon_end = 1.0;
  rcs.agent.warmup_transitions = 1000000;
  ExperimentConfig acs = rcs;
  acs.encoding = Encoding::acs();
  ExperimentConfig plus = rcs;
  plus.encoding = Encoding::rcs_plus(4);
  const RunResult a = run_experiment(rcs, 1);
  const RunResult b = run_experiment(acs, 1);
  const RunResult d = run_experiment(plus, 1);
  for (std::size_t s = 0; s < a.runs.size(); ++s) {
    EXPECT_EQ(a.runs[s].episodes, b.runs[s].episodes);
    EXPECT_EQ(a.runs[s].episodes, d.runs[s].episodes);
  }
}

TEST(RunExperiment, InvalidConfigRejected) {
  ExperimentConfig c = SmallConfig("rcs", 1);
  c.seeds.clear();
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
}

TEST(MedianCurve, PointwiseAcrossSeeds) {
  RunResult r;
  r.runs = {{1, {}, {1, 5, 9}}, {2, {}, {3, 4, 8}}, {3, {}, {2, 6, 7}}};
  EXPECT_EQ(median_curve(r), (std::vector<double>{2, 5, 8}));
}

}  // namespace
}  // namespace kickrl
