#pragma once

// Seeded training jobs and learning-curve statistics.
//
// Each (seed, encoding) job draws from three independent streams derived
// from the seed: environment resets, agent (init, exploration, replay
// sampling) and dummy observations. The streams do not depend on the
// encoding, so an ablation changes nothing but observation construction.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "kickrl/config.hpp"
#include "kickrl/dqn.hpp"
#include "kickrl/kicksim.hpp"
#include "kickrl/obs.hpp"
#include "kickrl/rng.hpp"

namespace kickrl {

enum class Stream : std::uint64_t { Environment = 0, Agent = 1, Dummies = 2 };

inline std::uint64_t stream_seed(std::uint64_t seed, Stream s) {
  return mix_seed(seed, static_cast<std::uint64_t>(s));
}

struct EpisodeLog {
  int episode_index = 0;  // 1-based
  double total_reward = 0.0;
  bool contact_happened = false;
  std::optional<int> first_contact_step;  // 1-based step of first contact
  double epsilon = 0.0;

  bool operator==(const EpisodeLog&) const = default;
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<EpisodeLog> episodes;
  std::vector<double> moving_average;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<SeedRun> runs;
  double wall_seconds = 0.0;
};

// Output i is the mean of inputs [i - window + 1, i]; the first window - 1
// outputs average the available prefix.
inline std::vector<double> moving_average(const std::vector<double>& series, int window) {
  if (window < 1) throw std::invalid_argument("moving_average window must be >= 1");
  std::vector<double> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t lo = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = lo; k <= i; ++k) sum += series[k];
    out.push_back(sum / static_cast<double>(i + 1 - lo));
  }
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Pointwise median across seeds.
inline std::vector<double> median_curve(const RunResult& r) {
  if (r.runs.empty()) return {};
  const std::size_t len = r.runs.front().moving_average.size();
  std::vector<double> out(len);
  std::vector<double> column(r.runs.size());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t s = 0; s < r.runs.size(); ++s) {
      if (r.runs[s].moving_average.size() != len) {
        throw std::invalid_argument("seed runs have different lengths");
      }
      column[s] = r.runs[s].moving_average[i];
    }
    out[i] = median(column);
  }
  return out;
}

// Plays one episode, pushing every transition to the agent's replay memory
// and running one train_step per environment step.
inline EpisodeLog run_episode(const SimConfig& sim, const Encoding& encoding,
                              DqnAgent& agent, Rng& env_rng, Rng& dummy_rng,
                              int episode_index, double epsilon) {
  if (agent.input_width() != encoding.width()) {
    throw std::invalid_argument("agent input width " + std::to_string(agent.input_width()) +
                                " does not match encoding " + encoding.name());
  }
  EpisodeLog log;
  log.episode_index = episode_index;
  log.epsilon = epsilon;

  ReturnAccumulator total;
  SceneState s = reset(env_rng, sim);
  Observation obs = observe(s, encoding, dummy_rng);
  while (true) {
    const int a = agent.act(obs, epsilon);
    StepOutcome out = step(s, action_from_index(a), sim);
    Observation next_obs = observe(out.next, encoding, dummy_rng);

    total.add(out.reward);
    if (out.first_contact) {
      log.contact_happened = true;
      log.first_contact_step = out.next.step_index;
    }
    agent.remember({obs, a, out.reward, next_obs, out.terminal});
    agent.train_step();

    if (out.terminal) break;
    s = out.next;
    obs = std::move(next_obs);
  }
  log.total_reward = total.total();
  return log;
}

inline SeedRun run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  Rng env_rng(stream_seed(seed, Stream::Environment));
  Rng dummy_rng(stream_seed(seed, Stream::Dummies));
  DqnAgent agent(cfg.encoding.width(), cfg.agent, stream_seed(seed, Stream::Agent));

  SeedRun run;
  run.seed = seed;
  run.episodes.reserve(static_cast<std::size_t>(cfg.episodes));
  std::vector<double> totals;
  for (int e = 0; e < cfg.episodes; ++e) {
    run.episodes.push_back(run_episode(cfg.sim, cfg.encoding, agent, env_rng, dummy_rng,
                                       e + 1, cfg.agent.epsilon_at(e)));
    totals.push_back(run.episodes.back().total_reward);
  }
  run.moving_average = moving_average(totals, cfg.moving_average_window);
  return run;
}

// Runs every seed, up to `jobs` at a time (0 = hardware concurrency). The
// first failing seed's exception propagates; nothing partial is returned.
inline RunResult run_experiment(const ExperimentConfig& cfg, unsigned jobs = 0) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());

  RunResult result;
  result.config = cfg;
  result.runs.resize(cfg.seeds.size());
  for (std::size_t first = 0; first < cfg.seeds.size(); first += jobs) {
    const std::size_t last = std::min(cfg.seeds.size(), first + jobs);
    std::vector<std::future<SeedRun>> pending;
    for (std::size_t i = first; i < last; ++i) {
      pending.push_back(std::async(std::launch::async, run_seed, std::cref(cfg), cfg.seeds[i]));
    }
    for (std::size_t i = first; i < last; ++i) result.runs[i] = pending[i - first].get();
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace kickrl
