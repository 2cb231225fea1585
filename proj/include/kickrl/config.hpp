#pragma once

// Experiment configuration and its flat "key = value" file format.
//
//   # comment
//   encoding = rcs+4
//   episodes = 3000
//   seeds = 1, 2, 3, 4, 5
//   sim.dt = 0.05
//   agent.learning_rate = 0.001
//
// Keys absent from a file keep their defaults; unknown keys are errors.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kickrl/dqn.hpp"
#include "kickrl/kicksim.hpp"
#include "kickrl/numeric_text.hpp"
#include "kickrl/obs.hpp"

namespace kickrl {

struct ExperimentConfig {
  Encoding encoding = Encoding::rcs();
  int episodes = 3000;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  SimConfig sim;
  AgentConfig agent;
  int moving_average_window = 250;
  std::string output_dir = "runs";

  void validate() const {
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    if (seeds.empty()) throw std::invalid_argument("seeds must not be empty");
    if (moving_average_window < 1) throw std::invalid_argument("window must be >= 1");
    sim.validate();
    agent.validate();
  }

  bool operator==(const ExperimentConfig&) const = default;
};

// Encodings run by the default ablation protocol.
inline std::vector<Encoding> default_ablation_encodings() {
  return {Encoding::rcs(), Encoding::rcs_plus(2), Encoding::rcs_plus(4), Encoding::acs()};
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline long long parse_integer(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + s + "'");
  }
  return v;
}

inline int parse_int(const std::string& s) {
  const long long v = parse_integer(s);
  if (v < INT32_MIN || v > INT32_MAX) throw std::invalid_argument("out of range: " + s);
  return static_cast<int>(v);
}

struct ConfigKey {
  std::string name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <typename T>
ConfigKey number_key(std::string name, T ExperimentConfig::*section,
                     double T::*field) {
  return {std::move(name),
          [=](const ExperimentConfig& c) { return format_double((c.*section).*field); },
          [=](ExperimentConfig& c, const std::string& v) {
            (c.*section).*field = parse_double(v);
          }};
}

template <typename T>
ConfigKey number_key(std::string name, T ExperimentConfig::*section, int T::*field) {
  return {std::move(name),
          [=](const ExperimentConfig& c) { return std::to_string((c.*section).*field); },
          [=](ExperimentConfig& c, const std::string& v) {
            (c.*section).*field = parse_int(v);
          }};
}

inline std::vector<std::uint64_t> parse_seed_list(const std::string& v) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    std::uint64_t s = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), s);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw std::invalid_argument("bad seed '" + tok + "'");
    }
    seeds.push_back(s);
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

inline const std::vector<ConfigKey>& config_keys() {
  using E = ExperimentConfig;
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    k.push_back({"encoding", [](const E& c) { return c.encoding.name(); },
                 [](E& c, const std::string& v) { c.encoding = Encoding::parse(v); }});
    k.push_back({"episodes", [](const E& c) { return std::to_string(c.episodes); },
                 [](E& c, const std::string& v) { c.episodes = parse_int(v); }});
    k.push_back({"seeds",
                 [](const E& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.seeds.size(); ++i) {
                     out += (i ? ", " : "") + std::to_string(c.seeds[i]);
                   }
                   return out;
                 },
                 [](E& c, const std::string& v) { c.seeds = parse_seed_list(v); }});
    k.push_back({"window",
                 [](const E& c) { return std::to_string(c.moving_average_window); },
                 [](E& c, const std::string& v) { c.moving_average_window = parse_int(v); }});
    k.push_back({"output_dir", [](const E& c) { return c.output_dir; },
                 [](E& c, const std::string& v) { c.output_dir = v; }});

    k.push_back(number_key("sim.dt", &E::sim, &SimConfig::dt));
    k.push_back(number_key("sim.episode_steps", &E::sim, &SimConfig::episode_steps));
    k.push_back(number_key("sim.robot_radius", &E::sim, &SimConfig::robot_radius));
    k.push_back(number_key("sim.ball_radius", &E::sim, &SimConfig::ball_radius));
    k.push_back(number_key("sim.spawn_distance", &E::sim, &SimConfig::spawn_distance));
    k.push_back(number_key("sim.ball_speed_min", &E::sim, &SimConfig::ball_speed_min));
    k.push_back(number_key("sim.ball_speed_max", &E::sim, &SimConfig::ball_speed_max));
    k.push_back(number_key("sim.ball_aim_radius", &E::sim, &SimConfig::ball_aim_radius));
    k.push_back(number_key("sim.forward_speed", &E::sim, &SimConfig::forward_speed));
    k.push_back(number_key("sim.kick_restitution", &E::sim, &SimConfig::kick_restitution));
    k.push_back(number_key("sim.target_distance", &E::sim, &SimConfig::target_distance));

    k.push_back(number_key("agent.gamma", &E::agent, &AgentConfig::gamma));
    k.push_back(number_key("agent.learning_rate", &E::agent, &AgentConfig::learning_rate));
    k.push_back(number_key("agent.batch_size", &E::agent, &AgentConfig::batch_size));
    k.push_back(number_key("agent.replay_capacity", &E::agent, &AgentConfig::replay_capacity));
    k.push_back(number_key("agent.target_sync_interval", &E::agent,
                           &AgentConfig::target_sync_interval));
    k.push_back(number_key("agent.epsilon_start", &E::agent, &AgentConfig::epsilon_start));
    k.push_back(number_key("agent.epsilon_end", &E::agent, &AgentConfig::epsilon_end));
    k.push_back(number_key("agent.epsilon_decay_episodes", &E::agent,
                           &AgentConfig::epsilon_decay_episodes));
    k.push_back(number_key("agent.warmup_transitions", &E::agent,
                           &AgentConfig::warmup_transitions));
    k.push_back(number_key("agent.hidden_width", &E::agent, &AgentConfig::hidden_width));
    return k;
  }();
  return keys;
}

}  // namespace detail

// Applies one assignment; throws std::invalid_argument for unknown keys or
// malformed values.
inline void set_config_value(ExperimentConfig& cfg, const std::string& key,
                             const std::string& value) {
  for (const auto& k : detail::config_keys()) {
    if (k.name == key) {
      try {
        k.set(cfg, value);
      } catch (const std::exception& e) {
        throw std::invalid_argument(key + ": " + e.what());
      }
      return;
    }
  }
  throw std::invalid_argument("unknown config key '" + key + "'");
}

inline ExperimentConfig parse_config(std::istream& in, ExperimentConfig cfg = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      set_config_value(cfg, detail::trim(body.substr(0, eq)),
                       detail::trim(body.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  try {
    return parse_config(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

// Every key in a fixed order, as (key, value) pairs.
inline std::vector<std::pair<std::string, std::string>> config_entries(
    const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : detail::config_keys()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

inline std::string format_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_entries(cfg)) out += k + " = " + v + "\n";
  return out;
}

// Keys whose values differ, ignoring the ones allowed to vary across an
// ablation (encoding, output_dir).
inline std::vector<std::string> ablation_differences(const ExperimentConfig& a,
                                                     const ExperimentConfig& b) {
  const auto ea = config_entries(a);
  const auto eb = config_entries(b);
  std::vector<std::string> diffs;
  for (std::size_t i = 0; i < ea.size(); ++i) {
    if (ea[i].first == "encoding" || ea[i].first == "output_dir") continue;
    if (ea[i].second != eb[i].second) diffs.push_back(ea[i].first);
  }
  return diffs;
}

}  // namespace kickrl
