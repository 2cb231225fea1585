#pragma once

// Deep Q-learning: replay memory, frozen target network, epsilon-greedy
// exploration and Adam minimization of the squared TD error
//
//   L = mean (y - Q(s, a))^2,   y = r + gamma * max_a' Q_target(s', a')
//
// with y = r on terminal transitions.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kickrl/kicksim.hpp"
#include "kickrl/mlp.hpp"
#include "kickrl/obs.hpp"
#include "kickrl/rng.hpp"

namespace kickrl {

using QValues = std::array<double, kActionCount>;

struct Transition {
  Observation obs;
  int action = 0;
  double reward = 0.0;
  Observation next_obs;
  bool terminal = false;
};

using Batch = std::vector<const Transition*>;

inline Batch as_batch(std::span<const Transition> ts) {
  Batch b;
  b.reserve(ts.size());
  for (const auto& t : ts) b.push_back(&t);
  return b;
}

// Fixed-capacity FIFO. Once full, each push overwrites the oldest entry.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be > 0");
    items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
  }

  void push(Transition t) {
    if (t.obs.encoding != t.next_obs.encoding || t.obs.size() != t.next_obs.size()) {
      throw std::invalid_argument("transition obs/next_obs encodings differ");
    }
    if (items_.size() < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }

  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const {
    if (i >= items_.size()) throw std::out_of_range("replay index");
    return items_[(head_ + i) % items_.size()];
  }

  // Uniform with replacement; returns positions in the oldest-first order.
  std::vector<std::size_t> sample_positions(std::size_t n, Rng& rng) const {
    if (items_.empty()) throw std::logic_error("sampling an empty replay buffer");
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = rng.uniform_index(items_.size());
    return idx;
  }

  Batch sample(std::size_t n, Rng& rng) const {
    Batch b;
    b.reserve(n);
    for (std::size_t i : sample_positions(n, rng)) b.push_back(&at(i));
    return b;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> items_;
};

inline QValues to_qvalues(const Eigen::VectorXd& v) {
  if (v.size() != kActionCount) {
    throw std::logic_error("Q-network output width must be " +
                           std::to_string(kActionCount));
  }
  return {v[0], v[1], v[2]};
}

inline QValues forward(const Mlp& net, const Observation& obs) {
  return to_qvalues(net.forward(obs.values));
}

inline double td_target(double reward, const QValues& next_q, bool terminal,
                        double gamma) {
  if (terminal) return reward;
  return reward + gamma * *std::max_element(next_q.begin(), next_q.end());
}

namespace detail {

inline Eigen::MatrixXd stack_columns(const Batch& batch, bool next) {
  const auto& first = next ? batch.front()->next_obs : batch.front()->obs;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(first.size()),
                    static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto& o = next ? batch[j]->next_obs : batch[j]->obs;
    if (static_cast<Eigen::Index>(o.size()) != x.rows()) {
      throw std::invalid_argument("batch mixes observation widths");
    }
    for (std::size_t i = 0; i < o.size(); ++i) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = o.values[i];
    }
  }
  return x;
}

struct BatchErrors {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd residual;  // Q(s, a) - y per sample
};

inline BatchErrors batch_errors(const Mlp& net, const Mlp& target_net,
                                const Batch& batch, double gamma) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  BatchErrors e;
  e.inputs = stack_columns(batch, false);
  const Eigen::MatrixXd q = net.forward_batch(e.inputs);
  const Eigen::MatrixXd q_next = target_net.forward_batch(stack_columns(batch, true));
  e.residual.resize(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const int a = batch[j]->action;
    if (a < 0 || a >= kActionCount) throw std::out_of_range("transition action");
    const double y = td_target(batch[j]->reward, to_qvalues(q_next.col(col)),
                               batch[j]->terminal, gamma);
    e.residual[col] = q(a, col) - y;
  }
  return e;
}

}  // namespace detail

inline double loss(const Mlp& net, const Mlp& target_net, const Batch& batch,
                   double gamma) {
  const auto e = detail::batch_errors(net, target_net, batch, gamma);
  return e.residual.squaredNorm() / static_cast<double>(batch.size());
}

struct LossAndGradients {
  double loss = 0.0;
  LayerParams gradients;
};

// Targets come from target_net and are held constant.
inline LossAndGradients loss_and_gradients(const Mlp& net, const Mlp& target_net,
                                           const Batch& batch, double gamma) {
  const auto e = detail::batch_errors(net, target_net, batch, gamma);
  const double n = static_cast<double>(batch.size());
  Eigen::MatrixXd out_grad =
      Eigen::MatrixXd::Zero(net.output_width(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    out_grad(batch[j]->action, col) = 2.0 * e.residual[col] / n;
  }
  return {e.residual.squaredNorm() / n, net.backward(e.inputs, out_grad)};
}

inline LayerParams gradients(const Mlp& net, const Mlp& target_net,
                             const Batch& batch, double gamma) {
  return loss_and_gradients(net, target_net, batch, gamma).gradients;
}

// Lowest index wins ties.
inline int greedy_action(const QValues& q) {
  return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
}

// One uniform draw decides explore vs exploit; exploring draws a second
// uniform action index.
inline int select_action(const QValues& q, double epsilon, Rng& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("epsilon must be in [0, 1]");
  }
  if (rng.uniform() < epsilon) {
    return static_cast<int>(rng.uniform_index(kActionCount));
  }
  return greedy_action(q);
}

inline Mlp sync_target(const Mlp& net) { return net; }

struct AgentConfig {
  double gamma = 0.99;
  double learning_rate = 1e-3;
  int batch_size = 64;
  int replay_capacity = 50000;
  int target_sync_interval = 200;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_episodes = 500;
  int warmup_transitions = 1000;
  int hidden_width = 64;

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("agent.") + what);
    };
    require(gamma >= 0.0 && gamma < 1.0, "gamma must be in [0, 1)");
    require(learning_rate > 0.0, "learning_rate must be > 0");
    require(batch_size >= 1, "batch_size must be >= 1");
    require(replay_capacity >= 1, "replay_capacity must be >= 1");
    require(target_sync_interval >= 1, "target_sync_interval must be >= 1");
    require(epsilon_start >= 0.0 && epsilon_start <= 1.0,
            "epsilon_start must be in [0, 1]");
    require(epsilon_end >= 0.0 && epsilon_end <= 1.0,
            "epsilon_end must be in [0, 1]");
    require(epsilon_end <= epsilon_start, "epsilon_end must be <= epsilon_start");
    require(epsilon_decay_episodes >= 1, "epsilon_decay_episodes must be >= 1");
    require(warmup_transitions >= 0, "warmup_transitions must be >= 0");
    require(hidden_width >= 1, "hidden_width must be >= 1");
  }

  // Linear from epsilon_start at episode 0 to epsilon_end at
  // epsilon_decay_episodes, constant afterwards.
  double epsilon_at(int episode) const {
    if (episode >= epsilon_decay_episodes) return epsilon_end;
    const double f = static_cast<double>(std::max(episode, 0)) / epsilon_decay_episodes;
    return epsilon_start + (epsilon_end - epsilon_start) * f;
  }

  bool operator==(const AgentConfig&) const = default;
};

// Network, target copy, optimizer state and replay memory for one run.
class DqnAgent {
 public:
  // Initial weights come from a stream derived from `seed`, separate from
  // the exploration/replay stream, so the number of inputs does not shift
  // the exploration sequence.
  DqnAgent(int input_width, const AgentConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), rng_(seed), replay_(static_cast<std::size_t>(cfg.replay_capacity)) {
    cfg_.validate();
    Rng init_rng(mix_seed(seed, 0));
    net_ = Mlp::uniform_init({input_width, cfg.hidden_width, cfg.hidden_width, kActionCount},
                             init_rng);
    target_ = sync_target(net_);
    adam_ = AdamState::for_params(net_.layers());
  }

  int input_width() const { return net_.input_width(); }
  const AgentConfig& config() const { return cfg_; }
  const Mlp& network() const { return net_; }
  const Mlp& target_network() const { return target_; }
  const ReplayBuffer& replay() const { return replay_; }
  long long updates() const { return updates_; }

  QValues q_values(const Observation& obs) const { return forward(net_, obs); }

  int act(const Observation& obs, double epsilon) {
    return select_action(q_values(obs), epsilon, rng_);
  }

  void remember(Transition t) {
    if (static_cast<int>(t.obs.size()) != input_width()) {
      throw std::invalid_argument("transition width " + std::to_string(t.obs.size()) +
                                  " does not match agent input " +
                                  std::to_string(input_width()));
    }
    replay_.push(std::move(t));
  }

  // Returns the pre-update batch loss, or nullopt while warming up.
  std::optional<double> train_step() {
    if (replay_.empty() ||
        replay_.size() < static_cast<std::size_t>(cfg_.warmup_transitions)) {
      return std::nullopt;
    }
    return train_on(replay_.sample(static_cast<std::size_t>(cfg_.batch_size), rng_));
  }

  // One Adam update on the given batch, counted toward the target sync.
  double train_on(const Batch& batch) {
    auto lg = loss_and_gradients(net_, target_, batch, cfg_.gamma);
    adam_update(net_.layers(), lg.gradients, adam_, cfg_.learning_rate);
    ++updates_;
    if (updates_ % cfg_.target_sync_interval == 0) target_ = sync_target(net_);
    if (!net_.all_finite()) throw std::runtime_error("non-finite network parameters");
    return lg.loss;
  }

 private:
  AgentConfig cfg_;
  Rng rng_;
  Mlp net_;
  Mlp target_;
  AdamState adam_;
  ReplayBuffer replay_;
  long long updates_ = 0;
};

}  // namespace kickrl
