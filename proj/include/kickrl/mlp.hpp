#pragma once

// Fully connected ReLU network with a linear output layer, its batched
// backward pass, and an Adam optimizer over the same parameter layout.

#include <Eigen/Core>

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kickrl/rng.hpp"

namespace kickrl {

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out

  int inputs() const { return static_cast<int>(weights.cols()); }
  int outputs() const { return static_cast<int>(weights.rows()); }

  bool operator==(const DenseLayer& o) const {
    return weights.rows() == o.weights.rows() &&
           weights.cols() == o.weights.cols() && weights == o.weights &&
           bias == o.bias;
  }
};

// One DenseLayer-shaped block per layer. Used for gradients and Adam moments.
using LayerParams = std::vector<DenseLayer>;

class Mlp {
 public:
  Mlp() = default;

  // All parameters zero. widths = {input, hidden..., output}.
  explicit Mlp(std::vector<int> widths) {
    if (widths.size() < 2) throw std::invalid_argument("Mlp needs >= 2 widths");
    for (int w : widths) {
      if (w < 1) throw std::invalid_argument("Mlp widths must be >= 1");
    }
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
      layers_.push_back({Eigen::MatrixXd::Zero(widths[i + 1], widths[i]),
                         Eigen::VectorXd::Zero(widths[i + 1])});
    }
  }

  // Weights uniform in +-1/sqrt(fan_in), biases zero. Layers are filled in
  // order, each weight matrix row-major.
  static Mlp uniform_init(std::vector<int> widths, Rng& rng) {
    Mlp net(std::move(widths));
    for (auto& layer : net.layers_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(layer.inputs()));
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
          layer.weights(r, c) = rng.uniform(-bound, bound);
        }
      }
    }
    return net;
  }

  int input_width() const { return layers_.front().inputs(); }
  int output_width() const { return layers_.back().outputs(); }
  std::size_t depth() const { return layers_.size(); }

  std::vector<int> widths() const {
    std::vector<int> w{input_width()};
    for (const auto& l : layers_) w.push_back(l.outputs());
    return w;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
    return n;
  }

  LayerParams& layers() { return layers_; }
  const LayerParams& layers() const { return layers_; }

  // Column-per-sample evaluation.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const {
    check_input(inputs.rows());
    Eigen::MatrixXd a = inputs;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Eigen::MatrixXd z = layers_[i].weights * a;
      z.colwise() += layers_[i].bias;
      a = (i + 1 < layers_.size()) ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
    }
    return a;
  }

  Eigen::VectorXd forward(std::span<const double> input) const {
    check_input(static_cast<Eigen::Index>(input.size()));
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(
        input.data(), static_cast<Eigen::Index>(input.size()));
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Eigen::VectorXd z = layers_[i].weights * a + layers_[i].bias;
      a = (i + 1 < layers_.size()) ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
    }
    return a;
  }

  // Backward pass for a loss whose gradient with respect to the network
  // output is output_grad (same shape as forward_batch(inputs)).
  LayerParams backward(const Eigen::MatrixXd& inputs,
                       const Eigen::MatrixXd& output_grad) const {
    check_input(inputs.rows());
    std::vector<Eigen::MatrixXd> acts{inputs};
    std::vector<Eigen::MatrixXd> pre;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Eigen::MatrixXd z = layers_[i].weights * acts.back();
      z.colwise() += layers_[i].bias;
      pre.push_back(z);
      if (i + 1 < layers_.size()) acts.push_back(z.cwiseMax(0.0));
    }

    LayerParams grads(layers_.size());
    Eigen::MatrixXd delta = output_grad;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      grads[k].weights = delta * acts[k].transpose();
      grads[k].bias = delta.rowwise().sum();
      if (k > 0) {
        Eigen::MatrixXd upstream = layers_[k].weights.transpose() * delta;
        delta = upstream.cwiseProduct(
            (pre[k - 1].array() > 0.0).cast<double>().matrix());
      }
    }
    return grads;
  }

  bool all_finite() const {
    for (const auto& l : layers_) {
      if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
  }

  bool operator==(const Mlp&) const = default;

 private:
  void check_input(Eigen::Index rows) const {
    if (layers_.empty()) throw std::logic_error("Mlp has no layers");
    if (rows != layers_.front().inputs()) {
      throw std::invalid_argument(
          "input width " + std::to_string(rows) + " does not match network input " +
          std::to_string(layers_.front().inputs()));
    }
  }

  LayerParams layers_;
};

inline LayerParams zeros_like(const LayerParams& p) {
  LayerParams out;
  out.reserve(p.size());
  for (const auto& l : p) {
    out.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                   Eigen::VectorXd::Zero(l.bias.size())});
  }
  return out;
}

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  LayerParams first_moment;
  LayerParams second_moment;
  long long steps = 0;

  static AdamState for_params(const LayerParams& p) {
    return {zeros_like(p), zeros_like(p), 0};
  }

  bool operator==(const AdamState&) const = default;
};

// Bias-corrected Adam step, applied in place.
inline void adam_update(LayerParams& params, const LayerParams& grads,
                        AdamState& state, double learning_rate,
                        const AdamConfig& cfg = {}) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw std::invalid_argument("adam_update: layer count mismatch");
  }
  state.steps += 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.steps));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.steps));

  auto apply = [&](auto& p, const auto& g, auto& m, auto& v) {
    if (p.rows() != g.rows() || p.cols() != g.cols()) {
      throw std::invalid_argument("adam_update: shape mismatch");
    }
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    p.array() -= learning_rate * (m.array() / c1) /
                 ((v.array() / c2).sqrt() + cfg.epsilon);
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    apply(params[i].weights, grads[i].weights, state.first_moment[i].weights,
          state.second_moment[i].weights);
    apply(params[i].bias, grads[i].bias, state.first_moment[i].bias,
          state.second_moment[i].bias);
  }
}

}  // namespace kickrl
