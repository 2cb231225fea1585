#pragma once

// Text checkpoint for Mlp parameters.
//
//   kickrl-mlp 1
//   layers <L>
//   layer <k> <outputs> <inputs>
//   <outputs lines of <inputs> weights, row-major>
//   <one line of <outputs> biases>
//   ... repeated for each layer
//
// Numbers are written in shortest round-trip form, so load(save(net)) is
// bit-exact.

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "kickrl/mlp.hpp"
#include "kickrl/numeric_text.hpp"

namespace kickrl {

inline constexpr std::string_view kCheckpointMagic = "kickrl-mlp";
inline constexpr int kCheckpointVersion = 1;

inline void write_checkpoint(std::ostream& out, const Mlp& net) {
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << "layers " << net.depth() << '\n';
  for (std::size_t k = 0; k < net.depth(); ++k) {
    const auto& l = net.layers()[k];
    out << "layer " << k << ' ' << l.outputs() << ' ' << l.inputs() << '\n';
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
        out << (c ? " " : "") << format_double(l.weights(r, c));
      }
      out << '\n';
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
      out << (r ? " " : "") << format_double(l.bias[r]);
    }
    out << '\n';
  }
}

inline Mlp read_checkpoint(std::istream& in) {
  auto fail = [](const std::string& why) {
    throw std::runtime_error("bad checkpoint: " + why);
  };
  std::string magic, word;
  int version = 0;
  std::size_t depth = 0;
  if (!(in >> magic >> version) || magic != kCheckpointMagic) fail("missing header");
  if (version != kCheckpointVersion) fail("unsupported version " + std::to_string(version));
  if (!(in >> word >> depth) || word != "layers" || depth == 0) fail("layer count");

  auto next_double = [&] {
    std::string tok;
    if (!(in >> tok)) fail("truncated parameters");
    return parse_double(tok);
  };

  std::vector<int> widths;
  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k < depth; ++k) {
    std::size_t index = 0;
    int outputs = 0, inputs = 0;
    if (!(in >> word >> index >> outputs >> inputs) || word != "layer" || index != k ||
        outputs < 1 || inputs < 1) {
      fail("layer header " + std::to_string(k));
    }
    if (k == 0) widths.push_back(inputs);
    if (inputs != widths.back()) fail("layer " + std::to_string(k) + " input width");
    widths.push_back(outputs);
    DenseLayer l{Eigen::MatrixXd(outputs, inputs), Eigen::VectorXd(outputs)};
    for (int r = 0; r < outputs; ++r) {
      for (int c = 0; c < inputs; ++c) l.weights(r, c) = next_double();
    }
    for (int r = 0; r < outputs; ++r) l.bias[r] = next_double();
    layers.push_back(std::move(l));
  }

  Mlp net(widths);
  net.layers() = std::move(layers);
  return net;
}

inline void save_checkpoint(const Mlp& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_checkpoint(out, net);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline Mlp load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_checkpoint(in);
}

}  // namespace kickrl
