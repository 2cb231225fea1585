// kickrl: train DQN kick agents, compare encodings, plot learning curves.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kickrl/config.hpp"
#include "kickrl/experiment.hpp"
#include "kickrl/report.hpp"
#include "kickrl/verify.hpp"

namespace {

using namespace kickrl;

std::vector<Encoding> parse_encodings(const std::string& list) {
  std::vector<Encoding> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = detail::trim(tok);
    if (tok == "all") {
      for (const auto& e : default_ablation_encodings()) out.push_back(e);
    } else {
      out.push_back(Encoding::parse(tok));
    }
  }
  if (out.empty()) throw std::invalid_argument("no encodings given");
  return out;
}

std::vector<RunResult> load_runs(const std::vector<std::string>& dirs) {
  std::vector<RunResult> runs;
  for (const auto& d : dirs) runs.push_back(load_run(d));
  return runs;
}

int train(const std::string& config_path, const std::string& encodings,
          const std::string& seeds, const std::string& output_dir, unsigned jobs) {
  ExperimentConfig base = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
  if (!seeds.empty()) base.seeds = detail::parse_seed_list(seeds);
  if (!output_dir.empty()) base.output_dir = output_dir;
  const std::vector<Encoding> list =
      encodings.empty() ? std::vector<Encoding>{base.encoding} : parse_encodings(encodings);

  std::vector<RunResult> results;
  for (const auto& e : list) {
    ExperimentConfig c = base;
    c.encoding = e;
    std::cerr << "training " << e.name() << ": " << c.seeds.size() << " seeds x " << c.episodes
              << " episodes" << std::endl;
    results.push_back(run_experiment(c, jobs));
    const fs::path dir = run_directory(c);
    persist_run(results.back(), dir);
    std::cerr << "  wrote " << dir.string() << " ("
              << detail::fixed(results.back().wall_seconds, 1) << " s)" << std::endl;
  }
  if (results.size() > 1) {
    emit_plot(results, fs::path(base.output_dir) / "moving_average.svg");
    std::cout << format_report(compare_encodings(results, -4.0));
  }
  return 0;
}

int check_frames(std::uint64_t seed, int cases) {
  bool ok = true;
  for (const auto& r : verify::run_frame_property_suite(seed, cases)) {
    ok = ok && r.passed;
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name
              << (r.detail.empty() ? "" : " (" + r.detail + ")") << " ["
              << detail::fixed(r.seconds * 1000.0, 1) << " ms]\n";
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kick-motion DQN experiments with absolute and robot-relative state encodings"};
  app.require_subcommand(1);

  std::string config_path, encodings, seeds, output_dir;
  unsigned jobs = 0;
  auto* train_cmd = app.add_subcommand("train", "run an experiment and write run directories");
  train_cmd->add_option("-c,--config", config_path, "config file (key = value)")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("-e,--encoding", encodings,
                        "comma list of acs, rcs, rcs+N, or 'all' (overrides config)");
  train_cmd->add_option("-s,--seeds", seeds, "comma list of seeds (overrides config)");
  train_cmd->add_option("-o,--output-dir", output_dir, "output root (overrides config)");
  train_cmd->add_option("-j,--jobs", jobs, "parallel seeds (0 = all cores)");

  std::vector<std::string> run_dirs;
  std::string plot_out;
  auto* plot_cmd = app.add_subcommand("plot", "render seed-median moving averages as SVG");
  plot_cmd->add_option("runs", run_dirs, "run directories")->required()->check(CLI::ExistingDirectory);
  plot_cmd->add_option("--out", plot_out, "output SVG path")->required();

  double threshold = -4.0;
  auto* compare_cmd = app.add_subcommand("compare", "threshold crossings and peaks per encoding");
  compare_cmd->add_option("runs", run_dirs, "run directories")
      ->required()
      ->check(CLI::ExistingDirectory);
  compare_cmd->add_option("--threshold", threshold, "moving-average threshold");

  std::uint64_t check_seed = 2024;
  int check_cases = 1000;
  auto* check_cmd = app.add_subcommand("check-frames", "run the frame property suite");
  check_cmd->add_option("--seed", check_seed);
  check_cmd->add_option("--cases", check_cases)->check(CLI::PositiveNumber);

  auto* print_cmd = app.add_subcommand("print-config", "print the effective configuration");
  print_cmd->add_option("-c,--config", config_path)->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return train(config_path, encodings, seeds, output_dir, jobs);
    if (*plot_cmd) {
      emit_plot(load_runs(run_dirs), plot_out);
      return 0;
    }
    if (*compare_cmd) {
      std::cout << format_report(compare_encodings(load_runs(run_dirs), threshold));
      return 0;
    }
    if (*check_cmd) return check_frames(check_seed, check_cases);
    if (*print_cmd) {
      std::cout << format_config(config_path.empty() ? ExperimentConfig{}
                                                     : load_config(config_path));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "kickrl: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
