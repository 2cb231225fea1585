#pragma once

// Run persistence, encoding comparison and SVG learning curves.
//
// A run directory holds one encoding's results:
//   config.txt    effective configuration (config file format)
//   episodes.csv  seed,episode,total_reward,moving_average,epsilon,contact_happened
//   timing.txt    wall-clock seconds (the only nondeterministic output)

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kickrl/config.hpp"
#include "kickrl/experiment.hpp"
#include "kickrl/numeric_text.hpp"

namespace kickrl {

namespace fs = std::filesystem;

inline constexpr std::string_view kCsvHeader =
    "seed,episode,total_reward,moving_average,epsilon,contact_happened";

inline void write_csv(std::ostream& out, const RunResult& r) {
  out << kCsvHeader << '\n';
  for (const auto& run : r.runs) {
    for (std::size_t i = 0; i < run.episodes.size(); ++i) {
      const auto& e = run.episodes[i];
      out << run.seed << ',' << e.episode_index << ',' << format_double(e.total_reward) << ','
          << format_double(run.moving_average.at(i)) << ',' << format_double(e.epsilon) << ','
          << (e.contact_happened ? 1 : 0) << '\n';
    }
  }
}

inline void emit_csv(const RunResult& r, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, r);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Reads rows back into per-seed runs, in first-appearance seed order.
// first_contact_step is not stored and comes back empty.
inline std::vector<SeedRun> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("episodes.csv: unexpected header");
  }
  std::vector<SeedRun> runs;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 6) {
      throw std::runtime_error("episodes.csv line " + std::to_string(lineno) +
                               ": expected 6 fields");
    }
    const auto seed = static_cast<std::uint64_t>(detail::parse_integer(f[0]));
    if (runs.empty() || runs.back().seed != seed) {
      runs.push_back({seed, {}, {}});
    }
    EpisodeLog e;
    e.episode_index = detail::parse_int(f[1]);
    e.total_reward = parse_double(f[2]);
    e.epsilon = parse_double(f[4]);
    e.contact_happened = f[5] == "1";
    runs.back().episodes.push_back(e);
    runs.back().moving_average.push_back(parse_double(f[3]));
  }
  return runs;
}

inline fs::path run_directory(const ExperimentConfig& cfg) {
  return fs::path(cfg.output_dir) / cfg.encoding.name();
}

inline void persist_run(const RunResult& r, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  {
    std::ofstream out(dir / "config.txt", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "config.txt").string());
    out << format_config(r.config);
  }
  emit_csv(r, dir / "episodes.csv");
  std::ofstream t(dir / "timing.txt", std::ios::binary);
  t << "wall_seconds = " << format_double(r.wall_seconds) << '\n';
}

inline RunResult load_run(const fs::path& dir) {
  RunResult r;
  r.config = load_config(dir / "config.txt");
  std::ifstream in(dir / "episodes.csv", std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + (dir / "episodes.csv").string());
  r.runs = read_csv(in);
  return r;
}

// ---------------------------------------------------------------------------

// First 1-based episode whose moving average is strictly above threshold.
inline std::optional<int> crossing_episode(const std::vector<double>& ma, double threshold) {
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (ma[i] > threshold) return static_cast<int>(i + 1);
  }
  return std::nullopt;
}

struct EncodingSummary {
  std::string encoding;
  std::vector<std::uint64_t> seeds;
  std::vector<std::optional<int>> crossings;  // per seed
  std::optional<double> median_crossing;      // "never" counts as +infinity
  std::vector<double> seed_peaks;             // max moving average per seed
  double peak = 0.0;                          // max of the seed-median curve
  int peak_episode = 0;
};

struct ComparisonReport {
  double threshold = -4.0;
  int episodes = 0;
  int window = 0;
  std::vector<EncodingSummary> rows;

  const EncodingSummary* find(std::string_view encoding) const {
    for (const auto& r : rows) {
      if (r.encoding == encoding) return &r;
    }
    return nullptr;
  }
};

// Throws if the runs differ in anything but encoding and output location.
inline void check_ablation_fairness(const std::vector<RunResult>& results) {
  for (std::size_t i = 1; i < results.size(); ++i) {
    const auto diffs = ablation_differences(results[0].config, results[i].config);
    if (!diffs.empty()) {
      std::string keys;
      for (const auto& d : diffs) keys += (keys.empty() ? "" : ", ") + d;
      throw std::invalid_argument("runs " + results[0].config.encoding.name() + " and " +
                                  results[i].config.encoding.name() +
                                  " are not comparable; differing keys: " + keys);
    }
  }
}

inline ComparisonReport compare_encodings(const std::vector<RunResult>& results,
                                          double threshold) {
  if (results.empty()) throw std::invalid_argument("compare: no runs");
  check_ablation_fairness(results);

  ComparisonReport rep;
  rep.threshold = threshold;
  rep.episodes = results.front().config.episodes;
  rep.window = results.front().config.moving_average_window;
  for (const auto& r : results) {
    EncodingSummary row;
    row.encoding = r.config.encoding.name();
    std::vector<double> keyed;
    for (const auto& run : r.runs) {
      row.seeds.push_back(run.seed);
      const auto c = crossing_episode(run.moving_average, threshold);
      row.crossings.push_back(c);
      keyed.push_back(c ? *c : std::numeric_limits<double>::infinity());
      row.seed_peaks.push_back(run.moving_average.empty()
                                   ? std::numeric_limits<double>::quiet_NaN()
                                   : *std::max_element(run.moving_average.begin(),
                                                       run.moving_average.end()));
    }
    if (!keyed.empty()) {
      const double m = median(keyed);
      if (std::isfinite(m)) row.median_crossing = m;
    }
    const auto curve = median_curve(r);
    if (!curve.empty()) {
      const auto it = std::max_element(curve.begin(), curve.end());
      row.peak = *it;
      row.peak_episode = static_cast<int>(it - curve.begin()) + 1;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

inline std::string format_report(const ComparisonReport& rep) {
  auto crossing_text = [](const std::optional<double>& c) {
    return c ? format_double(*c) : std::string("never");
  };
  std::ostringstream out;
  out << "threshold " << format_double(rep.threshold) << ", window " << rep.window
      << ", episodes " << rep.episodes << "\n";
  out << "encoding  median_crossing  peak(median curve)  peak_episode  per-seed crossings\n";
  for (const auto& r : rep.rows) {
    out << r.encoding << "  " << crossing_text(r.median_crossing) << "  "
        << format_double(r.peak) << "  " << r.peak_episode << "  [";
    for (std::size_t i = 0; i < r.crossings.size(); ++i) {
      out << (i ? " " : "") << r.seeds[i] << ":"
          << (r.crossings[i] ? std::to_string(*r.crossings[i]) : "never");
    }
    out << "]\n";
  }
  out << "published single-run reference (qualitative only): rcs crosses -4 at episode "
         "1500, about 500 episodes before acs; rcs peak 6.8\n";
  return out.str();
}

// ---------------------------------------------------------------------------

struct PlotStyle {
  int width = 900;
  int height = 540;
  int margin_left = 80;
  int margin_right = 150;
  int margin_top = 30;
  int margin_bottom = 60;
  double reference_level = -4.0;
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string fixed(double v, int digits = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

// Roughly five round-number ticks covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double stepv = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * mag >= raw) {
      stepv = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / stepv) * stepv; t <= hi + 1e-9 * span; t += stepv) {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

inline const char* series_color(std::size_t i) {
  static constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd",
                                            "#d62728", "#8c564b", "#e377c2", "#7f7f7f"};
  return kColors[i % std::size(kColors)];
}

}  // namespace detail

// One polyline per run (seed-median moving average) plus a dashed reference
// line at style.reference_level.
inline std::string render_plot(const std::vector<RunResult>& results,
                               const PlotStyle& style = {}) {
  if (results.empty()) throw std::invalid_argument("plot: no runs");
  std::vector<std::vector<double>> curves;
  int episodes = 1;
  double ymin = style.reference_level, ymax = style.reference_level;
  for (const auto& r : results) {
    curves.push_back(median_curve(r));
    episodes = std::max(episodes, static_cast<int>(curves.back().size()));
    for (double v : curves.back()) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  const double pad = std::max(0.05 * (ymax - ymin), 0.5);
  ymin -= pad;
  ymax += pad;

  const double x0 = style.margin_left, x1 = style.width - style.margin_right;
  const double y0 = style.margin_top, y1 = style.height - style.margin_bottom;
  auto sx = [&](double ep) {
    return episodes == 1 ? x0 : x0 + (ep - 1.0) / (episodes - 1.0) * (x1 - x0);
  };
  auto sy = [&](double v) { return y1 - (v - ymin) / (ymax - ymin) * (y1 - y0); };
  using detail::fixed;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
      << style.height << "\" viewBox=\"0 0 " << style.width << ' ' << style.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  svg << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
      << "<line x1=\"" << fixed(x0) << "\" y1=\"" << fixed(y1) << "\" x2=\"" << fixed(x1)
      << "\" y2=\"" << fixed(y1) << "\"/>\n"
      << "<line x1=\"" << fixed(x0) << "\" y1=\"" << fixed(y0) << "\" x2=\"" << fixed(x0)
      << "\" y2=\"" << fixed(y1) << "\"/>\n"
      << "</g>\n";

  svg << "<g class=\"ticks\" fill=\"black\">\n";
  std::vector<double> xticks = detail::nice_ticks(1.0, episodes);
  if (xticks.empty() || xticks.front() > 1.0) xticks.insert(xticks.begin(), 1.0);
  for (double t : xticks) {
    svg << "<text x=\"" << fixed(sx(t)) << "\" y=\"" << fixed(y1 + 18)
        << "\" text-anchor=\"middle\">" << fixed(t, 0) << "</text>\n";
  }
  for (double t : detail::nice_ticks(ymin, ymax)) {
    svg << "<text x=\"" << fixed(x0 - 6) << "\" y=\"" << fixed(sy(t) + 4)
        << "\" text-anchor=\"end\">" << fixed(t, 1) << "</text>\n";
  }
  svg << "</g>\n";

  svg << "<text class=\"xlabel\" x=\"" << fixed((x0 + x1) / 2) << "\" y=\""
      << fixed(style.height - 15.0) << "\" text-anchor=\"middle\">episode</text>\n"
      << "<text class=\"ylabel\" x=\"18\" y=\"" << fixed((y0 + y1) / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << fixed((y0 + y1) / 2)
      << ")\">moving-average total reward</text>\n";

  const double ry = sy(style.reference_level);
  svg << "<line class=\"reference\" x1=\"" << fixed(x0) << "\" y1=\"" << fixed(ry)
      << "\" x2=\"" << fixed(x1) << "\" y2=\"" << fixed(ry)
      << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    svg << "<polyline class=\"series\" data-encoding=\""
        << detail::xml_escape(results[i].config.encoding.name()) << "\" fill=\"none\" stroke=\""
        << detail::series_color(i) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < curves[i].size(); ++k) {
      svg << (k ? " " : "") << fixed(sx(static_cast<double>(k + 1))) << ','
          << fixed(sy(curves[i][k]));
    }
    svg << "\"/>\n";
  }

  svg << "<g class=\"legend\">\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const double ly = y0 + 10 + 20.0 * static_cast<double>(i);
    svg << "<line x1=\"" << fixed(x1 + 15) << "\" y1=\"" << fixed(ly) << "\" x2=\""
        << fixed(x1 + 40) << "\" y2=\"" << fixed(ly) << "\" stroke=\""
        << detail::series_color(i) << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << fixed(x1 + 46) << "\" y=\"" << fixed(ly + 4) << "\">"
        << detail::xml_escape(results[i].config.encoding.name()) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

inline void emit_plot(const std::vector<RunResult>& results, const fs::path& path,
                      const PlotStyle& style = {}) {
  const std::string text = render_plot(results, style);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace kickrl
