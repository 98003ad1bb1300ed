// Copyright 2026 The mtend Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line runner: train, eval, ablate, replay, schema.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtend/config.hpp"
#include "mtend/errors.hpp"
#include "mtend/metrics.hpp"
#include "mtend/nn/checkpoint.hpp"
#include "mtend/rl/trainer.hpp"
#include "mtend/trace.hpp"

namespace fs = std::filesystem;
using namespace mtend;
using Trainer = rl::MappoTrainer<float>;

namespace {

constexpr const char* kVersion = "mtend 1.0.0";

std::string now_iso() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::unique_ptr<Trainer> make_trainer(const ExperimentConfig& c, std::uint64_t seed) {
  return std::make_unique<Trainer>(c.scenario, c.observation, c.reward, c.train, c.network, c.critic, seed);
}

nlohmann::json schema_json(const ExperimentConfig& c) {
  const TendingScenario scenario(c.scenario);
  const ObservationBuilder b(scenario.layout(), scenario.episode_length(), c.observation);
  nlohmann::json fields = nlohmann::json::array();
  for (const auto& f : b.schema()) fields.push_back({{"name", f.name}, {"offset", f.offset}, {"width", f.width}});
  return {{"dim", b.dim()}, {"fields", fields}};
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("write failed for " + p.string());
}

struct SeedResult {
  std::vector<EpisodeMetrics> episodes;
};

// Trains one seed into `dir`. Returns every episode's metrics, including
// those read back from an existing CSV when resuming.
SeedResult train_seed(const ExperimentConfig& c, std::uint64_t seed, const fs::path& dir, const std::string& resume) {
  fs::create_directories(dir / "checkpoints");
  auto trainer = make_trainer(c, seed);
  SeedResult result;
  const fs::path csv_path = dir / "metrics.csv";
  const fs::path upd_path = dir / "updates.csv";
  if (!resume.empty()) {
    trainer->restore(nn::load_checkpoint(resume));
    std::cerr << "[seed " << seed << "] resumed from " << resume << " at episode " << trainer->episodes_done() << "\n";
  }
  const bool append = !resume.empty() && fs::exists(csv_path);
  if (append) {
    // Keep rows up to the checkpoint so numbering continues without gaps.
    std::ifstream in(csv_path);
    std::string line, kept;
    std::getline(in, line);
    kept = line + "\n";
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string s, e;
      std::getline(ss, s, ',');
      std::getline(ss, e, ',');
      if (std::stol(e) >= trainer->episodes_done()) break;
      kept += line + "\n";
      EpisodeMetrics m;
      std::string field;
      std::vector<double> v;
      while (std::getline(ss, field, ',')) v.push_back(std::stod(field));
      m.collected = static_cast<int>(v.at(0));
      m.delivered = static_cast<int>(v.at(1));
      m.collisions = static_cast<int>(v.at(2));
      m.avr_mu = v.at(3);
      m.avr_au = v.at(4);
      m.return_total = v.at(5);
      result.episodes.push_back(m);
    }
    write_text(csv_path, kept);
  }
  std::ofstream csv(csv_path, append ? std::ios::app : std::ios::trunc);
  std::ofstream upd(upd_path, append ? std::ios::app : std::ios::trunc);
  if (!csv || !upd) throw IoError("cannot write metrics in " + dir.string());
  if (!append) {
    csv << metrics_csv_header() << "\n";
    upd << rl::update_stats_csv_header() << "\n";
  }
  trainer->on_episode([&](long index, const EpisodeMetrics& m) {
    csv << metrics_csv_row(static_cast<long>(seed), index, m) << "\n";
    result.episodes.push_back(m);
  });

  const long total_updates = trainer->updates_needed(c.train.episodes);
  long next_ckpt = c.checkpoint_interval > 0 ? (trainer->episodes_done() / c.checkpoint_interval + 1) * c.checkpoint_interval : -1;
  rl::UpdateStats last{};
  const auto t0 = std::chrono::steady_clock::now();
  while (trainer->updates_done() < total_updates) {
    // Snapshot before each update so a numeric failure leaves a usable checkpoint.
    const nn::Checkpoint last_good = trainer->checkpoint();
    try {
      last = trainer->update();
    } catch (const NumericError& e) {
      csv.flush();
      upd.flush();
      std::ostringstream diag;
      diag << "error: " << e.what() << "\nseed: " << seed << "\nupdates_done: " << trainer->updates_done()
           << "\nepisodes_done: " << trainer->episodes_done() << "\nlast_update: " << rl::update_stats_csv_row(last) << "\n";
      write_text(dir / "diagnostics.txt", diag.str());
      nn::save_checkpoint(dir / "checkpoints" / "last_good.ckpt", last_good);
      throw;
    }
    upd << rl::update_stats_csv_row(last) << "\n";
    if (next_ckpt > 0 && trainer->episodes_done() >= next_ckpt) {
      nn::save_checkpoint(dir / "checkpoints" / ("episode_" + std::to_string(trainer->episodes_done()) + ".ckpt"), trainer->checkpoint());
      while (next_ckpt <= trainer->episodes_done()) next_ckpt += c.checkpoint_interval;
    }
    if (last.update % 10 == 0 || trainer->updates_done() == total_updates) {
      const std::size_t n = std::min<std::size_t>(result.episodes.size(), 100);
      double col = 0, del = 0;
      for (std::size_t k = result.episodes.size() - n; k < result.episodes.size(); ++k) {
        col += result.episodes[k].collected;
        del += result.episodes[k].delivered;
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cerr << "[seed " << seed << "] update " << trainer->updates_done() << "/" << total_updates << " episodes "
                << trainer->episodes_done() << " last" << n << " collected " << (n ? col / n : 0.0) << " delivered "
                << (n ? del / n : 0.0) << " (" << static_cast<int>(secs) << "s)\n";
    }
    csv.flush();
    upd.flush();
  }
  nn::save_checkpoint(dir / "final.ckpt", trainer->checkpoint());
  return result;
}

AggregateReport run_train(ExperimentConfig c, const fs::path& out, const std::string& resume, bool deterministic,
                          const std::string& config_path) {
  const bool resuming = !resume.empty();
  if (!resuming && fs::exists(out / "manifest.json")) {
    throw IoError("output directory " + out.string() + " already holds a run; choose a new --out");
  }
  fs::create_directories(out);
  nlohmann::json manifest = {{"version", kVersion},
                             {"config_path", config_path},
                             {"started", now_iso()},
                             {"deterministic", deterministic},
                             {"seeds", c.seeds},
                             {"episodes", c.train.episodes}};
  for (auto s : c.seeds) manifest["outputs"][std::to_string(s)] = (out / ("seed_" + std::to_string(s))).string();
  if (!resuming) {
    write_text(out / "config.yaml", serialize_config(c));
    write_text(out / "schema.json", schema_json(c).dump(2) + "\n");
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
  }
  std::vector<std::vector<EpisodeMetrics>> runs;
  const auto t0 = std::chrono::steady_clock::now();
  for (auto s : c.seeds) runs.push_back(train_seed(c, s, out / ("seed_" + std::to_string(s)), resume).episodes);
  const int window = static_cast<int>(std::min<std::size_t>(c.eval_window, [&] {
    std::size_t m = runs.front().size();
    for (const auto& r : runs) m = std::min(m, r.size());
    return m;
  }()));
  const AggregateReport report = aggregate(runs, std::max(1, window));
  std::ostringstream table;
  table << "final " << report.window << " training episodes, " << report.seeds << " seed(s)\n";
  write_report_table(table, {{c.name, report}});
  write_text(out / "report.txt", table.str());
  nlohmann::json summary = {{"finished", now_iso()},
                            {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  write_text(out / (resuming ? "summary_resume.json" : "summary.json"), summary.dump(2) + "\n");
  std::cout << table.str();
  return report;
}

// Per-env trace buffers; an episode is written once it finishes.
class EvalTracer {
 public:
  EvalTracer(rl::VectorEnv& env, const ExperimentConfig& c, std::uint64_t seed, std::ostream& out, long limit)
      : c_(c), seed_(seed), out_(out), limit_(limit), buffers_(env.num_envs()) {
    env.on_reset([this](int e, const ScenarioState& s) {
      buffers_[e].str("");
      TraceWriter(buffers_[e]).begin_episode(c_, seed_, -1, s);
    });
    env.on_step([this, &env](const rl::EnvTransition& tr) {
      TraceWriter(buffers_[tr.env]).record(*tr.prev, tr.actions, *tr.curr, *tr.events);
      if (env.scenario().finished(*tr.curr) && written_ < limit_) {
        std::string text = buffers_[tr.env].str();
        const std::string marker = "\"episode\":-1";
        if (const auto pos = text.find(marker); pos != std::string::npos) {
          text.replace(pos, marker.size(), "\"episode\":" + std::to_string(written_));
        }
        out_ << text;
        ++written_;
      }
    });
  }

 private:
  const ExperimentConfig& c_;
  std::uint64_t seed_;
  std::ostream& out_;
  long limit_;
  long written_ = 0;
  std::vector<std::ostringstream> buffers_;
};

int cmd_eval(const std::string& ckpt, const ExperimentConfig& c, std::uint64_t seed, long episodes, const std::string& out_dir,
             const std::string& trace_path) {
  auto trainer = make_trainer(c, seed);
  trainer->restore(nn::load_checkpoint(ckpt), false);
  std::ofstream trace_out;
  std::unique_ptr<EvalTracer> tracer;
  if (!trace_path.empty()) {
    trace_out.open(trace_path);
    if (!trace_out) throw IoError("cannot write trace " + trace_path);
    tracer = std::make_unique<EvalTracer>(trainer->env(), c, seed, trace_out, episodes);
  }
  const auto metrics = trainer->evaluate(episodes, seed);
  const AggregateReport report = aggregate({metrics}, static_cast<int>(metrics.size()));
  std::ostringstream table;
  table << "greedy evaluation, " << metrics.size() << " episodes, seed " << seed << "\n";
  write_report_table(table, {{c.name, report}});
  std::cout << table.str();
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "eval_metrics.csv");
    if (!csv) throw IoError("cannot write eval metrics in " + out_dir);
    csv << metrics_csv_header() << "\n";
    for (std::size_t k = 0; k < metrics.size(); ++k) csv << metrics_csv_row(static_cast<long>(seed), static_cast<long>(k), metrics[k]) << "\n";
    write_text(fs::path(out_dir) / "eval_report.txt", table.str());
  }
  return 0;
}

int cmd_replay(const std::string& path, const std::string& frames_dir) {
  const auto episodes = load_trace(path);
  const auto r = replay(episodes);
  for (const auto& line : r.timeline) std::cout << line << "\n";
  if (!frames_dir.empty()) {
    fs::create_directories(frames_dir);
    for (std::size_t e = 0; e < episodes.size(); ++e) {
      const ExperimentConfig cfg = parse_config(episodes[e].config_text, ".", "trace header");
      const TendingScenario scenario(cfg.scenario);
      for (std::size_t k = 0; k < r.states[e].size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "ep%03zu_t%04zu.ppm", e, k);
        write_frame_ppm(fs::path(frames_dir) / name, scenario, r.states[e][k]);
      }
    }
  }
  if (!r.events_match || r.max_position_error > 1e-9) {
    std::cerr << "warning: replay diverges from the logged trace (max position error " << r.max_position_error
              << ", events match: " << (r.events_match ? "yes" : "no") << ")\n";
    throw StateError("replay diverged from trace");
  }
  return 0;
}

int cmd_schema(const ExperimentConfig& c) {
  const auto j = schema_json(c);
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent machine tending: training, evaluation, ablations and replay"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, ckpt_path, sweep_path, trace_path, out_dir, resume, frames_dir, eval_trace;
  std::vector<std::uint64_t> seeds;
  long episodes = 0;
  bool deterministic = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seeds, "Seed(s); overrides the config's seed list");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--episodes", episodes, "Episode budget (training) or evaluation episodes");
    sub->add_flag("--deterministic", deterministic, "Single-threaded, bit-reproducible execution");
  };

  auto* train = app.add_subcommand("train", "Train every seed of a config");
  train->add_option("config", config_path, "Experiment config (YAML)")->required();
  train->add_option("--resume", resume, "Continue from a checkpoint (single seed)");
  add_common(train);

  auto* eval = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
  eval->add_option("checkpoint", ckpt_path, "Checkpoint file")->required();
  eval->add_option("config", config_path, "Experiment config (YAML)")->required();
  eval->add_option("--trace", eval_trace, "Write a replayable trace of the evaluation episodes");
  add_common(eval);

  auto* ablate = app.add_subcommand("ablate", "Run every config in a sweep file");
  ablate->add_option("sweep", sweep_path, "Sweep file (YAML)")->required();
  add_common(ablate);

  auto* rep = app.add_subcommand("replay", "Re-simulate a trace and print its event timeline");
  rep->add_option("trace", trace_path, "Trace file")->required();
  rep->add_option("--frames", frames_dir, "Also write one PPM image per step into this directory");

  auto* schema = app.add_subcommand("schema", "Print the observation schema of a config");
  schema->add_option("config", config_path, "Experiment config (YAML)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::kUsage);
  }

  try {
    auto apply_overrides = [&](ExperimentConfig& c) {
      if (!seeds.empty()) c.seeds = seeds;
      if (episodes > 0 && !eval->parsed()) c.train.episodes = episodes;
    };
    if (train->parsed()) {
      ExperimentConfig c = load_config(config_path);
      apply_overrides(c);
      if (!resume.empty() && c.seeds.size() != 1) throw UsageError("--resume needs exactly one seed (use --seed)");
      const fs::path out = out_dir.empty() ? fs::path(c.output_dir) / c.name : fs::path(out_dir);
      run_train(c, out, resume, deterministic, config_path);
    } else if (eval->parsed()) {
      ExperimentConfig c = load_config(config_path);
      apply_overrides(c);
      const long n = episodes > 0 ? episodes : c.eval_episodes;
      return cmd_eval(ckpt_path, c, seeds.empty() ? 0 : seeds.front(), n, out_dir, eval_trace);
    } else if (ablate->parsed()) {
      const SweepSpec sweep = load_sweep(sweep_path);
      std::vector<ExperimentConfig> configs;
      for (const auto& p : sweep.configs) configs.push_back(load_config(p));  // validate all before running any
      const fs::path out = out_dir.empty() ? fs::path("runs") / sweep.name : fs::path(out_dir);
      std::vector<std::pair<std::string, AggregateReport>> columns;
      for (std::size_t k = 0; k < configs.size(); ++k) {
        apply_overrides(configs[k]);
        const auto stem = sweep.configs[k].stem().string();
        std::cerr << "== " << stem << " ==\n";
        columns.emplace_back(configs[k].name, run_train(configs[k], out / stem, "", deterministic, sweep.configs[k].string()));
      }
      std::ostringstream table;
      table << "sweep " << sweep.name << "\n";
      write_report_table(table, columns);
      write_text(out / "report.txt", table.str());
      std::cout << table.str();
    } else if (rep->parsed()) {
      return cmd_replay(trace_path, frames_dir);
    } else if (schema->parsed()) {
      return cmd_schema(load_config(config_path));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::kIo);
  } catch (const YAML::Exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::kConfig);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::kState);
  }
  return 0;
}
