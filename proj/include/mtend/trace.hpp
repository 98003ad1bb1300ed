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

#pragma once

// Episode traces as line-delimited JSON, and replay by re-simulation.
//
//   {"type":"header","version":1,"seed":..,"episode":..,"config":"<yaml>"}
//   {"type":"reset","positions":[[x,y],...]}
//   {"type":"step","t":0,"actions":[..],"positions":[..],"picks":[[a,m]],"places":[a],"contacts":[[i,j]]}
//
// A file may hold several episodes; each starts with a header. `t` is the
// scenario time before the step; contacts list onsets only.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtend/config.hpp"
#include "mtend/scenario.hpp"

namespace mtend {

inline constexpr int kTraceVersion = 1;

class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}

  void begin_episode(const ExperimentConfig& config, std::uint64_t seed, long episode, const ScenarioState& initial) {
    nlohmann::json h = {{"type", "header"}, {"version", kTraceVersion}, {"seed", seed}, {"episode", episode},
                        {"config", serialize_config(config)}};
    write(h);
    write({{"type", "reset"}, {"positions", positions(initial)}});
  }

  void record(const ScenarioState& prev, std::span<const int> actions, const ScenarioState& curr, const StepEvents& events) {
    nlohmann::json picks = nlohmann::json::array(), places = nlohmann::json::array(), contacts = nlohmann::json::array();
    for (const auto& p : events.picks) picks.push_back({p.agent, p.machine});
    for (int a : events.places) places.push_back(a);
    for (const auto& c : events.contacts) {
      if (c.onset) contacts.push_back({c.body_a, c.body_b});
    }
    write({{"type", "step"},
           {"t", prev.t},
           {"actions", std::vector<int>(actions.begin(), actions.end())},
           {"positions", positions(curr)},
           {"picks", picks},
           {"places", places},
           {"contacts", contacts}});
  }

 private:
  static nlohmann::json positions(const ScenarioState& s) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& a : s.agents) out.push_back({a.position.x, a.position.y});
    return out;
  }
  void write(const nlohmann::json& j) { out_ << j.dump() << '\n'; }

  std::ostream& out_;
};

struct TraceStep {
  int t = 0;
  std::vector<int> actions;
  std::vector<Vec2> positions;
  std::vector<PickEvent> picks;
  std::vector<int> places;
  std::vector<BodyPair> contacts;
};

struct TraceEpisode {
  std::uint64_t seed = 0;
  long episode = 0;
  std::string config_text;
  std::vector<Vec2> initial_positions;
  std::vector<TraceStep> steps;
};

// Throws IoError naming the offending line and the last valid step.
inline std::vector<TraceEpisode> read_trace(std::istream& in, const std::string& origin = "<trace>") {
  std::vector<TraceEpisode> out;
  std::string line;
  long line_no = 0;
  std::string last_valid = "none";
  auto fail = [&](const std::string& why) {
    throw IoError(origin + ": corrupt trace at line " + std::to_string(line_no) + " (" + why + "); last valid step: " + last_valid);
  };
  auto vec2s = [&](const nlohmann::json& j) {
    std::vector<Vec2> v;
    for (const auto& p : j) v.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      fail("invalid JSON");
    }
    try {
      const auto type = j.at("type").get<std::string>();
      if (type == "header") {
        if (j.at("version").get<int>() != kTraceVersion) fail("unsupported version");
        TraceEpisode ep;
        ep.seed = j.at("seed").get<std::uint64_t>();
        ep.episode = j.at("episode").get<long>();
        ep.config_text = j.at("config").get<std::string>();
        out.push_back(std::move(ep));
      } else if (type == "reset") {
        if (out.empty()) fail("reset before header");
        out.back().initial_positions = vec2s(j.at("positions"));
      } else if (type == "step") {
        if (out.empty()) fail("step before header");
        TraceStep s;
        s.t = j.at("t").get<int>();
        s.actions = j.at("actions").get<std::vector<int>>();
        s.positions = vec2s(j.at("positions"));
        for (const auto& p : j.at("picks")) s.picks.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
        s.places = j.at("places").get<std::vector<int>>();
        for (const auto& c : j.at("contacts")) s.contacts.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
        out.back().steps.push_back(std::move(s));
        last_valid = "episode " + std::to_string(out.back().episode) + " t=" + std::to_string(out.back().steps.back().t);
      } else {
        fail("unknown record type '" + type + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("missing or malformed field: ") + e.what());
    }
  }
  return out;
}

inline std::vector<TraceEpisode> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read trace " + path.string());
  return read_trace(in, path.string());
}

inline std::string body_label(const BodyIndex& idx, int id) {
  if (id < idx.machine(0)) return "agent " + std::to_string(id);
  if (id < idx.blocker(0)) return "machine " + std::to_string(id - idx.machine(0));
  if (id < idx.storage()) return "blocker " + std::to_string(id - idx.blocker(0));
  if (id == idx.storage()) return "storage";
  return "wall " + std::to_string(id - idx.wall(0));
}

struct ReplayResult {
  std::vector<std::string> timeline;
  double max_position_error = 0.0;  // replayed vs logged
  bool events_match = true;
  std::vector<std::vector<ScenarioState>> states;  // per episode, including the initial state
};

// Re-simulates every episode from its logged initial positions and actions.
inline ReplayResult replay(const std::vector<TraceEpisode>& episodes) {
  ReplayResult r;
  for (const auto& ep : episodes) {
    const ExperimentConfig cfg = parse_config(ep.config_text, ".", "trace header");
    const TendingScenario scenario(cfg.scenario);
    const BodyIndex idx = scenario.index();
    ScenarioState state = scenario.reset(nullptr);
    if (ep.initial_positions.size() != state.agents.size()) {
      throw IoError("trace episode " + std::to_string(ep.episode) + ": reset record has " + std::to_string(ep.initial_positions.size()) +
                    " agents, config has " + std::to_string(state.agents.size()));
    }
    for (std::size_t i = 0; i < state.agents.size(); ++i) state.agents[i].position = ep.initial_positions[i];
    auto& states = r.states.emplace_back();
    states.push_back(state);
    if (episodes.size() > 1) r.timeline.push_back("# episode " + std::to_string(ep.episode) + " seed " + std::to_string(ep.seed));
    for (const auto& s : ep.steps) {
      const int t = state.t;
      const StepEvents ev = scenario.step(state, s.actions);
      states.push_back(state);
      for (std::size_t i = 0; i < state.agents.size() && i < s.positions.size(); ++i) {
        r.max_position_error = std::max(r.max_position_error, distance(state.agents[i].position, s.positions[i]));
      }
      std::vector<BodyPair> onsets;
      for (const auto& c : ev.contacts) {
        if (c.onset) onsets.emplace_back(c.body_a, c.body_b);
      }
      if (t != s.t || ev.picks != s.picks || ev.places != s.places || onsets != s.contacts) r.events_match = false;
      for (const auto& p : ev.picks) {
        r.timeline.push_back("t=" + std::to_string(t) + " agent " + std::to_string(p.agent) + " picks machine " + std::to_string(p.machine));
      }
      for (int a : ev.places) r.timeline.push_back("t=" + std::to_string(t) + " agent " + std::to_string(a) + " places part");
      for (const auto& [a, b] : onsets) {
        r.timeline.push_back("t=" + std::to_string(t) + " collision " + body_label(idx, a) + " with " + body_label(idx, b));
      }
    }
  }
  return r;
}

// Writes a binary PPM of the scene (walls grey, blockers dark, machines blue
// when empty and green when a part is ready, storage yellow, agents red or
// orange when carrying).
inline void write_frame_ppm(const std::filesystem::path& path, const TendingScenario& scenario, const ScenarioState& state,
                            int pixels = 256) {
  const auto& layout = scenario.layout();
  const double t = layout.wall_thickness;
  const Vec2 lo = layout.world_min - Vec2{t, t};
  const Vec2 hi = layout.world_max + Vec2{t, t};
  std::vector<unsigned char> img(static_cast<std::size_t>(pixels) * pixels * 3, 255);
  auto paint = [&](auto inside, std::array<unsigned char, 3> rgb) {
    for (int py = 0; py < pixels; ++py) {
      for (int px = 0; px < pixels; ++px) {
        const Vec2 p{lo.x + (px + 0.5) * (hi.x - lo.x) / pixels, hi.y - (py + 0.5) * (hi.y - lo.y) / pixels};
        if (!inside(p)) continue;
        const std::size_t k = (static_cast<std::size_t>(py) * pixels + px) * 3;
        img[k] = rgb[0];
        img[k + 1] = rgb[1];
        img[k + 2] = rgb[2];
      }
    }
  };
  auto in_box = [](const Box& b) {
    return [b](Vec2 p) { return std::abs(p.x - b.center.x) <= b.half_extents.x && std::abs(p.y - b.center.y) <= b.half_extents.y; };
  };
  for (const auto& w : layout.walls()) paint(in_box(w), {128, 128, 128});
  for (const auto& b : layout.blockers) paint(in_box(b), {60, 60, 60});
  paint(in_box(layout.storage.body), {230, 200, 40});
  for (int m = 0; m < layout.num_machines(); ++m) {
    const bool ready = state.machines[m].ready;
    paint(in_box(layout.machines[m].body), ready ? std::array<unsigned char, 3>{40, 170, 60} : std::array<unsigned char, 3>{50, 80, 200});
  }
  for (int i = 0; i < layout.num_agents(); ++i) {
    const Vec2 c = state.agents[i].position;
    const double rad = layout.agent_radius;
    paint([&](Vec2 p) { return distance(p, c) <= rad; },
          state.tasks[i].has_part ? std::array<unsigned char, 3>{240, 140, 20} : std::array<unsigned char, 3>{210, 40, 40});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write frame " + path.string());
  out << "P6\n" << pixels << ' ' << pixels << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

}  // namespace mtend
