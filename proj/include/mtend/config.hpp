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

// Experiment configuration: YAML loading with defaults, unknown-key
// rejection and full validation, plus serialization that loads back equal.

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mtend/errors.hpp"
#include "mtend/layout.hpp"
#include "mtend/observation.hpp"
#include "mtend/reward.hpp"
#include "mtend/rl/networks.hpp"
#include "mtend/rl/trainer.hpp"
#include "mtend/scenario.hpp"

namespace mtend {

struct ExperimentConfig {
  std::string name = "default";
  ScenarioConfig scenario{};
  ObservationConfig observation{};
  RewardConfig reward{};
  rl::TrainConfig train{};
  rl::NetworkConfig network{};
  rl::CriticVariant critic = rl::CriticVariant::kAttention;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  int eval_window = 100;
  int eval_episodes = 100;
  long checkpoint_interval = 500;  // episodes; 0 disables intermediate checkpoints
  std::string output_dir = "runs";

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.name == b.name && a.scenario.layout == b.scenario.layout && a.scenario.rules == b.scenario.rules &&
           physics_equal(a.scenario.physics, b.scenario.physics) && a.observation == b.observation && a.reward == b.reward &&
           a.train == b.train && network_equal(a.network, b.network) && a.critic == b.critic && a.seeds == b.seeds &&
           a.eval_window == b.eval_window && a.eval_episodes == b.eval_episodes &&
           a.checkpoint_interval == b.checkpoint_interval && a.output_dir == b.output_dir;
  }

 private:
  static bool physics_equal(const PhysicsParams& a, const PhysicsParams& b) {
    return a.dt == b.dt && a.damping == b.damping && a.force_gain == b.force_gain && a.max_speed == b.max_speed &&
           a.contact_margin == b.contact_margin && a.max_resolve_iterations == b.max_resolve_iterations;
  }
  static bool network_equal(const rl::NetworkConfig& a, const rl::NetworkConfig& b) {
    return a.hidden == b.hidden && a.embed == b.embed && a.heads == b.heads && a.head_dim == b.head_dim &&
           a.critic_concat_all == b.critic_concat_all;
  }
};

namespace detail {

inline std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.is_null()) return "";
  return " (line " + std::to_string(m.line + 1) + ")";
}

// Reads typed fields out of YAML mappings, collecting every problem instead
// of stopping at the first.
class ConfigReader {
 public:
  std::vector<std::string> errors;

  // Rejects keys outside `allowed`; returns false if `node` is not a map.
  bool check_map(const YAML::Node& node, const std::string& section, std::initializer_list<const char*> allowed) {
    if (!node.IsMap()) {
      errors.push_back("section '" + section + "' must be a mapping" + where(node));
      return false;
    }
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) errors.push_back("unknown key '" + key + "' in section '" + section + "'" + where(kv.first));
    }
    return true;
  }

  template <typename T>
  void get(const YAML::Node& map, const char* key, const std::string& section, T& out) {
    const YAML::Node n = map[key];
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      errors.push_back("key '" + section + "." + key + "' has the wrong type" + where(n));
    }
  }

  void get_vec(const YAML::Node& map, const char* key, const std::string& section, Vec2& out) {
    const YAML::Node n = map[key];
    if (!n) return;
    read_vec(n, section + "." + key, out);
  }

  void read_vec(const YAML::Node& n, const std::string& what, Vec2& out) {
    if (!n.IsSequence() || n.size() != 2) {
      errors.push_back("'" + what + "' must be a 2-element list" + where(n));
      return;
    }
    try {
      out = {n[0].as<double>(), n[1].as<double>()};
    } catch (const YAML::Exception&) {
      errors.push_back("'" + what + "' must contain numbers" + where(n));
    }
  }

  void read_box(const YAML::Node& n, const std::string& what, Box& out, Vec2* anchor) {
    if (anchor) {
      if (!check_map(n, what, {"center", "half_extents", "anchor"})) return;
    } else if (!check_map(n, what, {"center", "half_extents"})) {
      return;
    }
    for (const char* k : {"center", "half_extents"}) {
      if (!n[k]) errors.push_back("'" + what + "' is missing '" + k + "'" + where(n));
    }
    get_vec(n, "center", what, out.center);
    get_vec(n, "half_extents", what, out.half_extents);
    if (anchor) {
      if (!n["anchor"]) errors.push_back("'" + what + "' is missing 'anchor'" + where(n));
      get_vec(n, "anchor", what, *anchor);
    }
  }

  template <typename E>
  void get_enum(const YAML::Node& map, const char* key, const std::string& section,
                std::initializer_list<std::pair<const char*, E>> names, E& out) {
    std::string s;
    const YAML::Node n = map[key];
    if (!n) return;
    get(map, key, section, s);
    for (const auto& [name, value] : names) {
      if (s == name) {
        out = value;
        return;
      }
    }
    std::string opts;
    for (const auto& [name, value] : names) opts += (opts.empty() ? "" : ", ") + std::string(name);
    errors.push_back("key '" + section + "." + key + "' must be one of: " + opts + where(n));
  }
};

inline void read_layout(ConfigReader& r, const YAML::Node& n, LayoutSpec& l) {
  if (!r.check_map(n, "layout", {"world_min", "world_max", "agent_radius", "agent_mass", "wall_thickness", "spawn_jitter",
                                 "spawns", "machines", "blockers", "storage"})) {
    return;
  }
  r.get_vec(n, "world_min", "layout", l.world_min);
  r.get_vec(n, "world_max", "layout", l.world_max);
  r.get(n, "agent_radius", "layout", l.agent_radius);
  r.get(n, "agent_mass", "layout", l.agent_mass);
  r.get(n, "wall_thickness", "layout", l.wall_thickness);
  r.get(n, "spawn_jitter", "layout", l.spawn_jitter);
  if (const auto s = n["spawns"]) {
    l.spawns.clear();
    if (!s.IsSequence()) {
      r.errors.push_back("'layout.spawns' must be a list" + where(s));
    } else {
      for (std::size_t i = 0; i < s.size(); ++i) r.read_vec(s[i], "layout.spawns[" + std::to_string(i) + "]", l.spawns.emplace_back());
    }
  }
  if (const auto s = n["machines"]) {
    l.machines.clear();
    if (!s.IsSequence()) {
      r.errors.push_back("'layout.machines' must be a list" + where(s));
    } else {
      for (std::size_t i = 0; i < s.size(); ++i) {
        auto& m = l.machines.emplace_back();
        r.read_box(s[i], "layout.machines[" + std::to_string(i) + "]", m.body, &m.anchor);
      }
    }
  }
  if (const auto s = n["blockers"]) {
    l.blockers.clear();
    if (!s.IsSequence()) {
      r.errors.push_back("'layout.blockers' must be a list" + where(s));
    } else {
      for (std::size_t i = 0; i < s.size(); ++i) r.read_box(s[i], "layout.blockers[" + std::to_string(i) + "]", l.blockers.emplace_back(), nullptr);
    }
  }
  if (const auto s = n["storage"]) r.read_box(s, "layout.storage", l.storage.body, &l.storage.anchor);
}

inline YAML::Node vec_node(Vec2 v) {
  YAML::Node n;
  n.SetStyle(YAML::EmitterStyle::Flow);
  n.push_back(v.x);
  n.push_back(v.y);
  return n;
}

inline YAML::Node box_node(const Box& b) {
  YAML::Node n;
  n["center"] = vec_node(b.center);
  n["half_extents"] = vec_node(b.half_extents);
  return n;
}

}  // namespace detail

inline YAML::Node layout_to_yaml(const LayoutSpec& l) {
  using detail::vec_node;
  YAML::Node n;
  n["world_min"] = vec_node(l.world_min);
  n["world_max"] = vec_node(l.world_max);
  n["agent_radius"] = l.agent_radius;
  n["agent_mass"] = l.agent_mass;
  n["wall_thickness"] = l.wall_thickness;
  n["spawn_jitter"] = l.spawn_jitter;
  for (const auto& s : l.spawns) n["spawns"].push_back(vec_node(s));
  for (const auto& m : l.machines) {
    YAML::Node b = detail::box_node(m.body);
    b["anchor"] = vec_node(m.anchor);
    n["machines"].push_back(b);
  }
  n["blockers"] = YAML::Node(YAML::NodeType::Sequence);
  for (const auto& b : l.blockers) n["blockers"].push_back(detail::box_node(b));
  YAML::Node s = detail::box_node(l.storage.body);
  s["anchor"] = vec_node(l.storage.anchor);
  n["storage"] = s;
  return n;
}

inline LayoutSpec load_layout_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read layout file " + path.string());
  YAML::Node root;
  try {
    root = YAML::Load(in);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path.string() + ": parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  detail::ConfigReader r;
  LayoutSpec l = default_layout();
  detail::read_layout(r, root, l);
  if (!r.errors.empty()) {
    std::string msg;
    for (const auto& e : r.errors) msg += "\n  " + e;
    throw ConfigError(path.string() + ": invalid layout:" + msg);
  }
  return l;
}

// Parses a config document. Relative layout file references resolve against
// `base_dir`. Throws ConfigError listing every problem found.
inline ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".",
                                     const std::string& origin = "<config>") {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ": parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  ExperimentConfig c;
  detail::ConfigReader r;
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (r.check_map(root, "<root>", {"name", "layout", "scenario", "physics", "observation", "reward", "train", "network", "critic",
                                   "seeds", "episodes", "eval_window", "eval_episodes", "checkpoint_interval", "output_dir"})) {
    r.get(root, "name", "<root>", c.name);
    if (const auto n = root["layout"]) {
      if (n.IsScalar()) {
        const auto ref = n.as<std::string>();
        if (ref != "default") {
          const auto path = std::filesystem::path(ref).is_absolute() ? std::filesystem::path(ref) : base_dir / ref;
          if (!std::filesystem::exists(path)) {
            r.errors.push_back("layout file '" + ref + "' does not exist" + detail::where(n));
          } else {
            try {
              c.scenario.layout = load_layout_file(path);
            } catch (const Error& e) {
              r.errors.push_back(e.what());
            }
          }
        }
      } else {
        detail::read_layout(r, n, c.scenario.layout);
      }
    }
    if (const auto n = root["scenario"]; n && r.check_map(n, "scenario", {"episode_length", "production_delay", "pick_margin", "place_margin"})) {
      r.get(n, "episode_length", "scenario", c.scenario.rules.episode_length);
      r.get(n, "production_delay", "scenario", c.scenario.rules.production_delay);
      r.get(n, "pick_margin", "scenario", c.scenario.rules.pick_margin);
      r.get(n, "place_margin", "scenario", c.scenario.rules.place_margin);
    }
    if (const auto n = root["physics"];
        n && r.check_map(n, "physics", {"dt", "damping", "force_gain", "max_speed", "contact_margin", "max_resolve_iterations"})) {
      auto& p = c.scenario.physics;
      r.get(n, "dt", "physics", p.dt);
      r.get(n, "damping", "physics", p.damping);
      r.get(n, "force_gain", "physics", p.force_gain);
      r.get(n, "max_speed", "physics", p.max_speed);
      r.get(n, "contact_margin", "physics", p.contact_margin);
      r.get(n, "max_resolve_iterations", "physics", p.max_resolve_iterations);
    }
    if (const auto n = root["observation"]; n && r.check_map(n, "observation", {"include_velocities", "include_time_since_ready", "normalize",
                                                                               "representation", "include_blockers", "include_walls"})) {
      auto& o = c.observation;
      r.get(n, "include_velocities", "observation", o.include_velocities);
      r.get(n, "include_time_since_ready", "observation", o.include_time_since_ready);
      r.get(n, "normalize", "observation", o.normalize);
      r.get_enum(n, "representation", "observation",
                 {{"center", EntityRepresentation::kCenter}, {"two_corners", EntityRepresentation::kTwoCorners}}, o.representation);
      r.get(n, "include_blockers", "observation", o.include_blockers);
      r.get(n, "include_walls", "observation", o.include_walls);
    }
    if (const auto n = root["reward"];
        n && r.check_map(n, "reward", {"pick", "place", "collision", "progress_scale", "uncollected", "time_penalty", "share_pick_place",
                                       "uncollected_mode", "enable_time_penalty", "enable_distance_shaping", "enable_uncollected_penalty",
                                       "collision_on_onset"})) {
      auto& w = c.reward;
      r.get(n, "pick", "reward", w.pick);
      r.get(n, "place", "reward", w.place);
      r.get(n, "collision", "reward", w.collision);
      r.get(n, "progress_scale", "reward", w.progress_scale);
      r.get(n, "uncollected", "reward", w.uncollected);
      r.get(n, "time_penalty", "reward", w.time_penalty);
      r.get(n, "share_pick_place", "reward", w.share_pick_place);
      r.get_enum(n, "uncollected_mode", "reward", {{"fixed", UncollectedMode::kFixed}, {"increasing", UncollectedMode::kIncreasing}},
                 w.uncollected_mode);
      r.get(n, "enable_time_penalty", "reward", w.enable_time_penalty);
      r.get(n, "enable_distance_shaping", "reward", w.enable_distance_shaping);
      r.get(n, "enable_uncollected_penalty", "reward", w.enable_uncollected_penalty);
      r.get(n, "collision_on_onset", "reward", w.collision_on_onset);
    }
    if (const auto n = root["train"];
        n && r.check_map(n, "train", {"gamma", "gae_lambda", "clip", "ppo_epochs", "minibatches", "chunk_length", "rollout_length",
                                      "learning_rate", "critic_learning_rate", "value_coef", "entropy_coef", "max_grad_norm", "num_envs",
                                      "use_value_norm", "clip_value_loss"})) {
      auto& t = c.train;
      r.get(n, "gamma", "train", t.gamma);
      r.get(n, "gae_lambda", "train", t.gae_lambda);
      r.get(n, "clip", "train", t.clip);
      r.get(n, "ppo_epochs", "train", t.ppo_epochs);
      r.get(n, "minibatches", "train", t.minibatches);
      r.get(n, "chunk_length", "train", t.chunk_length);
      r.get(n, "rollout_length", "train", t.rollout_length);
      r.get(n, "learning_rate", "train", t.learning_rate);
      r.get(n, "critic_learning_rate", "train", t.critic_learning_rate);
      r.get(n, "value_coef", "train", t.value_coef);
      r.get(n, "entropy_coef", "train", t.entropy_coef);
      r.get(n, "max_grad_norm", "train", t.max_grad_norm);
      r.get(n, "num_envs", "train", t.num_envs);
      r.get(n, "use_value_norm", "train", t.use_value_norm);
      r.get(n, "clip_value_loss", "train", t.clip_value_loss);
    }
    if (const auto n = root["network"]; n && r.check_map(n, "network", {"hidden", "embed", "heads", "head_dim", "critic_concat_all"})) {
      r.get(n, "hidden", "network", c.network.hidden);
      r.get(n, "embed", "network", c.network.embed);
      r.get(n, "heads", "network", c.network.heads);
      r.get(n, "head_dim", "network", c.network.head_dim);
      r.get(n, "critic_concat_all", "network", c.network.critic_concat_all);
    }
    r.get_enum(root, "critic", "<root>", {{"attention", rl::CriticVariant::kAttention}, {"plain", rl::CriticVariant::kPlain}}, c.critic);
    if (const auto n = root["seeds"]) {
      if (n.IsScalar()) {
        c.seeds.clear();
        r.get(root, "seeds", "<root>", c.seeds.emplace_back());
      } else {
        r.get(root, "seeds", "<root>", c.seeds);
      }
    }
    r.get(root, "episodes", "<root>", c.train.episodes);
    r.get(root, "eval_window", "<root>", c.eval_window);
    r.get(root, "eval_episodes", "<root>", c.eval_episodes);
    r.get(root, "checkpoint_interval", "<root>", c.checkpoint_interval);
    r.get(root, "output_dir", "<root>", c.output_dir);
  }

  // Semantic validation.
  auto& e = r.errors;
  if (c.seeds.empty()) e.push_back("seeds must be nonempty");
  if (c.eval_window < 1) e.push_back("eval_window must be >= 1");
  if (c.eval_episodes < 1) e.push_back("eval_episodes must be >= 1");
  if (c.checkpoint_interval < 0) e.push_back("checkpoint_interval must be >= 0");
  const auto& rules = c.scenario.rules;
  if (rules.episode_length < 1) e.push_back("scenario.episode_length must be >= 1");
  if (rules.production_delay < 1) e.push_back("scenario.production_delay must be >= 1");
  if (rules.pick_margin < 0 || rules.place_margin < 0) e.push_back("scenario margins must be non-negative");
  const auto& p = c.scenario.physics;
  if (!(p.dt > 0)) e.push_back("physics.dt must be positive");
  if (!(p.damping >= 0 && p.damping < 1)) e.push_back("physics.damping must be in [0, 1)");
  if (!(p.max_speed > 0)) e.push_back("physics.max_speed must be positive");
  if (c.network.hidden < 1 || c.network.embed < 1 || c.network.heads < 1 || c.network.head_dim < 1) {
    e.push_back("network sizes must be >= 1");
  }
  for (const auto& v : layout_violations(c.scenario.layout)) e.push_back("layout: " + v);
  for (const auto& v : reward_config_violations(c.reward)) e.push_back("reward: " + v);
  for (const auto& v : rl::train_config_violations(c.train)) e.push_back("train: " + v);
  if (!e.empty()) {
    std::string msg = origin + ": invalid configuration:";
    for (const auto& s : e) msg += "\n  " + s;
    throw ConfigError(msg);
  }
  return c;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path), path.parent_path(), path.string());
}

// Fully resolved document (layout inline); parse_config(serialize(c)) == c.
inline std::string serialize_config(const ExperimentConfig& c) {
  YAML::Node root;
  root["name"] = c.name;
  root["layout"] = layout_to_yaml(c.scenario.layout);
  auto& rules = c.scenario.rules;
  root["scenario"]["episode_length"] = rules.episode_length;
  root["scenario"]["production_delay"] = rules.production_delay;
  root["scenario"]["pick_margin"] = rules.pick_margin;
  root["scenario"]["place_margin"] = rules.place_margin;
  auto& p = c.scenario.physics;
  root["physics"]["dt"] = p.dt;
  root["physics"]["damping"] = p.damping;
  root["physics"]["force_gain"] = p.force_gain;
  root["physics"]["max_speed"] = p.max_speed;
  root["physics"]["contact_margin"] = p.contact_margin;
  root["physics"]["max_resolve_iterations"] = p.max_resolve_iterations;
  auto& o = c.observation;
  root["observation"]["include_velocities"] = o.include_velocities;
  root["observation"]["include_time_since_ready"] = o.include_time_since_ready;
  root["observation"]["normalize"] = o.normalize;
  root["observation"]["representation"] = o.representation == EntityRepresentation::kCenter ? "center" : "two_corners";
  root["observation"]["include_blockers"] = o.include_blockers;
  root["observation"]["include_walls"] = o.include_walls;
  auto& w = c.reward;
  root["reward"]["pick"] = w.pick;
  root["reward"]["place"] = w.place;
  root["reward"]["collision"] = w.collision;
  root["reward"]["progress_scale"] = w.progress_scale;
  root["reward"]["uncollected"] = w.uncollected;
  root["reward"]["time_penalty"] = w.time_penalty;
  root["reward"]["share_pick_place"] = w.share_pick_place;
  root["reward"]["uncollected_mode"] = w.uncollected_mode == UncollectedMode::kFixed ? "fixed" : "increasing";
  root["reward"]["enable_time_penalty"] = w.enable_time_penalty;
  root["reward"]["enable_distance_shaping"] = w.enable_distance_shaping;
  root["reward"]["enable_uncollected_penalty"] = w.enable_uncollected_penalty;
  root["reward"]["collision_on_onset"] = w.collision_on_onset;
  auto& t = c.train;
  root["train"]["gamma"] = t.gamma;
  root["train"]["gae_lambda"] = t.gae_lambda;
  root["train"]["clip"] = t.clip;
  root["train"]["ppo_epochs"] = t.ppo_epochs;
  root["train"]["minibatches"] = t.minibatches;
  root["train"]["chunk_length"] = t.chunk_length;
  root["train"]["rollout_length"] = t.rollout_length;
  root["train"]["learning_rate"] = t.learning_rate;
  root["train"]["critic_learning_rate"] = t.critic_learning_rate;
  root["train"]["value_coef"] = t.value_coef;
  root["train"]["entropy_coef"] = t.entropy_coef;
  root["train"]["max_grad_norm"] = t.max_grad_norm;
  root["train"]["num_envs"] = t.num_envs;
  root["train"]["use_value_norm"] = t.use_value_norm;
  root["train"]["clip_value_loss"] = t.clip_value_loss;
  root["network"]["hidden"] = c.network.hidden;
  root["network"]["embed"] = c.network.embed;
  root["network"]["heads"] = c.network.heads;
  root["network"]["head_dim"] = c.network.head_dim;
  root["network"]["critic_concat_all"] = c.network.critic_concat_all;
  root["critic"] = rl::to_string(c.critic);
  YAML::Node seeds(YAML::NodeType::Sequence);
  seeds.SetStyle(YAML::EmitterStyle::Flow);
  for (auto s : c.seeds) seeds.push_back(s);
  root["seeds"] = seeds;
  root["episodes"] = t.episodes;
  root["eval_window"] = c.eval_window;
  root["eval_episodes"] = c.eval_episodes;
  root["checkpoint_interval"] = c.checkpoint_interval;
  root["output_dir"] = c.output_dir;
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << root;
  return std::string(out.c_str()) + "\n";
}

// A sweep lists config files (relative to the sweep file) to run in order.
struct SweepSpec {
  std::string name;
  std::vector<std::filesystem::path> configs;
};

inline SweepSpec load_sweep(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::Load(read_text_file(path));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path.string() + ": parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  detail::ConfigReader r;
  SweepSpec s;
  s.name = path.stem().string();
  if (r.check_map(root, "<sweep>", {"name", "configs"})) {
    r.get(root, "name", "<sweep>", s.name);
    const auto list = root["configs"];
    if (!list || !list.IsSequence() || list.size() == 0) {
      r.errors.push_back("'configs' must be a nonempty list of config paths");
    } else {
      for (const auto& item : list) {
        const auto p = path.parent_path() / item.as<std::string>();
        if (!std::filesystem::exists(p)) r.errors.push_back("config '" + item.as<std::string>() + "' does not exist" + detail::where(item));
        s.configs.push_back(p);
      }
    }
  }
  if (!r.errors.empty()) {
    std::string msg = path.string() + ": invalid sweep:";
    for (const auto& e : r.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return s;
}

}  // namespace mtend
