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

// Actor and critic networks. Actors see one agent's observation; critics see
// every agent's observation of the same environment step.
//
// Row layout for sequence inputs is time-major: the rows of step l occupy
// [l*R, (l+1)*R), and inside a step each environment contributes N
// consecutive rows (one per agent, ascending index).

#include <cmath>
#include <string>
#include <vector>

#include "mtend/nn/autodiff.hpp"
#include "mtend/nn/layers.hpp"
#include "mtend/world.hpp"

namespace mtend::rl {

using nn::Matrix;
using nn::Tape;
using nn::Var;

struct NetworkConfig {
  int hidden = 64;
  int embed = 64;     // e_i width
  int heads = 3;
  int head_dim = 64;  // per-head projection width; heads are concatenated then mapped back to `embed`
  bool critic_concat_all = false;  // append every agent's observation after M_out instead of the agent's own

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

enum class CriticVariant { kPlain, kAttention };

inline const char* to_string(CriticVariant v) { return v == CriticVariant::kPlain ? "plain" : "attention"; }

template <typename S>
struct SequenceOutput {
  Var<S> out;     // [L*R x width]
  Var<S> hidden;  // [R x H] after the last step
};

// FC -> Norm -> tanh, twice, then a GRU over time, Norm, output FC.
template <typename S>
struct RecurrentTrunk {
  nn::Linear<S> fc1, fc2;
  nn::LayerNorm<S> ln1, ln2, ln_out;
  nn::GRUCell<S> gru;
  nn::Linear<S> head;

  RecurrentTrunk() = default;
  RecurrentTrunk(const std::string& prefix, int in, int hidden, int out)
      : fc1(prefix + "/fc1", in, hidden),
        fc2(prefix + "/fc2", hidden, hidden),
        ln1(prefix + "/ln1", hidden),
        ln2(prefix + "/ln2", hidden),
        ln_out(prefix + "/ln_out", hidden),
        gru(prefix + "/gru", hidden, hidden),
        head(prefix + "/head", hidden, out) {}

  void init(double head_gain, Rng& rng) {
    fc1.init(std::sqrt(2.0), rng);
    fc2.init(std::sqrt(2.0), rng);
    gru.init(rng);
    head.init(head_gain, rng);
  }

  SequenceOutput<S> forward(Tape<S>& tape, Var<S> x, Var<S> h0, int steps) {
    const Eigen::Index rows = h0.rows();
    if (steps <= 0 || x.rows() != rows * steps) {
      throw ShapeError(fc1.weight.name + ": " + std::to_string(x.rows()) + " input rows for " + std::to_string(steps) +
                       " steps of " + std::to_string(rows) + " rows");
    }
    Var<S> feat = tanh(ln1(tape, fc1(tape, x)));
    feat = tanh(ln2(tape, fc2(tape, feat)));
    Var<S> h = h0;
    std::vector<Var<S>> outs;
    outs.reserve(steps);
    for (int l = 0; l < steps; ++l) {
      h = gru(tape, steps == 1 ? feat : slice_rows(feat, l * rows, rows), h);
      outs.push_back(h);
    }
    Var<S> seq = steps == 1 ? outs[0] : concat_rows(outs);
    return {head(tape, ln_out(tape, seq)), h};
  }

  void collect(nn::ParamList<S>& p) {
    fc1.collect(p);
    ln1.collect(p);
    fc2.collect(p);
    ln2.collect(p);
    gru.collect(p);
    ln_out.collect(p);
    head.collect(p);
  }
};

template <typename S>
struct ActorNetwork {
  int obs_dim = 0;
  int hidden = 0;
  RecurrentTrunk<S> trunk;

  ActorNetwork(int observation_dim, const NetworkConfig& cfg)
      : obs_dim(observation_dim), hidden(cfg.hidden), trunk("actor", observation_dim, cfg.hidden, kNumActions) {}

  void init(Rng& rng) { trunk.init(0.01, rng); }

  // logits: [L*R x 5]
  SequenceOutput<S> forward(Tape<S>& tape, Var<S> obs, Var<S> h0, int steps) {
    if (obs.cols() != obs_dim) {
      throw ShapeError("actor expects observations of width " + std::to_string(obs_dim) + ", got " + std::to_string(obs.cols()));
    }
    return trunk.forward(tape, obs, h0, steps);
  }

  nn::ParamList<S> parameters() {
    nn::ParamList<S> p;
    trunk.collect(p);
    return p;
  }
};

// Plain: concat(own observation, all agents' observations) -> trunk.
// Attention: e_i = W_e o_i + b_e; q,k,v = W_{q,k,v} e_i; M_out = MHA(Q, K, V);
// flatten(M_out over the N agents) concatenated with the observation(s) -> trunk.
template <typename S>
struct CriticNetwork {
  CriticVariant variant = CriticVariant::kAttention;
  int obs_dim = 0;
  int num_agents = 0;
  int hidden = 0;
  bool concat_all = false;
  nn::Linear<S> encoder;
  nn::Linear<S> wq, wk, wv;
  nn::MultiHeadAttention<S> mha;
  RecurrentTrunk<S> trunk;

  CriticNetwork(CriticVariant v, int observation_dim, int agents, const NetworkConfig& cfg)
      : variant(v), obs_dim(observation_dim), num_agents(agents), hidden(cfg.hidden), concat_all(cfg.critic_concat_all) {
    int in = 0;
    if (variant == CriticVariant::kAttention) {
      encoder = nn::Linear<S>("critic/encoder", obs_dim, cfg.embed);
      wq = nn::Linear<S>("critic/w_q", cfg.embed, cfg.embed, false);
      wk = nn::Linear<S>("critic/w_k", cfg.embed, cfg.embed, false);
      wv = nn::Linear<S>("critic/w_v", cfg.embed, cfg.embed, false);
      mha = nn::MultiHeadAttention<S>("critic/mha", cfg.embed, cfg.heads, cfg.head_dim);
      in = agents * cfg.embed + (concat_all ? agents * obs_dim : obs_dim);
    } else {
      in = obs_dim + agents * obs_dim;
    }
    trunk = RecurrentTrunk<S>("critic", in, cfg.hidden, 1);
  }

  void init(Rng& rng) {
    if (variant == CriticVariant::kAttention) {
      encoder.init(1.0, rng);
      wq.init(1.0, rng);
      wk.init(1.0, rng);
      wv.init(1.0, rng);
      mha.init(rng);
    }
    trunk.init(1.0, rng);
  }

  // M_out for every row; rows grouped N per environment step.
  Var<S> attention_output(Tape<S>& tape, Var<S> obs, std::vector<Matrix<S>>* weights = nullptr) {
    Var<S> e = encoder(tape, obs);
    return mha(tape, wq(tape, e), wk(tape, e), wv(tape, e), num_agents, weights);
  }

  Var<S> features(Tape<S>& tape, Var<S> obs) {
    if (obs.cols() != obs_dim) {
      throw ShapeError("critic expects observations of width " + std::to_string(obs_dim) + ", got " + std::to_string(obs.cols()));
    }
    if (obs.rows() % num_agents != 0) {
      throw ShapeError("critic needs all " + std::to_string(num_agents) + " agents per step; got " + std::to_string(obs.rows()) + " rows");
    }
    auto all_obs = [&] { return repeat_rows(group_rows(obs, num_agents), num_agents); };
    if (variant == CriticVariant::kPlain) return nn::concat_cols<S>({obs, all_obs()});
    const Var<S> flat = repeat_rows(group_rows(attention_output(tape, obs), num_agents), num_agents);
    return nn::concat_cols<S>({flat, concat_all ? all_obs() : obs});
  }

  // values: [L*R x 1]
  SequenceOutput<S> forward(Tape<S>& tape, Var<S> obs, Var<S> h0, int steps) {
    return trunk.forward(tape, features(tape, obs), h0, steps);
  }

  nn::ParamList<S> parameters() {
    nn::ParamList<S> p;
    if (variant == CriticVariant::kAttention) {
      encoder.collect(p);
      wq.collect(p);
      wk.collect(p);
      wv.collect(p);
      mha.collect(p);
    }
    trunk.collect(p);
    return p;
  }
};

}  // namespace mtend::rl
