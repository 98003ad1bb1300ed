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

// Checkpoint container. Little-endian throughout:
//
//   magic    8 bytes  "MTNDCKPT"
//   version  u32      kCheckpointVersion
//   count    u32      number of entries
//   entry*   { u32 name_len; name bytes; u32 ndim; u64 dims[ndim]; f64 values[prod(dims)] }
//
// Values are stored row-major.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "mtend/errors.hpp"
#include "mtend/nn/layers.hpp"

namespace mtend::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr char kCheckpointMagic[8] = {'M', 'T', 'N', 'D', 'C', 'K', 'P', 'T'};

struct CheckpointEntry {
  std::string name;
  std::vector<std::uint64_t> shape;
  std::vector<double> values;

  std::uint64_t numel() const {
    std::uint64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }
};

using Checkpoint = std::vector<CheckpointEntry>;

namespace detail {

template <typename T>
void put_le(std::ostream& os, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U u = std::bit_cast<U>(v);
  unsigned char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(buf), sizeof(U));
}

template <typename T>
T get_le(std::istream& is, const std::string& what) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  unsigned char buf[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(U))) throw IoError("checkpoint truncated while reading " + what);
  U u = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) u |= static_cast<U>(buf[i]) << (8 * i);
  return std::bit_cast<T>(u);
}

}  // namespace detail

inline void write_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::put_le<std::uint32_t>(os, kCheckpointVersion);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.size()));
  for (const auto& e : ckpt) {
    if (e.numel() != e.values.size()) throw UsageError("checkpoint entry " + e.name + " has inconsistent shape");
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(e.name.size()));
    os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(e.shape.size()));
    for (auto d : e.shape) detail::put_le<std::uint64_t>(os, d);
    for (double v : e.values) detail::put_le<double>(os, v);
  }
}

inline Checkpoint read_checkpoint(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0) throw IoError("not a checkpoint file (bad magic)");
  const auto version = detail::get_le<std::uint32_t>(is, "version");
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                  std::to_string(kCheckpointVersion) + ")");
  }
  const auto count = detail::get_le<std::uint32_t>(is, "entry count");
  Checkpoint ckpt;
  ckpt.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    const auto len = detail::get_le<std::uint32_t>(is, "name length");
    if (len > (1u << 16)) throw IoError("checkpoint entry name too long");
    e.name.resize(len);
    if (!is.read(e.name.data(), len)) throw IoError("checkpoint truncated in entry name");
    const auto ndim = detail::get_le<std::uint32_t>(is, e.name + " ndim");
    if (ndim > 8) throw IoError("checkpoint entry " + e.name + " has too many dimensions");
    for (std::uint32_t d = 0; d < ndim; ++d) e.shape.push_back(detail::get_le<std::uint64_t>(is, e.name + " shape"));
    const auto n = e.numel();
    if (n > (1ull << 32)) throw IoError("checkpoint entry " + e.name + " is implausibly large");
    e.values.resize(n);
    for (auto& v : e.values) v = detail::get_le<double>(is, e.name + " values");
    ckpt.push_back(std::move(e));
  }
  return ckpt;
}

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_checkpoint(os, ckpt);
  if (!os) throw IoError("failed writing " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path.string());
  return read_checkpoint(is);
}

template <typename S>
CheckpointEntry to_entry(const std::string& name, const Matrix<S>& m) {
  CheckpointEntry e{name, {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())}, {}};
  e.values.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) e.values.push_back(static_cast<double>(m(r, c)));
  return e;
}

inline CheckpointEntry scalar_entry(const std::string& name, double v) { return {name, {1}, {v}}; }

inline const CheckpointEntry* find_entry(const Checkpoint& ckpt, const std::string& name) {
  for (const auto& e : ckpt) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

inline double read_scalar(const Checkpoint& ckpt, const std::string& name) {
  const auto* e = find_entry(ckpt, name);
  if (e == nullptr || e->values.size() != 1) throw IoError("checkpoint is missing scalar entry " + name);
  return e->values[0];
}

inline std::string shape_of(const std::vector<std::uint64_t>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
  return out + "]";
}

// Copies matrix `name` into `m`, which must already have the matching shape.
template <typename S>
void load_matrix(const Checkpoint& ckpt, const std::string& name, Matrix<S>& m) {
  const auto* e = find_entry(ckpt, name);
  if (e == nullptr) throw ShapeError("checkpoint has no entry '" + name + "'");
  const std::vector<std::uint64_t> want{static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  if (e->shape != want) {
    throw ShapeError("entry '" + name + "': checkpoint shape " + shape_of(e->shape) + " vs model shape " + shape_of(want));
  }
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = static_cast<S>(e->values[k++]);
}

template <typename S>
void append_parameters(Checkpoint& ckpt, const ParamList<S>& params) {
  for (const auto* p : params) ckpt.push_back(to_entry(p->name, p->value));
}

template <typename S>
void load_parameters(const Checkpoint& ckpt, const ParamList<S>& params) {
  for (auto* p : params) load_matrix(ckpt, p->name, p->value);
}

}  // namespace mtend::nn
