// Copyright 2026 The mpst Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MPST_RUNTIME_H_
#define MPST_RUNTIME_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mpst/interaction.h"
#include "mpst/session_type.h"

namespace mpst {

// Pending messages, one FIFO queue per (sender, receiver) pair. Queues of
// different pairs are unordered with respect to each other.
struct Buffer {
  std::map<std::pair<Role, Role>, std::vector<MessageType>> queues;

  size_t size() const;
  bool empty() const { return size() == 0; }
  auto operator<=>(const Buffer&) const = default;
  bool operator==(const Buffer&) const = default;
};

// Canonical representative: empty queues removed.
Buffer BufferNormalize(const Buffer& b);

struct Config {
  Buffer buffer;
  // Normalized types.
  SessionEnv env;

  bool operator==(const Config& other) const = default;
};

// The configuration with an empty buffer and the normalized environment.
Config InitialConfig(const SessionEnv& d);
// Every role has terminated and no message is pending.
bool IsSuccess(const Config& c);
std::string ToString(const Config& c);

struct Transition {
  // Inputs are labelled with the interaction they complete; outputs are
  // silent.
  std::optional<Interaction> label;
  Config next;
};

// Successors of `c`. With a positive `buf_bound`, outputs onto a queue
// already holding that many messages are disabled.
std::vector<Transition> Step(const Config& c, int buf_bound = 0);

inline constexpr int kDefaultBufBound = 4;
inline constexpr int kDefaultDepthBound = 10000;

struct LivenessVerdict {
  enum class Tag { kLive, kNotLive, kUnknown };

  Tag tag = Tag::kLive;
  // For kNotLive: a run from the initial configuration to a configuration
  // from which success is unreachable. `labels[i]` leads from `path[i]`
  // to `path[i + 1]`.
  std::vector<Config> path;
  std::vector<std::optional<Interaction>> labels;
  // Number of configurations whose successors were computed.
  size_t explored = 0;
  // For kUnknown: the exploration stopped at `depth_bound` configurations.
  bool bound_hit = false;
};

std::string ToString(LivenessVerdict::Tag tag);

// Explores at most `depth_bound` configurations breadth first.
LivenessVerdict IsLive(const SessionEnv& d, int buf_bound = kDefaultBufBound,
                       int depth_bound = kDefaultDepthBound);

// Input labels of the runs from the initial configuration to success with
// at most `max_len` inputs. Empty when the environment is not live.
std::set<Trace> SessionTraces(const SessionEnv& d, int max_len,
                              int buf_bound = kDefaultBufBound,
                              int depth_bound = kDefaultDepthBound);

}  // namespace mpst

#endif  // MPST_RUNTIME_H_
