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

#include "mpst/runtime.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <memory>
#include <stdexcept>

#include "mpst/errors.h"
#include "mpst/tracelang.h"
#include "session_graph.h"

namespace mpst {

size_t Buffer::size() const {
  size_t n = 0;
  for (const auto& [pair, q] : queues) n += q.size();
  return n;
}

Buffer BufferNormalize(const Buffer& b) {
  Buffer out;
  for (const auto& [pair, q] : b.queues) {
    if (!q.empty()) out.queues.emplace(pair, q);
  }
  return out;
}

Config InitialConfig(const SessionEnv& d) {
  return Config{Buffer{}, NormalizeSessionEnv(d)};
}

bool IsSuccess(const Config& c) {
  if (!BufferNormalize(c.buffer).empty()) return false;
  return std::all_of(c.env.begin(), c.env.end(), [](const auto& entry) {
    return entry.second.kind() == SessionKind::kEnd;
  });
}

std::string ToString(const Config& c) {
  std::string out = "buffer:";
  Buffer b = BufferNormalize(c.buffer);
  if (b.empty()) out += " <empty>";
  for (const auto& [pair, q] : b.queues) {
    out += " " + pair.first.name + "->" + pair.second.name + "[";
    for (size_t i = 0; i < q.size(); ++i) {
      out += (i ? "," : "") + q[i].name;
    }
    out += "]";
  }
  out += "\n" + PrintSessionEnv(c.env);
  return out;
}

std::vector<Transition> Step(const Config& c, int buf_bound) {
  std::vector<Transition> out;
  for (const auto& [role, type] : c.env) {
    SessionType t = UnfoldTop(type);
    std::vector<SessionType> branches;
    if (t.kind() == SessionKind::kInternal ||
        t.kind() == SessionKind::kExternal) {
      branches = t.branches();
    } else if (t.kind() == SessionKind::kOut || t.kind() == SessionKind::kIn) {
      branches = {t};
    }
    for (const SessionType& b : branches) {
      Config next = c;
      if (b.kind() == SessionKind::kOut) {
        auto& q = next.buffer.queues[{role, b.partner()}];
        if (buf_bound > 0 && static_cast<int>(q.size()) >= buf_bound) {
          continue;
        }
        q.push_back(b.message());
        next.env[role] = NormalizeSessionType(b.cont());
        next.buffer = BufferNormalize(next.buffer);
        out.push_back(Transition{std::nullopt, std::move(next)});
        continue;
      }
      bool ready = true;
      for (const Role& s : b.partners()) {
        auto it = next.buffer.queues.find({s, role});
        if (it == next.buffer.queues.end() || it->second.empty() ||
            it->second.front() != b.message()) {
          ready = false;
          break;
        }
        it->second.erase(it->second.begin());
      }
      if (!ready) continue;
      next.env[role] = NormalizeSessionType(b.cont());
      next.buffer = BufferNormalize(next.buffer);
      Interaction label{b.partners(), role, b.message()};
      out.push_back(Transition{label, std::move(next)});
    }
  }
  return out;
}

std::string ToString(LivenessVerdict::Tag tag) {
  switch (tag) {
    case LivenessVerdict::Tag::kLive:
      return "Live";
    case LivenessVerdict::Tag::kNotLive:
      return "NotLive";
    case LivenessVerdict::Tag::kUnknown:
      return "Unknown";
  }
  return "";
}

namespace {

using internal::Graph;
using internal::HeadKind;

// Configurations over the compiled per-role graphs. A configuration is
// encoded as the node of every role followed by, for every queue, its
// length and its message ids.
class Engine {
 public:
  struct Edge {
    int label;  // -1 for outputs, otherwise an index into labels_.
    int target;
  };

  explicit Engine(const SessionEnv& d, int buf_bound) : buf_bound_(buf_bound) {
    for (const auto& [role, type] : d) {
      roles_.push_back(role);
      graphs_.push_back(internal::CompileClosed(type));
    }
    for (size_t i = 0; i < roles_.size(); ++i) {
      for (const auto& node : graphs_[i].nodes) {
        for (const auto& [prefix, t] : node.edges) {
          for (const Role& s : prefix.partners) {
            if (node.kind == HeadKind::kOut) {
              QueueOf(roles_[i], s);
            } else {
              QueueOf(s, roles_[i]);
            }
          }
          MessageId(prefix.message);
        }
      }
    }
    std::vector<int> initial;
    for (const Graph& g : graphs_) initial.push_back(g.roots[0]);
    initial.resize(roles_.size() + queue_pairs_.size(), 0);
    Intern(std::move(initial));
  }

  int initial() const { return 0; }
  size_t size() const { return configs_.size(); }

  bool IsSuccess(int c) const {
    const std::vector<int>& k = configs_[c];
    for (size_t i = 0; i < roles_.size(); ++i) {
      if (graphs_[i].nodes[k[i]].kind != HeadKind::kEnd) return false;
    }
    return k.size() == roles_.size() + queue_pairs_.size() &&
           std::all_of(k.begin() + roles_.size(), k.end(),
                       [](int x) { return x == 0; });
  }

  const std::vector<Edge>& Successors(int c) {
    if (successors_[c]) return *successors_[c];
    std::vector<Edge> out;
    std::vector<std::vector<int>> queues = Queues(c);
    const std::vector<int> nodes(configs_[c].begin(),
                                 configs_[c].begin() + roles_.size());
    for (size_t i = 0; i < roles_.size(); ++i) {
      const internal::GraphNode& node = graphs_[i].nodes[nodes[i]];
      for (const auto& [prefix, target] : node.edges) {
        int msg = message_index_.at(prefix.message);
        std::vector<std::vector<int>> q = queues;
        if (node.kind == HeadKind::kOut) {
          int k = queue_index_.at({roles_[i], *prefix.partners.begin()});
          if (buf_bound_ > 0 &&
              static_cast<int>(q[k].size()) >= buf_bound_) {
            continue;
          }
          q[k].push_back(msg);
          std::vector<int> n = nodes;
          n[i] = target;
          out.push_back(Edge{-1, Intern(Encode(n, q))});
          continue;
        }
        bool ready = true;
        for (const Role& s : prefix.partners) {
          int k = queue_index_.at({s, roles_[i]});
          if (q[k].empty() || q[k].front() != msg) {
            ready = false;
            break;
          }
          q[k].erase(q[k].begin());
        }
        if (!ready) continue;
        std::vector<int> n = nodes;
        n[i] = target;
        out.push_back(
            Edge{LabelId(Interaction{prefix.partners, roles_[i],
                                     prefix.message}),
                 Intern(Encode(n, q))});
      }
    }
    successors_[c] = std::make_unique<std::vector<Edge>>(std::move(out));
    return *successors_[c];
  }

  const Interaction& label(int id) const { return labels_[id]; }

  Config ToConfig(int c) const {
    Config out;
    for (size_t i = 0; i < roles_.size(); ++i) {
      out.env[roles_[i]] = internal::ReadBack(graphs_[i], configs_[c][i]);
    }
    std::vector<std::vector<int>> queues = Queues(c);
    for (size_t k = 0; k < queues.size(); ++k) {
      if (queues[k].empty()) continue;
      auto& q = out.buffer.queues[queue_pairs_[k]];
      for (int m : queues[k]) q.push_back(messages_[m]);
    }
    return out;
  }

 private:
  int QueueOf(const Role& from, const Role& to) {
    auto [it, added] = queue_index_.emplace(
        std::make_pair(from, to), static_cast<int>(queue_pairs_.size()));
    if (added) queue_pairs_.push_back({from, to});
    return it->second;
  }

  int MessageId(const MessageType& m) {
    auto [it, added] =
        message_index_.emplace(m, static_cast<int>(messages_.size()));
    if (added) messages_.push_back(m);
    return it->second;
  }

  int LabelId(const Interaction& x) {
    auto [it, added] =
        label_index_.emplace(x, static_cast<int>(labels_.size()));
    if (added) labels_.push_back(x);
    return it->second;
  }

  std::vector<std::vector<int>> Queues(int c) const {
    const std::vector<int>& k = configs_[c];
    std::vector<std::vector<int>> out(queue_pairs_.size());
    size_t pos = roles_.size();
    for (auto& q : out) {
      int len = k[pos++];
      q.assign(k.begin() + pos, k.begin() + pos + len);
      pos += len;
    }
    return out;
  }

  std::vector<int> Encode(const std::vector<int>& nodes,
                          const std::vector<std::vector<int>>& queues) const {
    std::vector<int> k = nodes;
    for (const auto& q : queues) {
      k.push_back(static_cast<int>(q.size()));
      k.insert(k.end(), q.begin(), q.end());
    }
    return k;
  }

  int Intern(std::vector<int> key) {
    auto [it, added] =
        index_.emplace(std::move(key), static_cast<int>(configs_.size()));
    if (added) {
      configs_.push_back(it->first);
      successors_.emplace_back();
    }
    return it->second;
  }

  int buf_bound_;
  std::vector<Role> roles_;
  std::vector<Graph> graphs_;
  std::map<std::pair<Role, Role>, int> queue_index_;
  std::vector<std::pair<Role, Role>> queue_pairs_;
  std::map<MessageType, int> message_index_;
  std::vector<MessageType> messages_;
  std::map<Interaction, int> label_index_;
  std::vector<Interaction> labels_;
  std::map<std::vector<int>, int> index_;
  std::vector<std::vector<int>> configs_;
  std::vector<std::unique_ptr<std::vector<Edge>>> successors_;
};

std::unique_ptr<Engine> MakeEngine(const SessionEnv& d, int buf_bound) {
  try {
    return std::make_unique<Engine>(d, buf_bound);
  } catch (const internal::EvalError& e) {
    if (e.kind == internal::EvalError::kUnguarded) {
      throw UnguardedRecursionError(e.detail);
    }
    throw NotSessionTypeError(e.detail);
  }
}

void CheckBounds(int buf_bound, int depth_bound) {
  if (buf_bound < 1 || depth_bound < 1) {
    throw std::invalid_argument("bounds must be positive");
  }
}

LivenessVerdict Analyse(Engine& engine, int depth_bound) {
  LivenessVerdict verdict;
  std::vector<int> order{engine.initial()};
  std::vector<int> parent{-1};
  std::vector<int> via{-1};
  std::map<int, size_t> position{{engine.initial(), 0}};
  size_t next = 0;
  while (next < order.size() &&
         next < static_cast<size_t>(depth_bound)) {
    int c = order[next++];
    for (const auto& e : engine.Successors(c)) {
      if (position.emplace(e.target, order.size()).second) {
        order.push_back(e.target);
        parent.push_back(c);
        via.push_back(e.label);
      }
    }
  }
  verdict.explored = next;
  bool truncated = next < order.size();

  // Configurations that can reach success or an unexplored configuration.
  std::vector<std::vector<size_t>> reverse(order.size());
  for (size_t i = 0; i < next; ++i) {
    for (const auto& e : engine.Successors(order[i])) {
      reverse[position.at(e.target)].push_back(i);
    }
  }
  std::vector<char> good(order.size(), 0);
  std::vector<size_t> stack;
  for (size_t i = 0; i < order.size(); ++i) {
    if (i >= next || engine.IsSuccess(order[i])) {
      good[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    size_t i = stack.back();
    stack.pop_back();
    for (size_t j : reverse[i]) {
      if (!good[j]) {
        good[j] = 1;
        stack.push_back(j);
      }
    }
  }
  for (size_t i = 0; i < next; ++i) {
    if (good[i]) continue;
    verdict.tag = LivenessVerdict::Tag::kNotLive;
    std::vector<size_t> chain;
    for (size_t k = i;; k = position.at(parent[k])) {
      chain.push_back(k);
      if (parent[k] < 0) break;
    }
    std::reverse(chain.begin(), chain.end());
    for (size_t j = 0; j < chain.size(); ++j) {
      verdict.path.push_back(engine.ToConfig(order[chain[j]]));
      if (j > 0) {
        int l = via[chain[j]];
        verdict.labels.push_back(
            l < 0 ? std::nullopt
                  : std::optional<Interaction>(engine.label(l)));
      }
    }
    return verdict;
  }
  if (truncated) {
    verdict.tag = LivenessVerdict::Tag::kUnknown;
    verdict.bound_hit = true;
  }
  return verdict;
}

}  // namespace

LivenessVerdict IsLive(const SessionEnv& d, int buf_bound, int depth_bound) {
  CheckBounds(buf_bound, depth_bound);
  std::unique_ptr<Engine> engine = MakeEngine(d, buf_bound);
  return Analyse(*engine, depth_bound);
}

std::set<Trace> SessionTraces(const SessionEnv& d, int max_len, int buf_bound,
                              int depth_bound) {
  CheckBounds(buf_bound, depth_bound);
  if (max_len < 0) throw std::invalid_argument("negative length bound");
  std::unique_ptr<Engine> engine = MakeEngine(d, buf_bound);
  if (Analyse(*engine, depth_bound).tag == LivenessVerdict::Tag::kNotLive) {
    return {};
  }
  // Outputs only add messages and queues are bounded, so silent steps
  // cannot cycle.
  std::map<std::pair<int, int>, std::set<Trace>> memo;
  std::function<const std::set<Trace>&(int, int)> runs =
      [&](int c, int budget) -> const std::set<Trace>& {
    auto key = std::make_pair(c, budget);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::set<Trace> out;
    if (engine->IsSuccess(c)) out.insert(Trace{});
    for (const auto& e : engine->Successors(c)) {
      if (e.label < 0) {
        const std::set<Trace>& rest = runs(e.target, budget);
        out.insert(rest.begin(), rest.end());
      } else if (budget > 0) {
        for (const Trace& w : runs(e.target, budget - 1)) {
          Trace t{engine->label(e.label)};
          t.insert(t.end(), w.begin(), w.end());
          out.insert(std::move(t));
        }
      }
    }
    if (out.size() > kDefaultTraceCap) {
      throw BudgetExceededError("more than " + std::to_string(kDefaultTraceCap) +
                                " session traces");
    }
    return memo.emplace(key, std::move(out)).first->second;
  };
  return runs(engine->initial(), max_len);
}

}  // namespace mpst
