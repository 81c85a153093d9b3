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

#include "mpst/tracelang.h"

#include <algorithm>
#include <deque>
#include <functional>

#include "mpst/errors.h"

namespace mpst {

namespace {

using Edges = std::vector<std::pair<Interaction, int>>;

void Normalize(TraceAutomaton& a) {
  for (Edges& e : a.edges) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
  }
}

int AddState(TraceAutomaton& a, bool is_final) {
  a.final.push_back(is_final);
  a.edges.emplace_back();
  return a.num_states() - 1;
}

// Copies `src` into `dst` and returns the offset of its states.
int Embed(TraceAutomaton& dst, const TraceAutomaton& src) {
  int offset = dst.num_states();
  for (int q = 0; q < src.num_states(); ++q) {
    int id = AddState(dst, src.final[q]);
    for (const auto& [x, t] : src.edges[q]) {
      dst.edges[id].push_back({x, t + offset});
    }
  }
  return offset;
}

void CopyInitialEdges(TraceAutomaton& dst, int from, const TraceAutomaton& src,
                      int offset) {
  for (const auto& [x, t] : src.edges[src.initial]) {
    dst.edges[from].push_back({x, t + offset});
  }
}

std::vector<int> Step(const TraceAutomaton& a, const std::vector<int>& set,
                      const Interaction& x) {
  std::vector<int> next;
  for (int q : set) {
    for (const auto& [y, t] : a.edges[q]) {
      if (y == x) next.push_back(t);
    }
  }
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());
  return next;
}

bool AnyFinal(const TraceAutomaton& a, const std::vector<int>& set) {
  return std::any_of(set.begin(), set.end(),
                     [&](int q) { return a.final[q]; });
}

// Successor sets of `set` grouped by label, in label order.
std::map<Interaction, std::vector<int>> Successors(
    const TraceAutomaton& a, const std::vector<int>& set) {
  std::map<Interaction, std::vector<int>> out;
  for (int q : set) {
    for (const auto& [x, t] : a.edges[q]) out[x].push_back(t);
  }
  for (auto& [x, ts] : out) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  }
  return out;
}

}  // namespace

std::set<Interaction> TraceAutomaton::Alphabet() const {
  std::set<Interaction> out;
  for (const Edges& e : edges) {
    for (const auto& [x, t] : e) out.insert(x);
  }
  return out;
}

TraceAutomaton EmptyLanguage() {
  TraceAutomaton a;
  AddState(a, false);
  return a;
}

TraceAutomaton EpsilonLanguage() {
  TraceAutomaton a;
  AddState(a, true);
  return a;
}

TraceAutomaton SingletonLanguage(const Interaction& letter) {
  TraceAutomaton a;
  AddState(a, false);
  AddState(a, true);
  a.edges[0].push_back({letter, 1});
  return a;
}

TraceAutomaton FiniteLanguage(const std::set<Trace>& traces) {
  // A trie.
  TraceAutomaton a;
  AddState(a, false);
  for (const Trace& w : traces) {
    int q = 0;
    for (const Interaction& x : w) {
      int next = -1;
      for (const auto& [y, t] : a.edges[q]) {
        if (y == x) next = t;
      }
      if (next < 0) {
        next = AddState(a, false);
        a.edges[q].push_back({x, next});
      }
      q = next;
    }
    a.final[q] = true;
  }
  Normalize(a);
  return a;
}

TraceAutomaton Trim(const TraceAutomaton& a) {
  int n = a.num_states();
  std::vector<char> reach(n, 0);
  std::vector<int> stack{a.initial};
  reach[a.initial] = 1;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (const auto& [x, t] : a.edges[q]) {
      if (!reach[t]) {
        reach[t] = 1;
        stack.push_back(t);
      }
    }
  }
  std::vector<std::vector<int>> reverse(n);
  for (int q = 0; q < n; ++q) {
    for (const auto& [x, t] : a.edges[q]) reverse[t].push_back(q);
  }
  std::vector<char> live(n, 0);
  for (int q = 0; q < n; ++q) {
    if (a.final[q]) {
      live[q] = 1;
      stack.push_back(q);
    }
  }
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int p : reverse[q]) {
      if (!live[p]) {
        live[p] = 1;
        stack.push_back(p);
      }
    }
  }
  std::vector<int> index(n, -1);
  TraceAutomaton out;
  index[a.initial] = AddState(out, a.final[a.initial]);
  for (int q = 0; q < n; ++q) {
    if (q != a.initial && reach[q] && live[q]) {
      index[q] = AddState(out, a.final[q]);
    }
  }
  for (int q = 0; q < n; ++q) {
    if (index[q] < 0) continue;
    for (const auto& [x, t] : a.edges[q]) {
      if (index[t] >= 0 && live[t]) out.edges[index[q]].push_back({x, index[t]});
    }
  }
  out.initial = index[a.initial];
  Normalize(out);
  return out;
}

TraceAutomaton Concatenate(const TraceAutomaton& a, const TraceAutomaton& b) {
  TraceAutomaton out;
  int oa = Embed(out, a);
  int ob = Embed(out, b);
  out.initial = a.initial + oa;
  bool b_nullable = b.final[b.initial];
  for (int q = 0; q < a.num_states(); ++q) {
    if (!a.final[q]) continue;
    CopyInitialEdges(out, q + oa, b, ob);
    out.final[q + oa] = b_nullable;
  }
  Normalize(out);
  return Trim(out);
}

TraceAutomaton UnionAutomata(const TraceAutomaton& a, const TraceAutomaton& b) {
  TraceAutomaton out;
  int start = AddState(out, a.final[a.initial] || b.final[b.initial]);
  int oa = Embed(out, a);
  int ob = Embed(out, b);
  CopyInitialEdges(out, start, a, oa);
  CopyInitialEdges(out, start, b, ob);
  out.initial = start;
  Normalize(out);
  return Trim(out);
}

TraceAutomaton KleeneStar(const TraceAutomaton& a) {
  TraceAutomaton out;
  int start = AddState(out, true);
  int oa = Embed(out, a);
  CopyInitialEdges(out, start, a, oa);
  for (int q = 0; q < a.num_states(); ++q) {
    if (a.final[q]) CopyInitialEdges(out, q + oa, a, oa);
  }
  out.initial = start;
  Normalize(out);
  return Trim(out);
}

TraceAutomaton ShuffleAutomata(const TraceAutomaton& a1,
                               const TraceAutomaton& a2) {
  TraceAutomaton out;
  std::map<std::pair<int, int>, int> index;
  std::deque<std::pair<int, int>> queue;
  auto visit = [&](int p, int q) {
    auto it = index.find({p, q});
    if (it != index.end()) return it->second;
    int id = AddState(out, a1.final[p] && a2.final[q]);
    index.emplace(std::make_pair(p, q), id);
    queue.push_back({p, q});
    return id;
  };
  out.initial = visit(a1.initial, a2.initial);
  while (!queue.empty()) {
    auto [p, q] = queue.front();
    queue.pop_front();
    int id = index.at({p, q});
    Edges edges;
    for (const auto& [x, t] : a1.edges[p]) edges.push_back({x, visit(t, q)});
    for (const auto& [x, t] : a2.edges[q]) edges.push_back({x, visit(p, t)});
    out.edges[id] = std::move(edges);
  }
  Normalize(out);
  return Trim(out);
}

GlobalType DesugarKExit(const GlobalType& g) {
  std::vector<GlobalType> bodies = g.bodies();
  std::vector<GlobalType> exits = g.exits();
  GlobalType round = bodies[0];
  for (size_t i = 1; i < bodies.size(); ++i) {
    round = GlobalType::Seq(round, bodies[i]);
  }
  GlobalType leave = exits[0];
  GlobalType prefix = bodies[0];
  for (size_t i = 1; i < exits.size(); ++i) {
    leave = GlobalType::Either(leave, GlobalType::Seq(prefix, exits[i]));
    prefix = GlobalType::Seq(prefix, bodies[i]);
  }
  return GlobalType::Seq(GlobalType::Star(round), leave);
}

TraceAutomaton CompileTraces(const GlobalType& g) {
  switch (g.kind()) {
    case GlobalKind::kSkip:
      return EpsilonLanguage();
    case GlobalKind::kAction:
      return SingletonLanguage(g.interaction());
    case GlobalKind::kSeq:
      return Concatenate(CompileTraces(g.left()), CompileTraces(g.right()));
    case GlobalKind::kBoth:
      return ShuffleAutomata(CompileTraces(g.left()),
                             CompileTraces(g.right()));
    case GlobalKind::kEither:
      return UnionAutomata(CompileTraces(g.left()), CompileTraces(g.right()));
    case GlobalKind::kStar:
      return KleeneStar(CompileTraces(g.body()));
    case GlobalKind::kKExit:
      return CompileTraces(DesugarKExit(g));
  }
  return EmptyLanguage();
}

bool Accepts(const TraceAutomaton& a, const Trace& w) {
  std::vector<int> set{a.initial};
  for (const Interaction& x : w) {
    set = Step(a, set, x);
    if (set.empty()) return false;
  }
  return AnyFinal(a, set);
}

std::set<Trace> EnumerateTraces(const TraceAutomaton& a, int max_len,
                                size_t cap) {
  std::set<Trace> out;
  Trace prefix;
  std::function<void(const std::vector<int>&)> walk =
      [&](const std::vector<int>& set) {
        if (AnyFinal(a, set)) {
          out.insert(prefix);
          if (out.size() > cap) {
            throw BudgetExceededError("more than " + std::to_string(cap) +
                                      " traces");
          }
        }
        if (static_cast<int>(prefix.size()) >= max_len) return;
        for (const auto& [x, next] : Successors(a, set)) {
          prefix.push_back(x);
          walk(next);
          prefix.pop_back();
        }
      };
  walk({a.initial});
  return out;
}

InclusionResult Includes(const TraceAutomaton& a1, const TraceAutomaton& a2) {
  struct Node {
    int q;
    int set;
    int parent;
    const Interaction* label;
  };
  std::map<std::vector<int>, int> set_index;
  std::vector<std::vector<int>> sets;
  auto intern = [&](std::vector<int> s) {
    auto it = set_index.find(s);
    if (it != set_index.end()) return it->second;
    int id = static_cast<int>(sets.size());
    sets.push_back(s);
    set_index.emplace(std::move(s), id);
    return id;
  };
  std::map<std::pair<int, Interaction>, int> step_cache;
  std::map<std::pair<int, int>, int> seen;
  std::vector<Node> nodes;
  std::deque<int> queue;
  int start_set = intern({a1.initial});
  nodes.push_back(Node{a2.initial, start_set, -1, nullptr});
  seen.emplace(std::make_pair(a2.initial, start_set), 0);
  queue.push_back(0);
  while (!queue.empty()) {
    int n = queue.front();
    queue.pop_front();
    Node node = nodes[n];
    if (a2.final[node.q] && !AnyFinal(a1, sets[node.set])) {
      Trace w;
      for (int k = n; nodes[k].parent >= 0; k = nodes[k].parent) {
        w.push_back(*nodes[k].label);
      }
      std::reverse(w.begin(), w.end());
      return InclusionResult{false, std::move(w)};
    }
    for (const auto& edge : a2.edges[node.q]) {
      const Interaction& x = edge.first;
      auto key = std::make_pair(node.set, x);
      auto it = step_cache.find(key);
      int next_set;
      if (it != step_cache.end()) {
        next_set = it->second;
      } else {
        next_set = intern(Step(a1, sets[node.set], x));
        step_cache.emplace(key, next_set);
      }
      auto pair = std::make_pair(edge.second, next_set);
      if (seen.count(pair) > 0) continue;
      seen.emplace(pair, static_cast<int>(nodes.size()));
      nodes.push_back(Node{edge.second, next_set, n, &edge.first});
      queue.push_back(static_cast<int>(nodes.size()) - 1);
    }
  }
  return InclusionResult{};
}

bool LanguageEqual(const TraceAutomaton& a1, const TraceAutomaton& a2) {
  return Includes(a1, a2).included && Includes(a2, a1).included;
}

TraceAutomaton SwapAutomaton(const TraceAutomaton& a) {
  int n = a.num_states();
  TraceAutomaton out;
  for (int layer = 0; layer < 2; ++layer) {
    for (int q = 0; q < n; ++q) AddState(out, layer == 1 && a.final[q]);
  }
  for (int q = 0; q < n; ++q) {
    for (const auto& [x, t] : a.edges[q]) {
      out.edges[q].push_back({x, t});
      out.edges[n + q].push_back({x, n + t});
    }
  }
  // Reading `second first` from layer 0 where `first second` leads from q
  // to q2 lands in layer 1 at q2. The middle state only remembers `first`
  // and q2.
  std::map<std::pair<Interaction, int>, int> middle;
  for (int q = 0; q < n; ++q) {
    for (const auto& [first, q1] : a.edges[q]) {
      for (const auto& [second, q2] : a.edges[q1]) {
        if (!CanSwap(first, second)) continue;
        auto key = std::make_pair(first, q2);
        auto it = middle.find(key);
        int m;
        if (it == middle.end()) {
          m = AddState(out, false);
          out.edges[m].push_back({first, n + q2});
          middle.emplace(key, m);
        } else {
          m = it->second;
        }
        out.edges[q].push_back({second, m});
      }
    }
  }
  out.initial = a.initial;
  Normalize(out);
  return Trim(out);
}

WellFormedness WellFormedLanguage(const TraceAutomaton& a) {
  TraceAutomaton swapped = SwapAutomaton(a);
  InclusionResult r = Includes(a, swapped);
  WellFormedness result;
  if (r.included) return result;
  const Trace& w = *r.witness;
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    if (!CanSwap(w[i + 1], w[i])) continue;
    Trace original = w;
    std::swap(original[i], original[i + 1]);
    if (Accepts(a, original)) {
      result.well_formed = false;
      result.witness = std::move(original);
      result.position = i;
      result.swapped = w;
      return result;
    }
  }
  // Unreachable: every word of the swap automaton comes from a swap.
  result.well_formed = false;
  result.swapped = w;
  return result;
}

WellFormedness WellFormed(const GlobalType& g) {
  return WellFormedLanguage(CompileTraces(g));
}

ParikhVector ParikhVectorOf(const Trace& w) {
  ParikhVector v;
  for (const Interaction& x : w) ++v[x];
  return v;
}

std::string LanguageKey(const TraceAutomaton& a) {
  // Subset construction.
  std::map<std::vector<int>, int> index;
  std::vector<std::vector<int>> sets;
  std::vector<std::map<Interaction, int>> delta;
  std::deque<int> queue;
  auto visit = [&](std::vector<int> s) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(sets.size());
    sets.push_back(s);
    delta.emplace_back();
    index.emplace(std::move(s), id);
    queue.push_back(id);
    return id;
  };
  visit({a.initial});
  while (!queue.empty()) {
    int d = queue.front();
    queue.pop_front();
    for (auto& [x, next] : Successors(a, sets[d])) {
      int t = visit(next);
      delta[d][x] = t;
    }
  }
  size_t n = sets.size();
  // Moore refinement.
  std::vector<int> cls(n);
  for (size_t i = 0; i < n; ++i) cls[i] = AnyFinal(a, sets[i]) ? 1 : 0;
  size_t count = 0;
  while (true) {
    std::map<std::pair<int, std::vector<std::pair<Interaction, int>>>, int>
        sig;
    std::vector<int> next(n);
    for (size_t i = 0; i < n; ++i) {
      std::vector<std::pair<Interaction, int>> row;
      for (const auto& [x, t] : delta[i]) row.push_back({x, cls[t]});
      next[i] = sig.emplace(std::make_pair(cls[i], std::move(row)),
                            static_cast<int>(sig.size()))
                    .first->second;
    }
    cls = std::move(next);
    if (sig.size() == count) break;
    count = sig.size();
  }
  // Canonical numbering by breadth-first traversal in label order.
  std::map<int, int> number;
  std::vector<int> order;
  std::vector<int> rep(count, -1);
  for (size_t i = 0; i < n; ++i) {
    if (rep[cls[i]] < 0) rep[cls[i]] = static_cast<int>(i);
  }
  std::deque<int> q{cls[0]};
  number[cls[0]] = 0;
  std::string key;
  while (!q.empty()) {
    int c = q.front();
    q.pop_front();
    int r = rep[c];
    key += std::to_string(number[c]) + (AnyFinal(a, sets[r]) ? "F" : "N");
    for (const auto& [x, t] : delta[r]) {
      int tc = cls[t];
      if (number.count(tc) == 0) {
        int id = static_cast<int>(number.size());
        number[tc] = id;
        q.push_back(tc);
      }
      key += " " + ToString(x) + ">" + std::to_string(number[tc]);
    }
    key += ";";
  }
  return key;
}

std::string ToDot(const TraceAutomaton& a) {
  std::string out = "digraph traces {\n  rankdir=LR;\n";
  out += "  start [shape=point];\n";
  for (int q = 0; q < a.num_states(); ++q) {
    out += "  s" + std::to_string(q) + " [shape=" +
           (a.final[q] ? "doublecircle" : "circle") + "];\n";
  }
  out += "  start -> s" + std::to_string(a.initial) + ";\n";
  for (int q = 0; q < a.num_states(); ++q) {
    for (const auto& [x, t] : a.edges[q]) {
      out += "  s" + std::to_string(q) + " -> s" + std::to_string(t) +
             " [label=\"" + ToString(x) + "\"];\n";
    }
  }
  out += "}\n";
  return out;
}

}  // namespace mpst
