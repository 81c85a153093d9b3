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

#include "session_graph.h"

#include <algorithm>
#include <deque>
#include <optional>
#include <tuple>

namespace mpst::internal {

namespace {

constexpr int kOpChoice = 0;
constexpr int kOpStrict = 1;
constexpr int kOpOblivious = 2;
constexpr size_t kStateCap = 400000;
constexpr size_t kReadBackCap = 2000000;

int OpOf(const SessionNode* node) {
  if (node->kind != SessionKind::kMerge) return kOpChoice;
  switch (node->flavor) {
    case MergeFlavor::kStrict:
      return kOpStrict;
    case MergeFlavor::kLenient:
      return kOpChoice;
    case MergeFlavor::kOblivious:
      return kOpOblivious;
  }
  return kOpChoice;
}

std::string PrefixText(const Prefix& p) {
  std::string out;
  for (const Role& r : p.partners) out += (out.empty() ? "" : ",") + r.name;
  return "{" + out + "}:" + p.message.name;
}

void AddFlags(Head& out, const Head& h) {
  switch (h.kind) {
    case HeadKind::kOut:
      out.has_out = true;
      break;
    case HeadKind::kIn:
      out.has_in = true;
      break;
    case HeadKind::kEnd:
      out.has_end = true;
      break;
    case HeadKind::kOpaque:
      out.has_out |= h.has_out;
      out.has_in |= h.has_in;
      out.has_end |= h.has_end;
      break;
    case HeadKind::kAtom:
      break;
  }
}

bool IsConcrete(const Head& h) {
  return h.kind != HeadKind::kAtom && h.kind != HeadKind::kOpaque;
}

// Returns a description of the first violation of the input determinism
// condition, or an empty string.
std::string DeterminismViolation(
    const std::vector<std::pair<Prefix, int>>& edges) {
  for (size_t i = 0; i < edges.size(); ++i) {
    for (size_t j = 0; j < edges.size(); ++j) {
      if (i == j) continue;
      const Prefix& a = edges[i].first;
      const Prefix& b = edges[j].first;
      if (a.message == b.message &&
          std::includes(b.partners.begin(), b.partners.end(),
                        a.partners.begin(), a.partners.end())) {
        return "inputs " + PrefixText(a) + " and " + PrefixText(b) +
               " overlap";
      }
    }
  }
  return "";
}

}  // namespace

struct Evaluator::Env {
  const Env* parent;
  const SessionNode* binder;
};

struct Evaluator::State {
  bool leaf;
  const SessionNode* node;
  const Env* env;
  int op;
  std::vector<int> members;
  const SessionNode* origin;
};

Evaluator::Evaluator(bool allow_free_vars)
    : allow_free_vars_(allow_free_vars) {}

Evaluator::~Evaluator() = default;

const Evaluator::Env* Evaluator::Extend(const Env* env,
                                        const SessionNode* binder) {
  auto key = std::make_pair(env, binder);
  auto it = envs_.find(key);
  if (it != envs_.end()) return it->second.get();
  auto fresh = std::make_unique<Env>(Env{env, binder});
  const Env* result = fresh.get();
  envs_.emplace(key, std::move(fresh));
  return result;
}

int Evaluator::Leaf(const SessionNode* node, const Env* env) {
  auto key = std::make_pair(node, env);
  auto it = leaf_index_.find(key);
  if (it != leaf_index_.end()) return it->second;
  if (states_.size() >= kStateCap) {
    throw EvalError(EvalError::kTooLarge, node, "state space too large");
  }
  int id = static_cast<int>(states_.size());
  states_.push_back(State{true, node, env, -1, {}, node});
  heads_.emplace_back();
  in_progress_.push_back(0);
  leaf_index_.emplace(key, id);
  return id;
}

int Evaluator::Join(int op, std::vector<int> members,
                    const SessionNode* origin) {
  std::vector<int> flat;
  for (int m : members) {
    const State& s = states_[m];
    if (!s.leaf && s.op == op) {
      flat.insert(flat.end(), s.members.begin(), s.members.end());
    } else {
      flat.push_back(m);
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.size() == 1) return flat[0];
  auto key = std::make_pair(op, flat);
  auto it = join_index_.find(key);
  if (it != join_index_.end()) return it->second;
  if (states_.size() >= kStateCap) {
    throw EvalError(EvalError::kTooLarge, origin, "state space too large");
  }
  int id = static_cast<int>(states_.size());
  states_.push_back(State{false, nullptr, nullptr, op, flat, origin});
  heads_.emplace_back();
  in_progress_.push_back(0);
  join_index_.emplace(std::move(key), id);
  return id;
}

int Evaluator::StateOf(const SessionType& t) {
  keep_alive_.push_back(t);
  return Leaf(t.get(), nullptr);
}

const Head& Evaluator::HeadOf(int state) {
  if (heads_[state]) return *heads_[state];
  if (in_progress_[state]) {
    throw EvalError(EvalError::kUnguarded, states_[state].origin,
                    "recursion is not guarded by a prefix");
  }
  in_progress_[state] = 1;
  Head h = Compute(state);
  in_progress_[state] = 0;
  heads_[state] = std::make_unique<Head>(std::move(h));
  return *heads_[state];
}

Head Evaluator::Compute(int state) {
  if (!states_[state].leaf) return ComputeJoin(state);
  const SessionNode* node = states_[state].node;
  const Env* env = states_[state].env;
  std::set<std::pair<const SessionNode*, const Env*>> visited;
  while (true) {
    if (!visited.insert({node, env}).second) {
      throw EvalError(EvalError::kUnguarded, node,
                      "recursion is not guarded by a prefix");
    }
    switch (node->kind) {
      case SessionKind::kEnd:
        return Head{};
      case SessionKind::kOut:
      case SessionKind::kIn: {
        Head h;
        h.kind = node->kind == SessionKind::kOut ? HeadKind::kOut
                                                 : HeadKind::kIn;
        h.edges.push_back({Prefix{node->partners, node->message},
                           Leaf(node->children[0].get(), env)});
        return h;
      }
      case SessionKind::kRec:
        env = Extend(env, node);
        node = node->children[0].get();
        break;
      case SessionKind::kVar: {
        const Env* e = env;
        while (e != nullptr && e->binder->var != node->var) e = e->parent;
        if (e == nullptr) {
          if (!allow_free_vars_) {
            throw EvalError(EvalError::kUnbound, node,
                            "unbound recursion variable " + node->var);
          }
          Head h;
          h.kind = HeadKind::kAtom;
          h.atom = node->var;
          return h;
        }
        node = e->binder;
        env = e->parent;
        break;
      }
      default: {
        std::vector<int> members;
        for (const SessionType& c : node->children) {
          members.push_back(Leaf(c.get(), env));
        }
        int j = Join(OpOf(node), std::move(members), node);
        return HeadOf(j);
      }
    }
  }
}

Head Evaluator::ComputeJoin(int state) {
  const int op = states_[state].op;
  const SessionNode* origin = states_[state].origin;
  std::vector<int> atomic;
  std::set<int> seen;
  std::deque<int> work(states_[state].members.begin(),
                       states_[state].members.end());
  while (!work.empty()) {
    int m = work.front();
    work.pop_front();
    if (!seen.insert(m).second) continue;
    const State s = states_[m];
    if (!s.leaf) {
      if (s.op == op) {
        work.insert(work.end(), s.members.begin(), s.members.end());
      } else {
        atomic.push_back(m);
      }
      continue;
    }
    switch (s.node->kind) {
      case SessionKind::kRec:
        work.push_back(
            Leaf(s.node->children[0].get(), Extend(s.env, s.node)));
        break;
      case SessionKind::kVar: {
        const Env* e = s.env;
        while (e != nullptr && e->binder->var != s.node->var) e = e->parent;
        if (e == nullptr) {
          atomic.push_back(m);
        } else {
          work.push_back(Leaf(e->binder, e->parent));
        }
        break;
      }
      case SessionKind::kInternal:
      case SessionKind::kExternal:
      case SessionKind::kMerge:
        if (OpOf(s.node) == op) {
          for (const SessionType& c : s.node->children) {
            work.push_back(Leaf(c.get(), s.env));
          }
        } else {
          atomic.push_back(m);
        }
        break;
      default:
        atomic.push_back(m);
        break;
    }
  }
  if (atomic.empty()) {
    throw EvalError(EvalError::kUnguarded, origin,
                    "recursion is not guarded by a prefix");
  }

  std::vector<Head> heads;
  for (int m : atomic) heads.push_back(HeadOf(m));

  Head result;
  for (const Head& h : heads) {
    result.obligations.insert(result.obligations.end(), h.obligations.begin(),
                              h.obligations.end());
  }

  // Concrete head kinds must agree.
  const Head* first_concrete = nullptr;
  for (const Head& h : heads) {
    if (!IsConcrete(h)) continue;
    if (first_concrete == nullptr) {
      first_concrete = &h;
    } else if (first_concrete->kind != h.kind) {
      if (op == kOpStrict) {
        throw EvalError(EvalError::kIncompatible, origin,
                        "cannot merge types with different shapes");
      }
      throw EvalError(EvalError::kNotSessionType, origin,
                      "choice mixes outputs, inputs or end");
    }
  }

  bool symbolic = false;
  std::set<std::string> atoms;
  for (const Head& h : heads) {
    if (h.kind == HeadKind::kAtom) atoms.insert(h.atom);
    if (!IsConcrete(h)) symbolic = true;
  }
  if (symbolic) {
    if (first_concrete == nullptr && atoms.size() == 1 &&
        std::all_of(heads.begin(), heads.end(), [](const Head& h) {
          return h.kind == HeadKind::kAtom;
        })) {
      result.kind = HeadKind::kAtom;
      result.atom = *atoms.begin();
      return result;
    }
    result.kind = HeadKind::kOpaque;
    for (const Head& h : heads) AddFlags(result, h);
    return result;
  }

  result.kind = heads[0].kind;
  if (result.kind == HeadKind::kEnd) return result;

  if (op == kOpStrict) {
    std::map<Prefix, int> acc(heads[0].edges.begin(), heads[0].edges.end());
    std::vector<int> acc_members{atomic[0]};
    for (size_t i = 1; i < heads.size(); ++i) {
      const Head& h = heads[i];
      if (h.kind == HeadKind::kOut) {
        std::map<Prefix, int> other(h.edges.begin(), h.edges.end());
        bool same = acc.size() == other.size();
        for (const auto& [p, t] : acc) same = same && other.count(p) > 0;
        if (!same) {
          throw EvalError(EvalError::kIncompatible, origin,
                          "merged types offer different outputs");
        }
        for (auto& [p, t] : acc) {
          t = Join(kOpStrict, {t, other.at(p)}, origin);
        }
      } else {
        std::map<Prefix, int> other(h.edges.begin(), h.edges.end());
        for (const auto& [p, t] : acc) {
          if (other.count(p) == 0) {
            result.obligations.push_back(Obligation{p, atomic[i], origin});
          }
        }
        for (const auto& [p, t] : other) {
          auto it = acc.find(p);
          if (it != acc.end()) {
            it->second = Join(kOpStrict, {it->second, t}, origin);
          } else {
            for (int am : acc_members) {
              result.obligations.push_back(Obligation{p, am, origin});
            }
            acc.emplace(p, t);
          }
        }
      }
      acc_members.push_back(atomic[i]);
    }
    result.edges.assign(acc.begin(), acc.end());
    if (result.kind == HeadKind::kIn) {
      std::string v = DeterminismViolation(result.edges);
      if (!v.empty()) throw EvalError(EvalError::kIncompatible, origin, v);
    }
    return result;
  }

  std::map<Prefix, std::vector<int>> groups;
  for (const Head& h : heads) {
    for (const auto& [p, t] : h.edges) groups[p].push_back(t);
  }
  if (op == kOpOblivious) {
    std::set<Prefix> first_set;
    for (const auto& e : heads[0].edges) first_set.insert(e.first);
    bool uniform = true;
    for (const Head& h : heads) {
      std::set<Prefix> s;
      for (const auto& e : h.edges) s.insert(e.first);
      uniform = uniform && s == first_set;
    }
    if (!uniform) {
      std::vector<int> all;
      for (const auto& [p, ts] : groups) all.insert(all.end(), ts.begin(), ts.end());
      for (auto& [p, ts] : groups) ts = all;
    }
  }
  for (const auto& [p, ts] : groups) {
    result.edges.push_back({p, Join(op, ts, origin)});
  }
  if (result.kind == HeadKind::kIn) {
    std::string v = DeterminismViolation(result.edges);
    if (!v.empty()) throw EvalError(EvalError::kNotSessionType, origin, v);
  }
  return result;
}

Graph Evaluator::Explore(const std::vector<int>& roots,
                         bool check_obligations) {
  Graph g;
  std::map<int, int> index;
  std::deque<int> queue;
  auto visit = [&](int s) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(g.nodes.size());
    index.emplace(s, id);
    g.nodes.emplace_back();
    queue.push_back(s);
    return id;
  };
  for (int r : roots) g.roots.push_back(visit(r));
  std::vector<Obligation> obligations;
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    const Head& h = HeadOf(s);
    GraphNode node;
    node.kind = h.kind;
    node.atom = h.atom;
    if (h.kind == HeadKind::kOpaque) node.opaque_id = s;
    for (const auto& [p, t] : h.edges) node.edges.push_back({p, visit(t)});
    for (const Obligation& ob : h.obligations) {
      visit(ob.state);
      obligations.push_back(ob);
    }
    g.nodes[index.at(s)] = std::move(node);
    if (g.nodes.size() > kStateCap) {
      throw EvalError(EvalError::kTooLarge, nullptr, "state space too large");
    }
  }
  if (check_obligations) {
    for (const Obligation& ob : obligations) {
      if (!Compatible(g, index.at(ob.state), ob.prefix)) {
        throw EvalError(EvalError::kIncompatible, ob.culprit,
                        "input " + PrefixText(ob.prefix) +
                            " is not compatible with the other branch");
      }
    }
  }
  return g;
}

bool Evaluator::Equivalent(int a, int b) {
  if (a == b) return true;
  Graph g = Explore({a, b}, false);
  std::vector<int> cls = Minimize(g);
  return cls[g.roots[0]] == cls[g.roots[1]];
}

RootClass Evaluator::Classify(int state) {
  const Head& h = HeadOf(state);
  switch (h.kind) {
    case HeadKind::kOut:
      return RootClass::kOut;
    case HeadKind::kIn:
      return RootClass::kIn;
    case HeadKind::kEnd:
      return RootClass::kEnd;
    case HeadKind::kAtom:
      return RootClass::kUnknown;
    case HeadKind::kOpaque:
      if (h.has_out) return RootClass::kOut;
      if (h.has_in) return RootClass::kIn;
      if (h.has_end) return RootClass::kEnd;
      return RootClass::kUnknown;
  }
  return RootClass::kUnknown;
}

bool Compatible(const Graph& graph, int node, const Prefix& prefix) {
  for (const Role& p : prefix.partners) {
    std::vector<char> seen(graph.nodes.size(), 0);
    std::vector<int> stack{node};
    bool bad = false;
    while (!stack.empty() && !bad) {
      int n = stack.back();
      stack.pop_back();
      if (seen[n]) continue;
      seen[n] = 1;
      const GraphNode& gn = graph.nodes[n];
      if (gn.kind == HeadKind::kOut) {
        for (const auto& e : gn.edges) stack.push_back(e.second);
      } else if (gn.kind == HeadKind::kIn) {
        for (const auto& [q, t] : gn.edges) {
          if (q.partners.count(p) == 0) {
            stack.push_back(t);
          } else if (q.message == prefix.message) {
            bad = true;
            break;
          }
        }
      }
    }
    if (!bad) return true;
  }
  return false;
}

std::vector<int> Minimize(const Graph& graph) {
  size_t n = graph.nodes.size();
  std::vector<int> cls(n);
  std::map<std::tuple<int, std::string, int, std::vector<Prefix>>, int> init;
  for (size_t i = 0; i < n; ++i) {
    const GraphNode& gn = graph.nodes[i];
    std::vector<Prefix> prefixes;
    for (const auto& e : gn.edges) prefixes.push_back(e.first);
    auto key = std::make_tuple(static_cast<int>(gn.kind), gn.atom,
                               gn.opaque_id, std::move(prefixes));
    cls[i] = init.emplace(std::move(key), static_cast<int>(init.size()))
                 .first->second;
  }
  size_t count = init.size();
  while (true) {
    std::map<std::pair<int, std::vector<int>>, int> sig;
    std::vector<int> next(n);
    for (size_t i = 0; i < n; ++i) {
      std::vector<int> succ;
      for (const auto& e : graph.nodes[i].edges) succ.push_back(cls[e.second]);
      auto key = std::make_pair(cls[i], std::move(succ));
      next[i] = sig.emplace(std::move(key), static_cast<int>(sig.size()))
                    .first->second;
    }
    cls = std::move(next);
    if (sig.size() == count) break;
    count = sig.size();
  }
  return cls;
}

namespace {

const char kPlaceholder = '\x01';

std::string CanonicalName(int k) {
  std::string name(1, "XYZ"[k % 3]);
  if (k >= 3) name += std::to_string(k / 3);
  return name;
}

class ReadBackBuilder {
 public:
  ReadBackBuilder(const Graph& graph, std::vector<int> cls)
      : graph_(graph), cls_(std::move(cls)) {}

  SessionType Build(int n) {
    if (++size_ > kReadBackCap) {
      throw EvalError(EvalError::kTooLarge, nullptr, "type too large");
    }
    int c = cls_[n];
    for (size_t i = 0; i < stack_.size(); ++i) {
      if (stack_[i] == c) {
        used_[i] = 1;
        return SessionType::Var(std::string(1, kPlaceholder) +
                                std::to_string(i));
      }
    }
    const GraphNode& gn = graph_.nodes[n];
    switch (gn.kind) {
      case HeadKind::kEnd:
        return SessionType::End();
      case HeadKind::kAtom:
        return SessionType::Var(gn.atom);
      case HeadKind::kOpaque:
        throw EvalError(EvalError::kUnbound, nullptr,
                        "type depends on an unresolved variable");
      default:
        break;
    }
    size_t depth = stack_.size();
    stack_.push_back(c);
    used_.push_back(0);
    std::vector<SessionType> branches;
    for (const auto& [p, t] : gn.edges) {
      SessionType cont = Build(t);
      if (gn.kind == HeadKind::kOut) {
        branches.push_back(
            SessionType::Out(*p.partners.begin(), p.message, cont));
      } else {
        branches.push_back(SessionType::In(p.partners, p.message, cont));
      }
    }
    SessionType body = gn.kind == HeadKind::kOut
                           ? SessionType::Internal(std::move(branches))
                           : SessionType::External(std::move(branches));
    bool used = used_[depth];
    stack_.pop_back();
    used_.pop_back();
    if (used) {
      return SessionType::Rec(std::string(1, kPlaceholder) +
                                  std::to_string(depth),
                              body);
    }
    return body;
  }

 private:
  const Graph& graph_;
  std::vector<int> cls_;
  std::vector<int> stack_;
  std::vector<char> used_;
  size_t size_ = 0;
};

SessionType Rename(const SessionType& t,
                   std::map<std::string, std::string>& scope, int& counter,
                   const std::set<std::string>& avoid) {
  switch (t.kind()) {
    case SessionKind::kEnd:
      return t;
    case SessionKind::kVar: {
      auto it = scope.find(t.var());
      return it == scope.end() ? t : SessionType::Var(it->second);
    }
    case SessionKind::kRec: {
      std::string name;
      do {
        name = CanonicalName(counter++);
      } while (avoid.count(name) > 0);
      auto saved = scope.find(t.var()) == scope.end()
                       ? std::optional<std::string>()
                       : std::optional<std::string>(scope[t.var()]);
      scope[t.var()] = name;
      SessionType body = Rename(t.body(), scope, counter, avoid);
      if (saved) {
        scope[t.var()] = *saved;
      } else {
        scope.erase(t.var());
      }
      return SessionType::Rec(name, body);
    }
    case SessionKind::kOut:
      return SessionType::Out(t.partner(), t.message(),
                              Rename(t.cont(), scope, counter, avoid));
    case SessionKind::kIn:
      return SessionType::In(t.partners(), t.message(),
                             Rename(t.cont(), scope, counter, avoid));
    default: {
      std::vector<SessionType> branches;
      for (const SessionType& b : t.branches()) {
        branches.push_back(Rename(b, scope, counter, avoid));
      }
      return t.kind() == SessionKind::kInternal
                 ? SessionType::Internal(std::move(branches))
                 : SessionType::External(std::move(branches));
    }
  }
}

}  // namespace

SessionType ReadBack(const Graph& graph, int node) {
  ReadBackBuilder builder(graph, Minimize(graph));
  SessionType raw = builder.Build(node);
  std::set<std::string> avoid;
  for (const GraphNode& gn : graph.nodes) {
    if (gn.kind == HeadKind::kAtom) avoid.insert(gn.atom);
  }
  std::map<std::string, std::string> scope;
  int counter = 0;
  return Rename(raw, scope, counter, avoid);
}

SessionType Normalize(const SessionType& t) {
  Evaluator ev(true);
  int s = ev.StateOf(t);
  Graph g = ev.Explore({s}, true);
  return ReadBack(g, g.roots[0]);
}

Graph CompileClosed(const SessionType& t) {
  Evaluator ev(false);
  int s = ev.StateOf(t);
  Graph g = ev.Explore({s}, true);
  std::vector<int> cls = Minimize(g);
  int count = 0;
  for (int c : cls) count = std::max(count, c + 1);
  Graph q;
  q.nodes.resize(count);
  std::vector<char> done(count, 0);
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    int c = cls[i];
    if (done[c]) continue;
    done[c] = 1;
    GraphNode node = g.nodes[i];
    for (auto& e : node.edges) e.second = cls[e.second];
    node.opaque_id = -1;
    q.nodes[c] = std::move(node);
  }
  q.roots.push_back(cls[g.roots[0]]);
  return q;
}

}  // namespace mpst::internal
