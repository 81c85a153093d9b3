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

// Evaluation of session types as regular trees.
//
// A state is either a term position or a lazy join (choice, merge, or
// oblivious union) of states. Heads are computed on demand; the reachable
// states form a finite graph that is minimized and read back as a
// canonical term.

#ifndef MPST_SRC_SESSION_GRAPH_H_
#define MPST_SRC_SESSION_GRAPH_H_

#include <compare>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mpst/session_type.h"

namespace mpst::internal {

struct Prefix {
  std::set<Role> partners;
  MessageType message;

  auto operator<=>(const Prefix&) const = default;
  bool operator==(const Prefix&) const = default;
};

enum class HeadKind { kEnd, kOut, kIn, kAtom, kOpaque };

struct EvalError : std::exception {
  enum Kind { kIncompatible, kNotSessionType, kUnguarded, kUnbound, kTooLarge };

  EvalError(Kind k, const SessionNode* c, std::string d)
      : kind(k), culprit(c), detail(std::move(d)) {}
  const char* what() const noexcept override { return detail.c_str(); }

  Kind kind;
  const SessionNode* culprit;
  std::string detail;
};

// `prefix` must be compatible with the state `state`.
struct Obligation {
  Prefix prefix;
  int state;
  const SessionNode* culprit;
};

struct Head {
  HeadKind kind = HeadKind::kEnd;
  std::vector<std::pair<Prefix, int>> edges;
  std::string atom;
  // For kOpaque: which head kinds took part.
  bool has_out = false;
  bool has_in = false;
  bool has_end = false;
  std::vector<Obligation> obligations;
};

struct GraphNode {
  HeadKind kind = HeadKind::kEnd;
  std::vector<std::pair<Prefix, int>> edges;
  std::string atom;
  int opaque_id = -1;
};

struct Graph {
  std::vector<GraphNode> nodes;
  std::vector<int> roots;
};

enum class RootClass { kOut, kIn, kEnd, kUnknown };

class Evaluator {
 public:
  // With `allow_free_vars`, unbound variables are opaque atoms; otherwise
  // they raise kUnbound.
  explicit Evaluator(bool allow_free_vars);
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  int StateOf(const SessionType& t);
  const Head& HeadOf(int state);

  // Reachable graph from `roots`. With `check_obligations`, every recorded
  // compatibility requirement is verified (atoms and opaque states count as
  // compatible).
  Graph Explore(const std::vector<int>& roots, bool check_obligations);

  bool Equivalent(int a, int b);
  RootClass Classify(int state);

 private:
  struct Env;
  struct State;

  const Env* Extend(const Env* env, const SessionNode* binder);
  int Leaf(const SessionNode* node, const Env* env);
  int Join(int op, std::vector<int> members, const SessionNode* origin);
  Head Compute(int state);
  Head ComputeJoin(int state);

  bool allow_free_vars_;
  std::vector<SessionType> keep_alive_;
  std::map<std::pair<const Env*, const SessionNode*>, std::unique_ptr<Env>>
      envs_;
  std::vector<State> states_;
  std::map<std::pair<const SessionNode*, const Env*>, int> leaf_index_;
  std::map<std::pair<int, std::vector<int>>, int> join_index_;
  std::vector<std::unique_ptr<Head>> heads_;
  std::vector<char> in_progress_;
};

// Class index of every node; equal classes denote equal regular trees.
std::vector<int> Minimize(const Graph& graph);

// Canonical term for `node`. Binders are named X, Y, Z, X1, ... avoiding
// the names of free atoms. Throws EvalError for opaque nodes.
SessionType ReadBack(const Graph& graph, int node);

// Normal form. Throws EvalError.
SessionType Normalize(const SessionType& t);

// Minimized graph of a closed type, with a single root.
Graph CompileClosed(const SessionType& t);

// Whether an input with `prefix` is compatible with `node` of `graph`.
bool Compatible(const Graph& graph, int node, const Prefix& prefix);

}  // namespace mpst::internal

#endif  // MPST_SRC_SESSION_GRAPH_H_
