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

#include "mpst/projector.h"

#include <map>
#include <utility>

#include "session_graph.h"

namespace mpst {

namespace {

using internal::EvalError;
using internal::Evaluator;
using internal::RootClass;

ProjectionErrorKind KindOf(EvalError::Kind kind) {
  switch (kind) {
    case EvalError::kIncompatible:
      return ProjectionErrorKind::kIncompatibleMerge;
    case EvalError::kNotSessionType:
      return ProjectionErrorKind::kOutputMismatch;
    case EvalError::kUnguarded:
      return ProjectionErrorKind::kNoDecisionMaker;
    case EvalError::kUnbound:
    case EvalError::kTooLarge:
      break;
  }
  return ProjectionErrorKind::kUnboundContinuation;
}

bool IsDecisionNode(const GlobalType& g) {
  return g.kind() == GlobalKind::kEither || g.kind() == GlobalKind::kStar ||
         g.kind() == GlobalKind::kKExit;
}

// First alternative or loop of `g` in pre-order.
std::optional<GlobalType> FirstDecisionNode(const GlobalType& g) {
  if (IsDecisionNode(g)) return g;
  std::vector<GlobalType> children;
  switch (g.kind()) {
    case GlobalKind::kSeq:
    case GlobalKind::kBoth:
      children = {g.left(), g.right()};
      break;
    default:
      break;
  }
  for (const GlobalType& c : children) {
    if (auto found = FirstDecisionNode(c)) return found;
  }
  return std::nullopt;
}

MergeFlavor FlavorOf(ProjectionMode mode) {
  switch (mode) {
    case ProjectionMode::kAlgorithmic:
      return MergeFlavor::kStrict;
    case ProjectionMode::kLenient:
      return MergeFlavor::kLenient;
    case ProjectionMode::kOblivious:
      return MergeFlavor::kOblivious;
  }
  return MergeFlavor::kStrict;
}

class Projector {
 public:
  explicit Projector(ProjectOptions options) : options_(options) {}

  SessionEnv Project(const GlobalType& g, const SessionEnv& cont);
  SessionEnv ProjectLoop(const GlobalType& g, const SessionEnv& cont);
  SessionEnv Resolve(const SessionEnv& raw, const GlobalType& at);

 private:
  SessionEnv ProjectAlternative(const GlobalType& g, const SessionEnv& cont);
  SessionEnv ProjectStar(const GlobalType& g, const SessionEnv& cont);

  SessionType Note(SessionType t, const GlobalType& origin) {
    origins_.emplace(t.get(), origin);
    return t;
  }
  void Validate(const Role& role, const SessionType& t, const GlobalType& at);
  [[noreturn]] void Fail(const EvalError& e, const std::optional<Role>& role,
                         const GlobalType& at);
  std::string Fresh() { return "%" + std::to_string(++counter_); }

  ProjectOptions options_;
  std::map<const SessionNode*, GlobalType> origins_;
  int counter_ = 0;
};

void Projector::Fail(const EvalError& e, const std::optional<Role>& role,
                     const GlobalType& at) {
  if (e.kind == EvalError::kTooLarge) throw BudgetExceededError(e.detail);
  ProjectionErrorKind kind = KindOf(e.kind);
  std::optional<GlobalType> location;
  auto it = origins_.find(e.culprit);
  if (it != origins_.end()) {
    location = it->second;
  } else if (kind == ProjectionErrorKind::kNoDecisionMaker) {
    location = FirstDecisionNode(at);
  }
  if (!location) location = at;
  std::string detail = e.detail;
  if (e.kind == EvalError::kUnbound) {
    detail = "continuation is not a closed session type: " + detail;
  }
  throw ProjectionError(kind, location, role, detail);
}

void Projector::Validate(const Role& role, const SessionType& t,
                         const GlobalType& at) {
  try {
    Evaluator ev(true);
    ev.Explore({ev.StateOf(t)}, true);
  } catch (const EvalError& e) {
    Fail(e, role, at);
  }
}

SessionEnv Projector::Project(const GlobalType& g, const SessionEnv& cont) {
  switch (g.kind()) {
    case GlobalKind::kSkip:
      return cont;
    case GlobalKind::kAction: {
      SessionEnv out = cont;
      const Interaction& x = g.interaction();
      for (const Role& p : x.senders) {
        out[p] = SessionType::Out(x.receiver, x.message, cont.at(p));
      }
      out[x.receiver] =
          SessionType::In(x.senders, x.message, cont.at(x.receiver));
      return out;
    }
    case GlobalKind::kSeq:
      return Project(g.left(), Project(g.right(), cont));
    case GlobalKind::kBoth:
      throw ProjectionError(ProjectionErrorKind::kAndEliminationExhausted, g,
                            std::nullopt,
                            "parallel composition has no projection rule; "
                            "it must be eliminated first");
    case GlobalKind::kEither:
      return ProjectAlternative(g, cont);
    case GlobalKind::kStar:
      return ProjectStar(g, cont);
    case GlobalKind::kKExit:
      return ProjectLoop(g, cont);
  }
  return cont;
}

SessionEnv Projector::ProjectAlternative(const GlobalType& g,
                                         const SessionEnv& cont) {
  SessionEnv d1 = Project(g.left(), cont);
  SessionEnv d2 = Project(g.right(), cont);
  SessionEnv out = d1;
  std::vector<Role> differing;
  std::vector<Role> deciders;
  for (const auto& [r, t1] : d1) {
    const SessionType& t2 = d2.at(r);
    RootClass c1, c2;
    try {
      Evaluator ev(true);
      int s1 = ev.StateOf(t1), s2 = ev.StateOf(t2);
      if (ev.Equivalent(s1, s2)) continue;
      c1 = ev.Classify(s1);
      c2 = ev.Classify(s2);
    } catch (const EvalError& e) {
      Fail(e, r, g);
    }
    differing.push_back(r);
    if (options_.mode != ProjectionMode::kAlgorithmic) continue;
    auto passive = [](RootClass c) {
      return c == RootClass::kIn || c == RootClass::kEnd;
    };
    if ((c1 == RootClass::kOut && passive(c2)) ||
        (c2 == RootClass::kOut && passive(c1))) {
      throw ProjectionError(ProjectionErrorKind::kOutputMismatch, g, r,
                            r.name + " sends in one branch but not in the "
                                     "other");
    }
    if (!passive(c1) && !passive(c2) &&
        (c1 == RootClass::kOut || c2 == RootClass::kOut)) {
      deciders.push_back(r);
    }
  }
  if (differing.empty()) return out;

  if (options_.mode != ProjectionMode::kAlgorithmic) {
    for (const Role& r : differing) {
      out[r] = Note(SessionType::Merge({d1.at(r), d2.at(r)},
                                       FlavorOf(options_.mode)),
                    g);
      Validate(r, out[r], g);
    }
    return out;
  }

  if (deciders.size() != 1) {
    std::string detail;
    if (deciders.empty()) {
      detail = "no role chooses between the branches";
    } else {
      detail = "roles";
      for (const Role& r : deciders) detail += " " + r.name;
      detail += " would all have to choose";
    }
    throw ProjectionError(ProjectionErrorKind::kNoDecisionMaker, g,
                          std::nullopt, detail);
  }
  for (const Role& r : differing) {
    if (r == deciders[0]) {
      out[r] = Note(SessionType::Internal({d1.at(r), d2.at(r)}), g);
    } else {
      out[r] = Note(SessionType::Merge({d1.at(r), d2.at(r)}), g);
    }
    Validate(r, out[r], g);
  }
  return out;
}

SessionEnv Projector::ProjectStar(const GlobalType& g, const SessionEnv& cont) {
  std::set<Role> roles = RolesOf(g);
  if (roles.empty()) return cont;
  std::map<Role, std::string> vars;
  SessionEnv inner = cont;
  for (const Role& r : roles) {
    vars[r] = Fresh();
    inner[r] = SessionType::Var(vars[r]);
  }
  SessionEnv body = Project(g.body(), inner);

  std::optional<Role> decider;
  if (options_.mode == ProjectionMode::kAlgorithmic) {
    std::vector<Role> outs;
    for (const Role& r : roles) {
      try {
        Evaluator ev(true);
        if (ev.Classify(ev.StateOf(body.at(r))) == RootClass::kOut) {
          outs.push_back(r);
        }
      } catch (const EvalError& e) {
        Fail(e, r, g);
      }
    }
    if (outs.size() != 1) {
      throw ProjectionError(
          ProjectionErrorKind::kNoDecisionMaker, g, std::nullopt,
          outs.empty() ? "no role decides whether to iterate"
                       : "more than one role would decide whether to iterate");
    }
    decider = outs[0];
  }

  SessionEnv out = cont;
  for (const Role& r : roles) {
    SessionType joined;
    if (decider && r == *decider) {
      joined = SessionType::Internal({body.at(r), cont.at(r)});
    } else if (decider) {
      joined = SessionType::Merge({body.at(r), cont.at(r)});
    } else {
      joined = SessionType::Merge({body.at(r), cont.at(r)},
                                  MergeFlavor::kLenient);
    }
    Note(joined, g);
    out[r] = Note(SessionType::Rec(vars[r], joined), g);
    Validate(r, out[r], g);
  }
  return out;
}

// Phase i of the loop either leaves through exit i or runs body i and
// moves to phase i + 1; after the last body the loop restarts at phase 1.
SessionEnv Projector::ProjectLoop(const GlobalType& g, const SessionEnv& cont) {
  std::vector<GlobalType> bodies = g.bodies();
  std::vector<GlobalType> exits = g.exits();
  std::set<Role> roles = RolesOf(g);
  if (roles.empty()) return cont;
  std::map<Role, std::string> vars;
  SessionEnv next = cont;
  for (const Role& r : roles) {
    vars[r] = Fresh();
    next[r] = SessionType::Var(vars[r]);
  }
  for (size_t i = bodies.size(); i-- > 0;) {
    SessionEnv leave = Project(exits[i], cont);
    SessionEnv stay = Project(bodies[i], next);
    std::vector<Role> differing;
    std::vector<Role> deciders;
    for (const Role& r : roles) {
      try {
        Evaluator ev(true);
        int s = ev.StateOf(stay.at(r)), e = ev.StateOf(leave.at(r));
        if (ev.Equivalent(s, e)) continue;
        differing.push_back(r);
        if (ev.Classify(s) == RootClass::kOut) deciders.push_back(r);
      } catch (const EvalError& e) {
        Fail(e, r, g);
      }
    }
    bool algorithmic = options_.mode == ProjectionMode::kAlgorithmic;
    if (algorithmic && !differing.empty() && deciders.size() != 1) {
      throw ProjectionError(
          ProjectionErrorKind::kNoDecisionMaker, g, std::nullopt,
          "phase " + std::to_string(i + 1) +
              (deciders.empty() ? " has no role deciding whether to leave"
                                : " has more than one deciding role"));
    }
    SessionEnv phase = stay;
    for (const Role& r : differing) {
      SessionType joined;
      if (!algorithmic) {
        joined = SessionType::Merge({stay.at(r), leave.at(r)},
                                    MergeFlavor::kLenient);
      } else if (r == deciders[0]) {
        joined = SessionType::Internal({stay.at(r), leave.at(r)});
      } else {
        joined = SessionType::Merge({stay.at(r), leave.at(r)});
      }
      phase[r] = Note(joined, g);
      Validate(r, phase[r], g);
    }
    next = std::move(phase);
  }
  SessionEnv out = cont;
  for (const Role& r : roles) {
    out[r] = Note(SessionType::Rec(vars[r], next.at(r)), g);
    Validate(r, out[r], g);
  }
  return out;
}

SessionEnv Projector::Resolve(const SessionEnv& raw, const GlobalType& at) {
  SessionEnv out;
  for (const auto& [r, t] : raw) {
    try {
      out[r] = internal::Normalize(t);
    } catch (const EvalError& e) {
      Fail(e, r, at);
    }
  }
  return out;
}

void CheckDomain(const GlobalType& g, const SessionEnv& cont) {
  for (const Role& r : RolesOf(g)) {
    if (cont.count(r) == 0) {
      throw ProjectionError(ProjectionErrorKind::kUnboundContinuation, g, r,
                            "no continuation for role " + r.name);
    }
  }
  for (const auto& [r, t] : cont) {
    std::set<std::string> free = FreeVars(t);
    if (!free.empty()) {
      throw ProjectionError(ProjectionErrorKind::kUnboundContinuation, g, r,
                            "continuation of " + r.name +
                                " mentions unbound variable " + *free.begin());
    }
  }
}

}  // namespace

std::string ToString(ProjectionErrorKind kind) {
  switch (kind) {
    case ProjectionErrorKind::kNoDecisionMaker:
      return "NoDecisionMaker";
    case ProjectionErrorKind::kIncompatibleMerge:
      return "IncompatibleMerge";
    case ProjectionErrorKind::kOutputMismatch:
      return "OutputMismatch";
    case ProjectionErrorKind::kUnboundContinuation:
      return "UnboundContinuation";
    case ProjectionErrorKind::kAndEliminationExhausted:
      return "AndEliminationExhausted";
  }
  return "";
}

ProjectionError::ProjectionError(ProjectionErrorKind kind,
                                 std::optional<GlobalType> location,
                                 std::optional<Role> role, std::string detail)
    : Error(ToString(kind) + (role ? " (" + role->name + ")" : "") + ": " +
            detail + (location ? " in " + PrintGlobalType(*location) : "")),
      kind_(kind),
      location_(std::move(location)),
      role_(std::move(role)),
      detail_(std::move(detail)) {}

bool CompatibleInput(const std::set<Role>& partners,
                     const MessageType& message, const SessionType& t) {
  Evaluator ev(true);
  internal::Graph g = ev.Explore({ev.StateOf(t)}, false);
  return internal::Compatible(g, g.roots[0],
                              internal::Prefix{partners, message});
}

SessionType Merge(const SessionType& t, const SessionType& s) {
  try {
    return internal::Normalize(SessionType::Merge({t, s}));
  } catch (const EvalError& e) {
    if (e.kind == EvalError::kTooLarge) throw BudgetExceededError(e.detail);
    throw ProjectionError(ProjectionErrorKind::kIncompatibleMerge,
                          std::nullopt, std::nullopt, e.detail);
  }
}

SessionEnv MergeEnv(const SessionEnv& d1, const SessionEnv& d2) {
  SessionEnv out;
  for (const auto& [r, t] : d1) {
    auto it = d2.find(r);
    if (it == d2.end()) {
      throw std::invalid_argument("role " + r.name + " missing on one side");
    }
    try {
      out[r] = Merge(t, it->second);
    } catch (const ProjectionError& e) {
      throw ProjectionError(e.kind(), std::nullopt, r, e.detail());
    }
  }
  if (d2.size() != d1.size()) {
    throw std::invalid_argument("environments bind different roles");
  }
  return out;
}

SessionEnv ProjectAlg(const GlobalType& g, const SessionEnv& cont,
                      const ProjectOptions& options) {
  CheckDomain(g, cont);
  Projector p(options);
  return p.Resolve(p.Project(g, cont), g);
}

SessionEnv ProjectKExit(const std::vector<GlobalType>& bodies,
                        const std::vector<GlobalType>& exits,
                        const SessionEnv& cont, const ProjectOptions& options) {
  GlobalType g = GlobalType::KExit(bodies, exits);
  CheckDomain(g, cont);
  Projector p(options);
  return p.Resolve(p.ProjectLoop(g, cont), g);
}

SessionEnv ProjectTop(const GlobalType& g, int budget,
                      const ProjectOptions& options) {
  SessionEnv cont;
  for (const Role& r : RolesOf(g)) cont[r] = SessionType::End();
  std::optional<ProjectionError> first;
  if (!ContainsBoth(g)) {
    try {
      return ProjectAlg(g, cont, options);
    } catch (const ProjectionError& e) {
      first = e;
    }
  }
  std::optional<ProjectionError> last;
  for (const GlobalType& candidate : EliminateAnd(g, budget)) {
    if (candidate == g && first) continue;
    try {
      return ProjectAlg(candidate, cont, options);
    } catch (const ProjectionError& e) {
      last = e;
    }
  }
  if (first) throw *first;
  ProjectionError error(ProjectionErrorKind::kAndEliminationExhausted, g,
                        std::nullopt,
                        last ? "no variant projects; last failure: " +
                                   std::string(last->what())
                             : "no variant without parallel composition");
  if (last) error.set_underlying(last->kind());
  throw error;
}

}  // namespace mpst
