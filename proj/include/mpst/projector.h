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

#ifndef MPST_PROJECTOR_H_
#define MPST_PROJECTOR_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpst/errors.h"
#include "mpst/global_type.h"
#include "mpst/session_type.h"

namespace mpst {

enum class ProjectionErrorKind {
  kNoDecisionMaker,
  kIncompatibleMerge,
  kOutputMismatch,
  kUnboundContinuation,
  kAndEliminationExhausted,
};

std::string ToString(ProjectionErrorKind kind);

class ProjectionError : public Error {
 public:
  ProjectionError(ProjectionErrorKind kind, std::optional<GlobalType> location,
                  std::optional<Role> role, std::string detail);

  ProjectionErrorKind kind() const { return kind_; }
  // The subterm whose projection failed.
  const std::optional<GlobalType>& location() const { return location_; }
  // The role whose type could not be built, when there is one.
  const std::optional<Role>& role() const { return role_; }
  const std::string& detail() const { return detail_; }

  // For kAndEliminationExhausted: the failure of the last candidate tried.
  std::optional<ProjectionErrorKind> underlying() const { return underlying_; }
  void set_underlying(ProjectionErrorKind kind) { underlying_ = kind; }

 private:
  ProjectionErrorKind kind_;
  std::optional<GlobalType> location_;
  std::optional<Role> role_;
  std::string detail_;
  std::optional<ProjectionErrorKind> underlying_;
};

// Whether an input from `partners` with `message` can be offered next to
// `t` in an external choice without ambiguity.
bool CompatibleInput(const std::set<Role>& partners,
                     const MessageType& message, const SessionType& t);

// The partial merge operator. Throws ProjectionError(kIncompatibleMerge).
SessionType Merge(const SessionType& t, const SessionType& s);
// Pointwise merge of environments with the same roles.
SessionEnv MergeEnv(const SessionEnv& d1, const SessionEnv& d2);

enum class ProjectionMode {
  // The algorithmic rules.
  kAlgorithmic,
  // Alternatives join every differing role with an unchecked union, so no
  // decision maker is needed. Used to build candidate environments.
  kLenient,
  // Like kLenient, but a role that cannot tell the branches apart by its
  // next prefix forgets which one was taken.
  kOblivious,
};

struct ProjectOptions {
  ProjectionMode mode = ProjectionMode::kAlgorithmic;
};

// Projection of `g` with continuation `cont`, which must bind every role
// of `g`. Returns normalized types. Throws ProjectionError.
SessionEnv ProjectAlg(const GlobalType& g, const SessionEnv& cont,
                      const ProjectOptions& options = {});

// Projection of the k-exit iteration with the given bodies and exits.
SessionEnv ProjectKExit(const std::vector<GlobalType>& bodies,
                        const std::vector<GlobalType>& exits,
                        const SessionEnv& cont,
                        const ProjectOptions& options = {});

inline constexpr int kDefaultAndBudget = 256;

// And-free variants of `g` whose traces are contained in those of `g`:
// serializations first, then rewrites in breadth-first order, then
// interleavings of sequential blocks. Alternatives with a common first
// block are factored. No two variants have the same traces.
std::vector<GlobalType> EliminateAnd(const GlobalType& g,
                                     int budget = kDefaultAndBudget);

// Projection with the all-end continuation on the roles of `g`, falling
// back to the variants of EliminateAnd.
SessionEnv ProjectTop(const GlobalType& g, int budget = kDefaultAndBudget,
                      const ProjectOptions& options = {});

}  // namespace mpst

#endif  // MPST_PROJECTOR_H_
