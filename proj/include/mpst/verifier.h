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

#ifndef MPST_VERIFIER_H_
#define MPST_VERIFIER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpst/global_type.h"
#include "mpst/runtime.h"
#include "mpst/session_type.h"

namespace mpst {

struct Bounds {
  // Non-positive means 2 * (interactions of the global type) + 4.
  int max_len = 0;
  int buf_bound = kDefaultBufBound;
  int depth_bound = kDefaultDepthBound;
  int budget = 256;
};

// `bounds` with max_len filled in for `g`.
Bounds ResolveBounds(const GlobalType& g, Bounds bounds = {});

struct SoundnessResult {
  bool sound = true;
  // Shortest, then least, session trace outside the traces of g.
  std::optional<Trace> counterexample;
};

struct CompletenessResult {
  bool complete = true;
  // Shortest, then least, trace of g with no permutation among the session
  // traces.
  std::optional<Trace> missing;
};

SoundnessResult CheckSound(const GlobalType& g, const SessionEnv& d,
                           int max_len, int buf_bound = kDefaultBufBound);
// Throws BudgetExceededError when g has too many traces.
CompletenessResult CheckComplete(const GlobalType& g, const SessionEnv& d,
                                 int max_len, int buf_bound = kDefaultBufBound);

struct ConformanceReport {
  enum class Basis { kExact, kBounded };

  bool sound = true;
  std::optional<Trace> counterexample;
  bool complete = true;
  std::optional<Trace> missing;
  int max_len = 0;
  int buf_bound = 0;
  Basis basis = Basis::kBounded;

  bool ok() const { return sound && complete; }
};

ConformanceReport CheckPreorder(const GlobalType& g, const SessionEnv& d,
                                Bounds bounds = {});

enum class FlawCategory {
  kProjectable,
  kNoSequentiality,
  kNoKnowledgeForChoice,
  kNoKnowledgeNoChoice,
  kUnclassified,
};

std::string ToString(FlawCategory category);

struct Classification {
  FlawCategory category = FlawCategory::kUnclassified;
  std::string reason;
  // Projectable: the projection. NoSequentiality: the projection of the
  // relaxed type. NoKnowledgeForChoice and Unclassified: a complete
  // candidate, when one was found.
  std::optional<SessionEnv> environment;
  // NoSequentiality: the type with the offending sequences relaxed.
  std::optional<GlobalType> relaxed;
};

Classification Classify(const GlobalType& g, Bounds bounds = {});

// Rewrites every sequence so that blocks with no causal dependency on
// each other run in parallel. The result only adds traces obtainable from
// those of `g` by swapping independent neighbours.
GlobalType RelaxSequences(const GlobalType& g);

struct RandomOptions {
  int max_size = 8;
  int role_count = 4;
  int star_depth = 1;
};

// Deterministic in `seed`. Roles are r0, r1, ...; messages a and b; loop
// bodies always contain an interaction.
GlobalType RandomGlobalType(uint64_t seed, const RandomOptions& options = {});

struct CrossCheckSummary {
  int samples = 0;
  int ill_formed = 0;
  int rejected = 0;
  int projectable = 0;
  int skipped = 0;
  int violations = 0;
  std::vector<std::string> details;
};

// For every sample that is well formed and projects, the projection must
// be live (or undecided within the bounds), sound and complete. Two fixed
// samples are checked first: the looping seller/buyer protocol, which must
// pass, and an alternative the algorithm cannot project, which must be
// rejected.
CrossCheckSummary CrossCheckTheorems(int sample_count, uint64_t seed,
                                     const RandomOptions& options = {},
                                     const Bounds& bounds = {});

}  // namespace mpst

#endif  // MPST_VERIFIER_H_
