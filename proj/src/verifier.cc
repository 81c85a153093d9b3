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

#include "mpst/verifier.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>

#include "mpst/errors.h"
#include "mpst/projector.h"
#include "mpst/tracelang.h"

namespace mpst {
namespace {

bool ShorterThenLess(const Trace& a, const Trace& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::optional<Trace> Least(const std::vector<Trace>& traces) {
  if (traces.empty()) return std::nullopt;
  return *std::min_element(traces.begin(), traces.end(), ShorterThenLess);
}

SessionEnv AllEnd(const GlobalType& g) {
  SessionEnv env;
  for (const Role& r : RolesOf(g)) env[r] = SessionType::End();
  return env;
}

// Words reachable from `t` by undoing swaps, searched for one accepted by
// `a`. Empty when the search ran out of room.
std::optional<bool> InSwapClosure(const TraceAutomaton& a, const Trace& t,
                                  size_t cap = 20000) {
  std::set<Trace> seen{t};
  std::deque<Trace> queue{t};
  while (!queue.empty()) {
    Trace w = std::move(queue.front());
    queue.pop_front();
    if (Accepts(a, w)) return true;
    for (size_t i = 0; i + 1 < w.size(); ++i) {
      // w came from a word with w[i+1] before w[i].
      if (!CanSwap(w[i + 1], w[i])) continue;
      Trace v = w;
      std::swap(v[i], v[i + 1]);
      if (seen.insert(v).second) {
        if (seen.size() > cap) return std::nullopt;
        queue.push_back(std::move(v));
      }
    }
  }
  return false;
}

}  // namespace

Bounds ResolveBounds(const GlobalType& g, Bounds bounds) {
  if (bounds.max_len <= 0) bounds.max_len = 2 * CountInteractions(g) + 4;
  return bounds;
}

SoundnessResult CheckSound(const GlobalType& g, const SessionEnv& d,
                           int max_len, int buf_bound) {
  TraceAutomaton a = CompileTraces(g);
  std::vector<Trace> bad;
  for (const Trace& t : SessionTraces(d, max_len, buf_bound)) {
    if (!Accepts(a, t)) bad.push_back(t);
  }
  SoundnessResult result;
  result.sound = bad.empty();
  result.counterexample = Least(bad);
  return result;
}

CompletenessResult CheckComplete(const GlobalType& g, const SessionEnv& d,
                                 int max_len, int buf_bound) {
  std::set<Trace> global = EnumerateTraces(CompileTraces(g), max_len);
  std::set<ParikhVector> images;
  for (const Trace& t : SessionTraces(d, max_len, buf_bound)) {
    images.insert(ParikhVectorOf(t));
  }
  std::vector<Trace> missing;
  for (const Trace& w : global) {
    if (!images.count(ParikhVectorOf(w))) missing.push_back(w);
  }
  CompletenessResult result;
  result.complete = missing.empty();
  result.missing = Least(missing);
  return result;
}

ConformanceReport CheckPreorder(const GlobalType& g, const SessionEnv& d,
                                Bounds bounds) {
  bounds = ResolveBounds(g, bounds);
  ConformanceReport report;
  report.max_len = bounds.max_len;
  report.buf_bound = bounds.buf_bound;
  SoundnessResult s = CheckSound(g, d, bounds.max_len, bounds.buf_bound);
  CompletenessResult c = CheckComplete(g, d, bounds.max_len, bounds.buf_bound);
  report.sound = s.sound;
  report.counterexample = s.counterexample;
  report.complete = c.complete;
  report.missing = c.missing;
  return report;
}

std::string ToString(FlawCategory category) {
  switch (category) {
    case FlawCategory::kProjectable:
      return "Projectable";
    case FlawCategory::kNoSequentiality:
      return "NoSequentiality";
    case FlawCategory::kNoKnowledgeForChoice:
      return "NoKnowledgeForChoice";
    case FlawCategory::kNoKnowledgeNoChoice:
      return "NoKnowledgeNoChoice";
    case FlawCategory::kUnclassified:
      return "Unclassified";
  }
  return "?";
}

namespace {

void FlattenSeq(const GlobalType& g, std::vector<GlobalType>& out) {
  if (g.kind() == GlobalKind::kSeq) {
    FlattenSeq(g.left(), out);
    FlattenSeq(g.right(), out);
  } else {
    out.push_back(g);
  }
}

GlobalType Fold(const std::vector<GlobalType>& parts,
                GlobalType (*make)(GlobalType, GlobalType)) {
  GlobalType g = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) g = make(g, parts[i]);
  return g;
}

// Series-parallel reading of a sequence of blocks. Block i must stay
// before a later block j when some letter of i cannot be swapped with a
// letter of j. Groups with no constraint between them run in parallel;
// cuts that every constraint crosses stay sequential. Anything else is
// left as it was.
class ChainRelaxer {
 public:
  explicit ChainRelaxer(std::vector<GlobalType> blocks)
      : blocks_(std::move(blocks)) {
    size_t n = blocks_.size();
    std::vector<std::set<Interaction>> alphabets;
    for (const GlobalType& b : blocks_) {
      alphabets.push_back(CompileTraces(b).Alphabet());
    }
    before_.assign(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        for (const Interaction& x : alphabets[i]) {
          for (const Interaction& y : alphabets[j]) {
            if (!CanSwap(x, y)) before_[i][j] = true;
          }
        }
      }
    }
    linked_ = before_;
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) linked_[j][i] = linked_[i][j];
    }
    // Transitive closure of the ordering.
    for (size_t k = 0; k < n; ++k) {
      for (size_t i = 0; i < k; ++i) {
        for (size_t j = k + 1; j < n; ++j) {
          if (before_[i][k] && before_[k][j]) before_[i][j] = true;
        }
      }
    }
  }

  GlobalType Relax() {
    std::vector<size_t> all(blocks_.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    return Build(all);
  }

 private:
  GlobalType Build(const std::vector<size_t>& part) {
    if (part.size() == 1) return blocks_[part[0]];

    std::vector<int> component(part.size(), -1);
    int components = 0;
    for (size_t start = 0; start < part.size(); ++start) {
      if (component[start] >= 0) continue;
      std::vector<size_t> stack{start};
      component[start] = components;
      while (!stack.empty()) {
        size_t u = stack.back();
        stack.pop_back();
        for (size_t v = 0; v < part.size(); ++v) {
          if (component[v] < 0 && linked_[part[u]][part[v]]) {
            component[v] = components;
            stack.push_back(v);
          }
        }
      }
      ++components;
    }
    if (components > 1) {
      std::vector<GlobalType> parallel;
      for (int c = 0; c < components; ++c) {
        std::vector<size_t> sub;
        for (size_t i = 0; i < part.size(); ++i) {
          if (component[i] == c) sub.push_back(part[i]);
        }
        parallel.push_back(Build(sub));
      }
      return Fold(parallel, GlobalType::Both);
    }

    for (size_t cut = 1; cut < part.size(); ++cut) {
      bool ordered = true;
      for (size_t i = 0; i < cut && ordered; ++i) {
        for (size_t j = cut; j < part.size() && ordered; ++j) {
          ordered = before_[part[i]][part[j]];
        }
      }
      if (ordered) {
        std::vector<size_t> head(part.begin(), part.begin() + cut);
        std::vector<size_t> tail(part.begin() + cut, part.end());
        return GlobalType::Seq(Build(head), Build(tail));
      }
    }
    std::vector<GlobalType> kept;
    for (size_t i : part) kept.push_back(blocks_[i]);
    return Fold(kept, GlobalType::Seq);
  }

  std::vector<GlobalType> blocks_;
  std::vector<std::vector<bool>> before_;
  std::vector<std::vector<bool>> linked_;
};

}  // namespace

GlobalType RelaxSequences(const GlobalType& g) {
  switch (g.kind()) {
    case GlobalKind::kSkip:
    case GlobalKind::kAction:
    case GlobalKind::kKExit:
      return g;
    case GlobalKind::kSeq: {
      std::vector<GlobalType> blocks;
      FlattenSeq(g, blocks);
      for (GlobalType& b : blocks) b = RelaxSequences(b);
      return ChainRelaxer(std::move(blocks)).Relax();
    }
    case GlobalKind::kBoth:
      return GlobalType::Both(RelaxSequences(g.left()),
                              RelaxSequences(g.right()));
    case GlobalKind::kEither:
      return GlobalType::Either(RelaxSequences(g.left()),
                                RelaxSequences(g.right()));
    case GlobalKind::kStar:
      return GlobalType::Star(RelaxSequences(g.body()));
  }
  return g;
}

namespace {

std::optional<SessionEnv> TryProject(const GlobalType& g,
                                     const SessionEnv& cont,
                                     ProjectionMode mode) {
  try {
    return ProjectAlg(g, cont, ProjectOptions{mode});
  } catch (const ProjectionError&) {
    return std::nullopt;
  }
}

void FlattenEither(const GlobalType& g, std::vector<GlobalType>& out) {
  if (g.kind() == GlobalKind::kEither) {
    FlattenEither(g.left(), out);
    FlattenEither(g.right(), out);
  } else {
    out.push_back(g);
  }
}

constexpr size_t kCandidateCap = 64;

// Environments built from and-free variants of g: whole-variant
// projections that join differing roles without a decision maker, then
// projections of single branches of a leading alternative.
std::vector<SessionEnv> CandidateEnvironments(const GlobalType& g,
                                              int budget) {
  SessionEnv cont = AllEnd(g);
  std::vector<GlobalType> variants =
      EliminateAnd(g, std::min<int>(budget, kCandidateCap));
  std::vector<SessionEnv> out;
  std::set<std::string> seen;
  auto add = [&](std::optional<SessionEnv> d) {
    if (!d || out.size() >= kCandidateCap) return;
    std::string key;
    for (const auto& [role, t] : *d) {
      key += role.name + ":" + PrintSessionType(t) + ";";
    }
    if (seen.insert(key).second) out.push_back(std::move(*d));
  };
  for (const GlobalType& v : variants) {
    add(TryProject(v, cont, ProjectionMode::kLenient));
    add(TryProject(v, cont, ProjectionMode::kOblivious));
  }
  for (const GlobalType& v : variants) {
    std::vector<GlobalType> branches;
    FlattenEither(v, branches);
    if (branches.size() < 2) continue;
    for (const GlobalType& b : branches) {
      add(TryProject(b, cont, ProjectionMode::kAlgorithmic));
    }
  }
  return out;
}

}  // namespace

Classification Classify(const GlobalType& g, Bounds bounds) {
  bounds = ResolveBounds(g, bounds);
  Classification result;
  bool wf = WellFormed(g).well_formed;

  std::optional<SessionEnv> projected;
  try {
    projected = ProjectTop(g, bounds.budget);
  } catch (const ProjectionError&) {
  }
  if (wf && projected) {
    result.category = FlawCategory::kProjectable;
    result.reason = "well formed and projectable";
    result.environment = projected;
    return result;
  }

  if (!wf) {
    GlobalType relaxed = RelaxSequences(g);
    if (!(relaxed == g) && WellFormed(relaxed).well_formed) {
      try {
        result.environment = ProjectTop(relaxed, bounds.budget);
        result.category = FlawCategory::kNoSequentiality;
        result.reason = "projectable once some sequences run in parallel";
        result.relaxed = relaxed;
        return result;
      } catch (const ProjectionError&) {
      }
    }
  }

  TraceAutomaton language = CompileTraces(g);
  std::optional<SessionEnv> complete_env;
  for (const SessionEnv& d : CandidateEnvironments(g, bounds.budget)) {
    if (!CheckComplete(g, d, bounds.max_len, bounds.buf_bound).complete) {
      continue;
    }
    if (!complete_env) complete_env = d;
    bool fits = true;
    for (const Trace& t : SessionTraces(d, bounds.max_len, bounds.buf_bound)) {
      std::optional<bool> in = InSwapClosure(language, t);
      if (!in.value_or(false)) {
        fits = false;
        break;
      }
    }
    if (fits) {
      result.category = FlawCategory::kUnclassified;
      result.reason =
          "an environment fits up to reordering; the projection rules are "
          "too strict for this type";
      result.environment = d;
      return result;
    }
  }

  if (complete_env) {
    result.environment = complete_env;
    if (wf) {
      result.category = FlawCategory::kNoKnowledgeForChoice;
      result.reason = "every complete environment also admits traces "
                      "from the wrong branch";
    } else {
      result.category = FlawCategory::kUnclassified;
      result.reason = "not well formed and no relaxation projects";
    }
    return result;
  }
  result.category = FlawCategory::kNoKnowledgeNoChoice;
  result.reason = "no candidate environment covers every branch";
  return result;
}

namespace {

class RandomBuilder {
 public:
  RandomBuilder(uint64_t seed, const RandomOptions& options)
      : rng_(seed), options_(options) {}

  GlobalType Build(int size, int star_depth) {
    if (size <= 1) {
      return Below(10) == 0 ? GlobalType::Skip() : RandomAction();
    }
    std::vector<GlobalKind> kinds;
    if (size >= 3) {
      kinds = {GlobalKind::kSeq, GlobalKind::kSeq, GlobalKind::kBoth,
               GlobalKind::kEither, GlobalKind::kEither};
    }
    if (star_depth > 0) kinds.push_back(GlobalKind::kStar);
    if (kinds.empty()) return RandomAction();
    GlobalKind kind = kinds[Below(kinds.size())];
    if (kind == GlobalKind::kStar) {
      GlobalType body = Build(size - 1, star_depth - 1);
      if (CountInteractions(body) == 0) body = RandomAction();
      return GlobalType::Star(body);
    }
    int left_size = 1 + static_cast<int>(Below(size - 2));
    GlobalType left = Build(left_size, star_depth);
    GlobalType right = Build(size - 1 - left_size, star_depth);
    switch (kind) {
      case GlobalKind::kSeq:
        return GlobalType::Seq(left, right);
      case GlobalKind::kBoth:
        return GlobalType::Both(left, right);
      default:
        return GlobalType::Either(left, right);
    }
  }

  uint64_t Below(uint64_t n) { return rng_() % n; }

 private:
  Role RoleName(uint64_t i) { return Role("r" + std::to_string(i)); }

  GlobalType RandomAction() {
    uint64_t n = options_.role_count;
    uint64_t receiver = Below(n);
    uint64_t sender = (receiver + 1 + Below(n - 1)) % n;
    std::set<Role> senders{RoleName(sender)};
    if (n >= 3 && Below(10) == 0) {
      uint64_t other = (receiver + 1 + Below(n - 1)) % n;
      senders.insert(RoleName(other));
    }
    return GlobalType::Action(
        Interaction::Make(senders, RoleName(receiver),
                          MessageType(Below(2) ? "b" : "a")));
  }

  std::mt19937_64 rng_;
  RandomOptions options_;
};

}  // namespace

GlobalType RandomGlobalType(uint64_t seed, const RandomOptions& options) {
  if (options.max_size < 1) throw std::invalid_argument("max_size must be >= 1");
  if (options.role_count < 2) {
    throw std::invalid_argument("role_count must be >= 2");
  }
  RandomBuilder builder(seed, options);
  int size = 1 + static_cast<int>(builder.Below(options.max_size));
  return builder.Build(size, options.star_depth);
}

namespace {

enum class Outcome { kIllFormed, kRejected, kPassed, kSkipped, kViolation };

Outcome CheckSample(const GlobalType& g, const Bounds& bounds,
                    std::string& detail) {
  try {
    if (!WellFormed(g).well_formed) return Outcome::kIllFormed;
    SessionEnv d;
    try {
      d = ProjectTop(g, bounds.budget);
    } catch (const ProjectionError&) {
      return Outcome::kRejected;
    }
    Bounds b = ResolveBounds(g, bounds);
    LivenessVerdict live = IsLive(d, b.buf_bound, b.depth_bound);
    ConformanceReport report = CheckPreorder(g, d, b);
    if (live.tag != LivenessVerdict::Tag::kNotLive && report.ok()) {
      return Outcome::kPassed;
    }
    detail = PrintGlobalType(g) + ":";
    if (live.tag == LivenessVerdict::Tag::kNotLive) detail += " not live";
    if (!report.sound) {
      detail += " unsound (" + ToString(*report.counterexample) + ")";
    }
    if (!report.complete) {
      detail += " incomplete (" + ToString(*report.missing) + ")";
    }
    return Outcome::kViolation;
  } catch (const BudgetExceededError&) {
    return Outcome::kSkipped;
  }
}

}  // namespace

CrossCheckSummary CrossCheckTheorems(int sample_count, uint64_t seed,
                                     const RandomOptions& options,
                                     const Bounds& bounds) {
  if (sample_count < 1) {
    throw std::invalid_argument("sample_count must be >= 1");
  }
  CrossCheckSummary summary;
  auto record = [&](const GlobalType& g) {
    std::string detail;
    ++summary.samples;
    switch (CheckSample(g, bounds, detail)) {
      case Outcome::kIllFormed:
        ++summary.ill_formed;
        break;
      case Outcome::kRejected:
        ++summary.rejected;
        break;
      case Outcome::kPassed:
        ++summary.projectable;
        break;
      case Outcome::kSkipped:
        ++summary.skipped;
        break;
      case Outcome::kViolation:
        ++summary.projectable;
        ++summary.violations;
        summary.details.push_back(detail);
        break;
    }
  };

  GlobalType loop = ParseGlobalType(
      "(seller -> buyer : descr & seller -> buyer : price) ; "
      "(buyer -> seller : offer ; seller -> buyer : price)* ; "
      "(buyer -> seller : accept | buyer -> seller : quit)");
  std::string detail;
  if (CheckSample(loop, bounds, detail) != Outcome::kPassed) {
    ++summary.violations;
    summary.details.push_back("pinned loop sample failed: " + detail);
  }
  GlobalType unmergeable = ParseGlobalType(
      "(p -> r : a ; r -> p : a ; p -> q : a ; q -> r : b) | "
      "(p -> q : b ; q -> r : b)");
  if (CheckSample(unmergeable, bounds, detail) != Outcome::kRejected) {
    ++summary.violations;
    summary.details.push_back("pinned unmergeable sample was not rejected");
  }

  for (int i = 0; i < sample_count; ++i) {
    record(RandomGlobalType(seed + static_cast<uint64_t>(i), options));
  }
  return summary;
}

}  // namespace mpst
