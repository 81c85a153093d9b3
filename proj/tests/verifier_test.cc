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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "mpst/errors.h"
#include "mpst/projector.h"
#include "mpst/tracelang.h"
#include "oracles.h"

namespace mpst {
namespace {

constexpr char kSellerBuyer[] =
    "(seller -> buyer : descr & seller -> buyer : price) ; "
    "(buyer -> seller : accept | buyer -> seller : quit)";
constexpr char kSellerBuyerLoop[] =
    "(seller -> buyer : descr & seller -> buyer : price) ; "
    "(buyer -> seller : offer ; seller -> buyer : price)* ; "
    "(buyer -> seller : accept | buyer -> seller : quit)";
constexpr char kThreeRoles[] =
    "(p -> q : a ; q -> r : a ; r -> p : a) | "
    "(p -> q : b ; q -> r : a ; r -> p : b)";
constexpr char kUnmergeable[] =
    "(p -> r : a ; r -> p : a ; p -> q : a ; q -> r : b) | "
    "(p -> q : b ; q -> r : b)";

GlobalType G(const char* text) { return ParseGlobalType(text); }
SessionEnv Env(const char* text) { return ParseSessionEnv(text); }

std::optional<SessionEnv> TryProjectTop(const GlobalType& g) {
  try {
    return ProjectTop(g);
  } catch (const ProjectionError&) {
    return std::nullopt;
  }
}

// Session traces straight from Step, without the liveness filter.
std::set<Trace> TracesByStep(const Config& c, int budget, int buf_bound) {
  std::set<Trace> out;
  if (IsSuccess(c)) out.insert(Trace{});
  for (const Transition& t : Step(c, buf_bound)) {
    if (!t.label) {
      std::set<Trace> rest = TracesByStep(t.next, budget, buf_bound);
      out.insert(rest.begin(), rest.end());
    } else if (budget > 0) {
      for (const Trace& w : TracesByStep(t.next, budget - 1, buf_bound)) {
        Trace v{*t.label};
        v.insert(v.end(), w.begin(), w.end());
        out.insert(v);
      }
    }
  }
  return out;
}

Trace Sorted(Trace t) {
  std::sort(t.begin(), t.end());
  return t;
}

TEST(CheckSound, Examples) {
  SessionEnv d1 = ProjectTop(G(kSellerBuyer));
  EXPECT_TRUE(CheckSound(G(kSellerBuyer), d1, 8).sound);

  GlobalType seq = G("p -> q : a ; r -> s : b");
  SessionEnv split = Env("p : q!a.end  q : p?a.end  r : s!b.end  s : r?b.end");
  SoundnessResult r = CheckSound(seq, split, 4);
  ASSERT_FALSE(r.sound);
  ASSERT_TRUE(r.counterexample);
  EXPECT_EQ(*r.counterexample, ParseTrace("r->s:b  p->q:a"));
  EXPECT_FALSE(Accepts(CompileTraces(seq), *r.counterexample));
  EXPECT_TRUE(SessionTraces(split, 4).count(*r.counterexample));

  // No traces at all.
  SessionEnv stuck = Env("p : rec X . q!a.X  q : rec Y . p?a.Y");
  SoundnessResult vacuous = CheckSound(seq, stuck, 6);
  EXPECT_TRUE(vacuous.sound);
  EXPECT_FALSE(vacuous.counterexample);
}

TEST(CheckComplete, Examples) {
  GlobalType alt = G("p -> q : a | p -> q : b");
  CompletenessResult r = CheckComplete(alt, Env("p : q!a.end  q : p?a.end"), 4);
  EXPECT_FALSE(r.complete);
  ASSERT_TRUE(r.missing);
  EXPECT_EQ(*r.missing, ParseTrace("p->q:b"));

  EXPECT_TRUE(CheckComplete(G(kSellerBuyer), ProjectTop(G(kSellerBuyer)), 8).complete);
  EXPECT_TRUE(CheckComplete(G("skip"), SessionEnv{}, 4).complete);
  EXPECT_TRUE(CheckComplete(G("skip"), Env("p : end"), 4).complete);

  // Reordering is allowed: only the multiset of letters has to match.
  GlobalType seq = G("p -> q : a ; r -> s : b");
  SessionEnv reversed =
      Env("p : q!a.end  q : p?a.end  r : s!b.end  s : r?b.end");
  EXPECT_TRUE(CheckComplete(seq, reversed, 4).complete);

  SessionEnv stuck = Env("p : rec X . q!a.X  q : rec Y . p?a.Y");
  EXPECT_FALSE(CheckComplete(seq, stuck, 4).complete);
}

TEST(CheckComplete, BudgetExceeded) {
  GlobalType g = G("(p -> q : a | p -> q : b | p -> q : c)* ; p -> q : d");
  EXPECT_THROW(CheckComplete(g, ProjectTop(g), 12), BudgetExceededError);
}

TEST(CheckPreorder, Reports) {
  GlobalType g = G(kSellerBuyerLoop);
  ConformanceReport ok = CheckPreorder(g, ProjectTop(g));
  EXPECT_TRUE(ok.ok());
  EXPECT_EQ(ok.max_len, 2 * 6 + 4);
  EXPECT_EQ(ok.buf_bound, kDefaultBufBound);
  EXPECT_EQ(ok.basis, ConformanceReport::Basis::kBounded);

  // The environment that forgets the branch: complete but not sound.
  GlobalType three = G(kThreeRoles);
  SessionEnv oblivious = Env(
      "p : q!a.(r?a.end + r?b.end) (+) q!b.(r?a.end + r?b.end)\n"
      "q : p?a.r!a.end + p?b.r!a.end\n"
      "r : q?a.(p!a.end (+) p!b.end)");
  ConformanceReport bad = CheckPreorder(three, oblivious);
  EXPECT_FALSE(bad.sound);
  EXPECT_TRUE(bad.complete);
  ASSERT_TRUE(bad.counterexample);
  EXPECT_EQ(*bad.counterexample,
            ParseTrace("p->q:a  q->r:a  r->p:b"));

  ConformanceReport custom = CheckPreorder(g, ProjectTop(g), {5, 2});
  EXPECT_EQ(custom.max_len, 5);
  EXPECT_EQ(custom.buf_bound, 2);

  SessionEnv stuck = Env("p : rec X . q!a.X  q : rec Y . p?a.Y");
  ConformanceReport empty = CheckPreorder(g, stuck);
  EXPECT_TRUE(empty.sound);
  EXPECT_FALSE(empty.complete);
}

// Environments are projections of random types, checked against the type
// they come from and against unrelated types.
TEST(CheckPreorder, AgreesWithBruteForce) {
  constexpr int kLen = 6;
  constexpr int kBuf = 2;
  oracle::Generator gen(77, 3);
  std::vector<std::pair<GlobalType, SessionEnv>> projected;
  for (int i = 0; i < 400 && projected.size() < 60; ++i) {
    GlobalType g = gen.Next(1 + i % 6);
    if (std::optional<SessionEnv> d = TryProjectTop(g)) {
      projected.emplace_back(g, *d);
    }
  }
  ASSERT_GE(projected.size(), 40u);

  int compared = 0, unsound = 0, incomplete = 0;
  for (size_t i = 0; i < projected.size(); ++i) {
    for (size_t j : {i, (i + 1) % projected.size(), (i + 7) % projected.size()}) {
      const GlobalType& g = projected[i].first;
      const SessionEnv& d = projected[j].second;
      oracle::TraceSet global = oracle::Traces(g, kLen);
      if (IsLive(d, kBuf).tag != LivenessVerdict::Tag::kLive) continue;
      std::set<Trace> session = TracesByStep(InitialConfig(d), kLen, kBuf);
      if (global.size() > 200 || session.size() > 200) continue;
      ++compared;

      std::vector<Trace> bad;
      for (const Trace& t : session) {
        if (!global.count(t)) bad.push_back(t);
      }
      std::set<Trace> sorted_session;
      for (const Trace& t : session) sorted_session.insert(Sorted(t));
      std::vector<Trace> missing;
      for (const Trace& w : global) {
        if (!sorted_session.count(Sorted(w))) missing.push_back(w);
      }
      auto least = [](std::vector<Trace> v) {
        std::stable_sort(v.begin(), v.end(), [](const Trace& a, const Trace& b) {
          return a.size() < b.size();
        });
        return v.front();
      };

      SoundnessResult s = CheckSound(g, d, kLen, kBuf);
      CompletenessResult c = CheckComplete(g, d, kLen, kBuf);
      std::string where = PrintGlobalType(g) + "\n" + PrintSessionEnv(d);
      ASSERT_EQ(s.sound, bad.empty()) << where;
      ASSERT_EQ(c.complete, missing.empty()) << where;
      if (!bad.empty()) {
        ++unsound;
        EXPECT_EQ(*s.counterexample, least(bad)) << where;
      }
      if (!missing.empty()) {
        ++incomplete;
        EXPECT_EQ(*c.missing, least(missing)) << where;
      }
    }
  }
  EXPECT_GE(compared, 100);
  EXPECT_GE(unsound, 10);
  EXPECT_GE(incomplete, 10);
}

TEST(CheckPreorder, MonotoneInBounds) {
  int checked = 0;
  for (uint64_t seed = 0; seed < 300 && checked < 40; ++seed) {
    GlobalType g = RandomGlobalType(seed, {6, 3, 1});
    if (!WellFormed(g).well_formed) continue;
    std::optional<SessionEnv> d = TryProjectTop(g);
    if (!d) continue;
    ++checked;
    for (int len = 2; len <= 8; len += 3) {
      for (int buf = 1; buf <= 3; ++buf) {
        bool small = CheckSound(g, *d, len, buf).sound;
        bool large = CheckSound(g, *d, len + 2, buf + 1).sound;
        EXPECT_TRUE(!small || large) << PrintGlobalType(g);
      }
    }
  }
  EXPECT_GE(checked, 20);
}

TEST(Classify, Exemplars) {
  Classification seq = Classify(G("p -> q : a ; r -> s : b"));
  EXPECT_EQ(seq.category, FlawCategory::kNoSequentiality);
  ASSERT_TRUE(seq.relaxed);
  EXPECT_EQ(*seq.relaxed, G("p -> q : a & r -> s : b"));

  Classification choice = Classify(G(kThreeRoles));
  EXPECT_EQ(choice.category, FlawCategory::kNoKnowledgeForChoice);
  ASSERT_TRUE(choice.environment);
  EXPECT_TRUE(CheckComplete(G(kThreeRoles), *choice.environment, 8).complete);
  EXPECT_FALSE(CheckSound(G(kThreeRoles), *choice.environment, 8).sound);

  EXPECT_EQ(Classify(G("p -> q : a | q -> p : a")).category,
            FlawCategory::kNoKnowledgeNoChoice);

  Classification ok = Classify(G(kSellerBuyerLoop));
  EXPECT_EQ(ok.category, FlawCategory::kProjectable);
  EXPECT_TRUE(EquivalentSessionEnvs(*ok.environment, ProjectTop(G(kSellerBuyerLoop))));

  // Sound and complete once r may read q's message early, but the merge
  // rule cannot see that.
  Classification merge = Classify(G(kUnmergeable));
  EXPECT_EQ(merge.category, FlawCategory::kUnclassified);
  ASSERT_TRUE(merge.environment);
  EXPECT_TRUE(CheckPreorder(G(kUnmergeable), *merge.environment).ok());
}

TEST(Classify, ProjectableIffWellFormedAndProjects) {
  int projectable = 0;
  for (uint64_t seed = 0; seed < 300; ++seed) {
    GlobalType g = RandomGlobalType(seed, {6, 3, 1});
    bool expected =
        WellFormed(g).well_formed && TryProjectTop(g).has_value();
    Classification c = Classify(g);
    EXPECT_EQ(c.category == FlawCategory::kProjectable, expected)
        << PrintGlobalType(g);
    projectable += expected;
  }
  EXPECT_GE(projectable, 30);
}

TEST(RelaxSequences, Examples) {
  EXPECT_EQ(RelaxSequences(G("p -> q : a ; q -> r : b")),
            G("p -> q : a ; q -> r : b"));
  EXPECT_EQ(RelaxSequences(G("p -> q : a ; r -> s : b ; q -> p : c")),
            G("(p -> q : a ; q -> p : c) & r -> s : b"));
  EXPECT_EQ(RelaxSequences(G("p -> q : a ; r -> s : b ; s -> r : c")),
            G("p -> q : a & (r -> s : b ; s -> r : c)"));
  // An N-shaped dependency stays sequential.
  GlobalType n = G("p -> q : a ; r -> s : b ; s -> q : c ; s -> t : d");
  EXPECT_EQ(RelaxSequences(n), n);
  const char* cases[] = {
      // Only a skippable loop separates the two messages.
      "p -> q : a ; (p -> q : b)* ; r -> s : c",
      "(p -> q : a | p -> q : b) ; r -> s : c",
  };
  for (const char* text : cases) {
    GlobalType g = G(text);
    GlobalType relaxed = RelaxSequences(g);
    EXPECT_TRUE(WellFormed(relaxed).well_formed) << PrintGlobalType(relaxed);
    EXPECT_TRUE(Includes(CompileTraces(relaxed), CompileTraces(g)).included)
        << text;
  }
}

TEST(RandomGlobalType, Deterministic) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(RandomGlobalType(seed), RandomGlobalType(seed));
  }
  std::set<std::string> distinct;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    distinct.insert(PrintGlobalType(RandomGlobalType(seed)));
  }
  EXPECT_GT(distinct.size(), 30u);
  EXPECT_THROW(RandomGlobalType(0, {0, 3, 1}), std::invalid_argument);
}

int StarDepth(const GlobalType& g) {
  switch (g.kind()) {
    case GlobalKind::kSkip:
    case GlobalKind::kAction:
      return 0;
    case GlobalKind::kStar:
      return 1 + StarDepth(g.body());
    case GlobalKind::kKExit:
      return 1;
    default:
      return std::max(StarDepth(g.left()), StarDepth(g.right()));
  }
}

void CollectKinds(const GlobalType& g, std::set<GlobalKind>& kinds) {
  kinds.insert(g.kind());
  switch (g.kind()) {
    case GlobalKind::kSkip:
    case GlobalKind::kAction:
    case GlobalKind::kKExit:
      return;
    case GlobalKind::kStar:
      EXPECT_GT(CountInteractions(g.body()), 0);
      CollectKinds(g.body(), kinds);
      return;
    default:
      CollectKinds(g.left(), kinds);
      CollectKinds(g.right(), kinds);
  }
}

TEST(RandomGlobalType, Shape) {
  std::map<GlobalKind, int> counts;
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    GlobalType g = RandomGlobalType(seed, {8, 4, 1});
    EXPECT_LE(Size(g), 8);
    EXPECT_LE(StarDepth(g), 1);
    std::set<GlobalKind> kinds;
    CollectKinds(g, kinds);
    for (GlobalKind k : kinds) ++counts[k];
    for (const Role& r : RolesOf(g)) {
      EXPECT_TRUE(r.name == "r0" || r.name == "r1" || r.name == "r2" ||
                  r.name == "r3");
    }
  }
  for (GlobalKind k : {GlobalKind::kSkip, GlobalKind::kAction, GlobalKind::kSeq,
                       GlobalKind::kBoth, GlobalKind::kEither,
                       GlobalKind::kStar}) {
    EXPECT_GT(counts[k], 20) << static_cast<int>(k);
  }
  for (uint64_t seed = 0; seed < 200; ++seed) {
    for (const Role& r : RolesOf(RandomGlobalType(seed, {8, 2, 2}))) {
      EXPECT_TRUE(r.name == "r0" || r.name == "r1");
    }
    EXPECT_EQ(StarDepth(RandomGlobalType(seed, {8, 3, 0})), 0);
  }
}

TEST(CrossCheck, NoViolations) {
  CrossCheckSummary s = CrossCheckTheorems(200, 1);
  EXPECT_EQ(s.violations, 0);
  for (const std::string& d : s.details) ADD_FAILURE() << d;
  EXPECT_EQ(s.samples, 200);
  EXPECT_EQ(s.ill_formed + s.rejected + s.projectable + s.skipped, 200);
  EXPECT_GT(s.projectable, 20);

  CrossCheckSummary wide = CrossCheckTheorems(600, 9000, {10, 4, 2});
  EXPECT_EQ(wide.violations, 0);
  for (const std::string& d : wide.details) ADD_FAILURE() << d;
  EXPECT_GT(wide.projectable, 60);
}

TEST(CrossCheck, Counting) {
  EXPECT_THROW(CrossCheckTheorems(0, 1), std::invalid_argument);
  CrossCheckSummary s = CrossCheckTheorems(30, 5);
  EXPECT_EQ(s.samples, 30);
}

}  // namespace
}  // namespace mpst
