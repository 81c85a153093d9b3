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

#include <gtest/gtest.h>

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
constexpr char kNegotiation[] =
    "loop2 (p -> q : handover, q -> p : handover) "
    "exit (p -> q : bailout, q -> p : bailout)";

SessionType T(const char* text) { return ParseSessionType(text); }
SessionEnv Env(const char* text) { return ParseSessionEnv(text); }
GlobalType G(const char* text) { return ParseGlobalType(text); }

SessionEnv AllEnd(const GlobalType& g) {
  SessionEnv cont;
  for (const Role& r : RolesOf(g)) cont[r] = SessionType::End();
  return cont;
}

ProjectionErrorKind FailureOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const ProjectionError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "projection succeeded";
  return ProjectionErrorKind::kAndEliminationExhausted;
}

#define EXPECT_ENV(actual, expected) \
  EXPECT_TRUE(EquivalentSessionEnvs(actual, Env(expected))) \
      << PrintSessionEnv(actual)

TEST(Compatibility, Examples) {
  Role p("p"), q("q");
  MessageType a("a"), b("b");
  EXPECT_TRUE(CompatibleInput({p}, a, T("q?b.end")));
  EXPECT_TRUE(CompatibleInput({p}, b, T("p?a.p?b.end")));
  EXPECT_FALSE(CompatibleInput({q}, b, T("p?a.q?b.end")));
  // Through outputs and recursion.
  EXPECT_FALSE(CompatibleInput({q}, b, T("rec X . (r!c.X (+) r!d.q?b.end)")));
  EXPECT_TRUE(
      CompatibleInput({q}, b, T("rec X . (r!c.X (+) r!d.q?a.q?b.end)")));
  // A set of senders needs one compatible member.
  EXPECT_TRUE(CompatibleInput({p, q}, b, T("p?a.q?b.end")));
}

TEST(Merge, Examples) {
  EXPECT_TRUE(EquivalentSessionTypes(Merge(T("p?a.p?b.end"), T("p?b.end")),
                                     T("p?a.p?b.end + p?b.end")));
  EXPECT_EQ(FailureOf([] { Merge(T("p?a.p!a.q?b.end"), T("q?b.end")); }),
            ProjectionErrorKind::kIncompatibleMerge);
  EXPECT_EQ(FailureOf([] { Merge(T("p?a.q?b.end"), T("q?b.end")); }),
            ProjectionErrorKind::kIncompatibleMerge);
  EXPECT_EQ(FailureOf([] { Merge(T("q!a.end"), T("q!b.end")); }),
            ProjectionErrorKind::kIncompatibleMerge);
  EXPECT_EQ(FailureOf([] { Merge(T("q!a.end"), T("end")); }),
            ProjectionErrorKind::kIncompatibleMerge);
  EXPECT_TRUE(EquivalentSessionTypes(
      Merge(T("q!a.(p?a.end)"), T("q!a.(p?b.end)")),
      T("q!a.(p?a.end + p?b.end)")));
}

TEST(Merge, IdempotentAndCommutative) {
  oracle::SessionGenerator gen(3);
  int merged = 0;
  for (int i = 0; i < 300; ++i) {
    SessionType t = NormalizeSessionType(gen.Next(4));
    SessionType s = NormalizeSessionType(gen.Next(4));
    EXPECT_EQ(Merge(t, t), t) << PrintSessionType(t);
    std::optional<SessionType> ts, st;
    try {
      ts = Merge(t, s);
    } catch (const ProjectionError&) {
    }
    try {
      st = Merge(s, t);
    } catch (const ProjectionError&) {
    }
    ASSERT_EQ(ts.has_value(), st.has_value())
        << PrintSessionType(t) << " / " << PrintSessionType(s);
    if (ts) {
      ++merged;
      EXPECT_EQ(*ts, *st);
    }
  }
  EXPECT_GT(merged, 20);
}

TEST(Merge, Environments) {
  SessionEnv d = Env("p : q!a.end  q : p?a.end");
  EXPECT_EQ(MergeEnv(d, d), NormalizeSessionEnv(d));

  SessionEnv d1 = Env("q : p?a.r?c.end  r : q!c.end");
  SessionEnv d2 = Env("q : p?b.r?c.end  r : q!c.end");
  EXPECT_ENV(MergeEnv(d1, d2),
             "q : p?a.r?c.end + p?b.r?c.end  r : q!c.end");

  SessionEnv e1 = Env("q : p?a.r!b.end  r : q?b.end");
  SessionEnv e2 = Env("q : p?c.p!d.r!b.end  r : p?e.q?b.end");
  try {
    MergeEnv(e1, e2);
    FAIL();
  } catch (const ProjectionError& e) {
    EXPECT_EQ(e.kind(), ProjectionErrorKind::kIncompatibleMerge);
    ASSERT_TRUE(e.role().has_value());
    EXPECT_EQ(e.role()->name, "r");
  }
}

TEST(ProjectAlg, SellerBuyer) {
  GlobalType g = G(
      "seller -> buyer : descr ; seller -> buyer : price ; "
      "(buyer -> seller : accept | buyer -> seller : quit)");
  EXPECT_ENV(ProjectAlg(g, AllEnd(g)),
             "seller : buyer!descr.buyer!price.(buyer?accept.end + "
             "buyer?quit.end)\n"
             "buyer : seller?descr.seller?price.(seller!accept.end (+) "
             "seller!quit.end)");
}

TEST(ProjectAlg, IterationWithExit) {
  GlobalType g = G("(p -> q : a)* ; p -> q : b");
  EXPECT_ENV(ProjectAlg(g, AllEnd(g)),
             "p : rec X . (q!a.X (+) q!b.end)  q : rec Y . (p?a.Y + p?b.end)");
}

TEST(ProjectAlg, JoinNeedsCovertChannel) {
  GlobalType g = G("{p,q} -> r : a | {p,q} -> r : b");
  try {
    ProjectAlg(g, AllEnd(g));
    FAIL();
  } catch (const ProjectionError& e) {
    EXPECT_EQ(e.kind(), ProjectionErrorKind::kNoDecisionMaker);
    ASSERT_TRUE(e.location().has_value());
    EXPECT_EQ(*e.location(), g);
  }
}

TEST(ProjectAlg, Errors) {
  GlobalType both = G("p -> q : a & r -> s : b");
  EXPECT_EQ(FailureOf([&] { ProjectAlg(both, AllEnd(both)); }),
            ProjectionErrorKind::kAndEliminationExhausted);
  GlobalType g = G("p -> q : a");
  EXPECT_EQ(FailureOf([&] { ProjectAlg(g, Env("p : end")); }),
            ProjectionErrorKind::kUnboundContinuation);
  SessionEnv open{{Role("p"), SessionType::Var("X")},
                  {Role("q"), SessionType::End()}};
  EXPECT_EQ(FailureOf([&] { ProjectAlg(g, open); }),
            ProjectionErrorKind::kUnboundContinuation);
  GlobalType mismatch = G("p -> q : a | q -> p : a");
  EXPECT_EQ(FailureOf([&] { ProjectAlg(mismatch, AllEnd(mismatch)); }),
            ProjectionErrorKind::kOutputMismatch);
  // r cannot tell the branches apart but must act differently.
  GlobalType unaware = G("p -> q : a ; q -> r : c | p -> q : b ; r -> q : c");
  EXPECT_EQ(FailureOf([&] { ProjectAlg(unaware, AllEnd(unaware)); }),
            ProjectionErrorKind::kOutputMismatch);
  GlobalType loop = G("({p,q} -> r : a)* ; r -> p : b");
  EXPECT_EQ(FailureOf([&] { ProjectAlg(loop, AllEnd(loop)); }),
            ProjectionErrorKind::kNoDecisionMaker);
  GlobalType merge = G(
      "(p -> r : a ; r -> p : a ; p -> q : a ; q -> r : b) | "
      "(p -> q : b ; q -> r : b)");
  EXPECT_EQ(FailureOf([&] { ProjectAlg(merge, AllEnd(merge)); }),
            ProjectionErrorKind::kIncompatibleMerge);
}

TEST(ProjectAlg, NoDecisionMakerOnlyAtDecisionNodes) {
  oracle::Generator gen(8);
  int failures = 0;
  for (int i = 0; i < 400; ++i) {
    GlobalType g = gen.Next(2 + i % 8);
    if (ContainsBoth(g)) continue;
    try {
      ProjectAlg(g, AllEnd(g));
    } catch (const ProjectionError& e) {
      if (e.kind() != ProjectionErrorKind::kNoDecisionMaker) continue;
      ++failures;
      ASSERT_TRUE(e.location().has_value());
      GlobalKind k = e.location()->kind();
      EXPECT_TRUE(k == GlobalKind::kEither || k == GlobalKind::kStar ||
                  k == GlobalKind::kKExit)
          << PrintGlobalType(g);
    }
  }
  EXPECT_GT(failures, 10);
}

TEST(ProjectAlg, NestedIterationNeedsRichContinuation) {
  GlobalType g = G("(p -> q : a ; (p -> q : b)*)* ; p -> q : c");
  EXPECT_ENV(ProjectAlg(g, AllEnd(g)),
             "p : q!a.rec X . (q!a.X (+) q!b.X (+) q!c.end) (+) q!c.end\n"
             "q : p?a.rec X . (p?a.X + p?b.X + p?c.end) + p?c.end");

  // r needs a recursive continuation here, and it could read c from q
  // before a from p, so the merge is rejected.
  GlobalType h = G(
      "(p -> q : a ; p -> r : a ; (p -> q : b)*)* ; p -> q : c ; "
      "q -> r : c");
  try {
    ProjectAlg(h, AllEnd(h));
    FAIL();
  } catch (const ProjectionError& e) {
    EXPECT_EQ(e.kind(), ProjectionErrorKind::kIncompatibleMerge);
    EXPECT_EQ(e.role(), Role("r"));
  }
}

TEST(ProjectAlg, ContinuationWithOutputs) {
  // Only one interleaving of the two parts is projectable from this
  // continuation.
  GlobalType g = G(
      "r -> s : g ; "
      "((p -> q : a ; q -> s : c ; s -> q : e) | "
      " (p -> r : b ; r -> s : d ; s -> r : f)) ; "
      "s -> r : h ; s -> q : i");
  SessionEnv cont = Env("p : end  q : p!a.end  r : p!b.end  s : end");
  SessionEnv d = ProjectAlg(g, cont);
  EXPECT_TRUE(EquivalentSessionTypes(
      d.at(Role("p")), T("q!a.end (+) r!b.end")));
}

TEST(ProjectKExit, Negotiation) {
  GlobalType g = G(kNegotiation);
  SessionEnv expected = Env(
      "p : rec X . (q!handover.(q?handover.X + q?bailout.end) (+) "
      "q!bailout.end)\n"
      "q : rec Y . (p?handover.(p!handover.Y (+) p!bailout.end) + "
      "p?bailout.end)");
  EXPECT_ENV(ProjectKExit(g.bodies(), g.exits(), AllEnd(g)),
             PrintSessionEnv(expected).c_str());
  EXPECT_ENV(ProjectAlg(g, AllEnd(g)), PrintSessionEnv(expected).c_str());
}

TEST(ProjectKExit, SingleExitIsIteration) {
  const char* bodies[] = {"p -> q : a", "p -> q : a ; q -> r : b",
                          "p -> q : a ; (q -> p : b | q -> p : c)"};
  for (const char* body : bodies) {
    GlobalType b = G(body);
    GlobalType star = GlobalType::Seq(GlobalType::Star(b), G("p -> q : z"));
    SessionEnv cont = Env("p : q!z.end  q : p?z.r!z.end  r : q?z.end");
    SessionEnv via_star = ProjectAlg(GlobalType::Star(b), cont);
    SessionEnv via_loop = ProjectKExit({b}, {GlobalType::Skip()}, cont);
    EXPECT_TRUE(EquivalentSessionEnvs(via_star, via_loop)) << body;
  }
}

TEST(ProjectKExit, TwoDecidersFail) {
  GlobalType g = G(
      "loop2 ({p,q} -> r : a, r -> p : b) exit (r -> p : c, r -> p : d)");
  EXPECT_EQ(FailureOf([&] { ProjectKExit(g.bodies(), g.exits(), AllEnd(g)); }),
            ProjectionErrorKind::kNoDecisionMaker);
}

TEST(EliminateAnd, Serializations) {
  std::vector<GlobalType> c = EliminateAnd(G("p -> q : a & r -> s : b"));
  auto has = [&](const char* text) {
    std::string key = LanguageKey(CompileTraces(G(text)));
    for (const GlobalType& x : c) {
      if (LanguageKey(CompileTraces(x)) == key) return true;
    }
    return false;
  };
  EXPECT_TRUE(has("p -> q : a ; r -> s : b"));
  EXPECT_TRUE(has("r -> s : b ; p -> q : a"));
  for (const GlobalType& x : c) EXPECT_FALSE(ContainsBoth(x));
}

TEST(EliminateAnd, RewriteRules) {
  std::vector<GlobalType> c =
      EliminateAnd(G("(p -> q : a ; p -> q : b) & r -> s : c"));
  std::set<std::string> keys;
  for (const GlobalType& x : c) keys.insert(LanguageKey(CompileTraces(x)));
  EXPECT_TRUE(keys.count(LanguageKey(
      CompileTraces(G("p -> q : a ; r -> s : c ; p -> q : b")))));
  EXPECT_EQ(keys.size(), c.size());

  std::vector<GlobalType> s = EliminateAnd(G("(p -> q : a)* & r -> s : c"));
  std::set<std::string> star_keys;
  for (const GlobalType& x : s) star_keys.insert(LanguageKey(CompileTraces(x)));
  EXPECT_TRUE(star_keys.count(LanguageKey(CompileTraces(
      G("(p -> q : a ; r -> s : c) ; (p -> q : a)* | r -> s : c")))));
  EXPECT_TRUE(star_keys.count(LanguageKey(CompileTraces(
      G("(p -> q : a)* ; (p -> q : a ; r -> s : c) | r -> s : c")))));
}

TEST(EliminateAnd, CandidatesAreContained) {
  oracle::Generator gen(41);
  for (int i = 0; i < 60; ++i) {
    GlobalType g = gen.Next(3 + i % 6);
    TraceAutomaton a = CompileTraces(g);
    std::vector<GlobalType> c = EliminateAnd(g, 32);
    EXPECT_LE(c.size(), 32u);
    for (const GlobalType& x : c) {
      EXPECT_FALSE(ContainsBoth(x));
      EXPECT_TRUE(Includes(a, CompileTraces(x)).included)
          << PrintGlobalType(g) << " => " << PrintGlobalType(x);
    }
  }
}

TEST(ProjectTop, Examples) {
  EXPECT_ENV(ProjectTop(G("p -> q : a & r -> s : b")),
             "p : q!a.end  q : p?a.end  r : s!b.end  s : r?b.end");
  EXPECT_ENV(ProjectTop(G(kSellerBuyer)),
             "seller : buyer!descr.buyer!price.(buyer?accept.end + "
             "buyer?quit.end)\n"
             "buyer : seller?descr.seller?price.(seller!accept.end (+) "
             "seller!quit.end)");
  SessionEnv d2 = ProjectTop(G(kSellerBuyerLoop));
  EXPECT_EQ(d2.size(), 2u);
  EXPECT_ANY_THROW(ProjectTop(G("p -> q : a | q -> p : a")));
}

TEST(ProjectTop, FactorsCommonPrefixes) {
  GlobalType g = G("p -> q : a ; q -> r : b | p -> q : a ; q -> r : c");
  EXPECT_EQ(FailureOf([&] { ProjectAlg(g, AllEnd(g)); }),
            ProjectionErrorKind::kNoDecisionMaker);
  EXPECT_ENV(ProjectTop(g),
             "p : q!a.end  q : p?a.(r!b.end (+) r!c.end)  "
             "r : q?b.end + q?c.end");
}

TEST(ProjectTop, ErrorKinds) {
  GlobalType plain = G("p -> q : a | q -> p : a");
  EXPECT_EQ(FailureOf([&] { ProjectTop(plain); }),
            ProjectionErrorKind::kOutputMismatch);
  try {
    ProjectTop(G("(p -> q : a | q -> p : a) & r -> s : b"));
    FAIL();
  } catch (const ProjectionError& e) {
    EXPECT_EQ(e.kind(), ProjectionErrorKind::kAndEliminationExhausted);
    EXPECT_TRUE(e.underlying().has_value());
  }
}

TEST(ProjectionModes, ObliviousForgetsTheBranch) {
  GlobalType g = G(
      "(p -> q : a ; q -> r : a ; r -> p : a) | "
      "(p -> q : b ; q -> r : a ; r -> p : b)");
  EXPECT_EQ(FailureOf([&] { ProjectTop(g); }),
            ProjectionErrorKind::kIncompatibleMerge);
  ProjectOptions oblivious{ProjectionMode::kOblivious};
  EXPECT_ENV(ProjectTop(g, kDefaultAndBudget, oblivious),
             "p : q!a.(r?a.end + r?b.end) (+) q!b.(r?a.end + r?b.end)\n"
             "q : p?a.r!a.end + p?b.r!a.end\n"
             "r : q?a.(p!a.end (+) p!b.end)");
  ProjectOptions lenient{ProjectionMode::kLenient};
  GlobalType two = G("p -> q : a ; r -> q : c | p -> q : b ; r -> q : d");
  EXPECT_EQ(FailureOf([&] { ProjectTop(two); }),
            ProjectionErrorKind::kNoDecisionMaker);
  EXPECT_ENV(ProjectTop(two, kDefaultAndBudget, lenient),
             "p : q!a.end (+) q!b.end  q : p?a.r?c.end + p?b.r?d.end  "
             "r : q!c.end (+) q!d.end");
}

}  // namespace
}  // namespace mpst
