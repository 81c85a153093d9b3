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

#include <gtest/gtest.h>

#include "mpst/errors.h"
#include "mpst/global_type.h"
#include "mpst/session_type.h"

namespace mpst {
namespace {

GlobalType Act(const char* p, const char* q, const char* a) {
  return GlobalType::Action(Interaction::Make(p, q, a));
}

TEST(GlobalSyntax, ParsesSequence) {
  GlobalType g = ParseGlobalType("p -> q : a ; q -> p : b");
  EXPECT_EQ(g, GlobalType::Seq(Act("p", "q", "a"), Act("q", "p", "b")));
}

TEST(GlobalSyntax, Precedence) {
  GlobalType g = ParseGlobalType(
      "seller -> buyer : descr & seller -> buyer : price ; "
      "(buyer -> seller : accept | buyer -> seller : quit)");
  GlobalType expected = GlobalType::Both(
      Act("seller", "buyer", "descr"),
      GlobalType::Seq(Act("seller", "buyer", "price"),
                      GlobalType::Either(Act("buyer", "seller", "accept"),
                                         Act("buyer", "seller", "quit"))));
  EXPECT_EQ(g, expected);

  GlobalType h = ParseGlobalType("p->q:a | p->q:b & r->s:c ; r->s:d*");
  EXPECT_EQ(h, GlobalType::Either(
                   Act("p", "q", "a"),
                   GlobalType::Both(Act("p", "q", "b"),
                                    GlobalType::Seq(Act("r", "s", "c"),
                                                    GlobalType::Star(
                                                        Act("r", "s", "d"))))));
}

TEST(GlobalSyntax, OptionalSugar) {
  EXPECT_EQ(ParseGlobalType("(p -> q : a)?"),
            GlobalType::Either(Act("p", "q", "a"), GlobalType::Skip()));
}

TEST(GlobalSyntax, MultiSenderAndLoop) {
  GlobalType g = ParseGlobalType(
      "loop2 (p -> q : h, q -> p : h) exit ({p,r} -> q : b, skip)");
  ASSERT_EQ(g.kind(), GlobalKind::kKExit);
  EXPECT_EQ(g.bodies().size(), 2u);
  EXPECT_EQ(g.exits()[0].interaction().senders.size(), 2u);
  EXPECT_EQ(g.exits()[1].kind(), GlobalKind::kSkip);
}

TEST(GlobalSyntax, Errors) {
  EXPECT_THROW(ParseGlobalType("p -> p : a"), SelfMessageError);
  EXPECT_THROW(ParseGlobalType("{p,q} -> q : a"), SelfMessageError);
  EXPECT_THROW(ParseGlobalType("p -> q"), SyntaxError);
  EXPECT_THROW(ParseGlobalType("p -> q : a ;"), SyntaxError);
  EXPECT_THROW(ParseGlobalType("loop2 (p->q:a) exit (skip)"), SyntaxError);
  try {
    ParseGlobalType("p -> q : a\n  ; )");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 5);
  }
}

TEST(GlobalSyntax, Comments) {
  EXPECT_EQ(ParseGlobalType("// header\np -> q : a // trailing\n"),
            Act("p", "q", "a"));
}

TEST(GlobalSyntax, Printing) {
  EXPECT_EQ(PrintGlobalType(GlobalType::Skip()), "skip");
  EXPECT_EQ(PrintGlobalType(GlobalType::Action(Interaction::Make(
                {Role("p"), Role("q")}, Role("r"), MessageType("a")))),
            "{p,q} -> r : a");
  EXPECT_EQ(PrintGlobalType(GlobalType::Star(Act("p", "q", "a"))),
            "(p -> q : a)*");
  GlobalType right_nested = GlobalType::Seq(
      Act("p", "q", "a"), GlobalType::Seq(Act("p", "q", "b"),
                                          Act("p", "q", "c")));
  EXPECT_EQ(PrintGlobalType(right_nested),
            "p -> q : a ; (p -> q : b ; p -> q : c)");
}

TEST(GlobalSyntax, RoundTrip) {
  const char* cases[] = {
      "p -> q : a",
      "(p -> q : a | q -> p : b) & r -> s : c ; (skip)*",
      "loop2 (p -> q : h, q -> p : h) exit (p -> q : b, q -> p : b) ; "
      "p -> q : z",
      "((p -> q : a ; (p -> q : b)*))* ; p -> q : c",
      "{a,b} -> c : m | skip | skip",
  };
  for (const char* text : cases) {
    GlobalType g = ParseGlobalType(text);
    EXPECT_EQ(ParseGlobalType(PrintGlobalType(g)), g) << text;
  }
}

TEST(GlobalSyntax, Roles) {
  EXPECT_TRUE(RolesOf(GlobalType::Skip()).empty());
  GlobalType seller_buyer = ParseGlobalType(
      "(seller -> buyer : descr & seller -> buyer : price) ; "
      "(buyer -> seller : accept | buyer -> seller : quit)");
  EXPECT_EQ(RolesOf(seller_buyer),
            (std::set<Role>{Role("seller"), Role("buyer")}));
  EXPECT_EQ(RolesOf(ParseGlobalType("p -> q : a & r -> s : b")),
            (std::set<Role>{Role("p"), Role("q"), Role("r"), Role("s")}));
  EXPECT_EQ(CountInteractions(seller_buyer), 4);
}

TEST(SessionSyntax, ParsesEnv) {
  SessionEnv env = ParseSessionEnv("p : q!a.end  q : p?a.end");
  ASSERT_EQ(env.size(), 2u);
  EXPECT_EQ(env.at(Role("p")),
            SessionType::Out(Role("q"), MessageType("a"), SessionType::End()));
  EXPECT_EQ(env.at(Role("q")),
            SessionType::In({Role("p")}, MessageType("a"), SessionType::End()));
}

TEST(SessionSyntax, ParsesRecursion) {
  SessionEnv env = ParseSessionEnv("p : rec X . (q!a.X (+) q!b.end)");
  SessionType expected = SessionType::Rec(
      "X", SessionType::Internal(
               {SessionType::Out(Role("q"), MessageType("a"),
                                 SessionType::Var("X")),
                SessionType::Out(Role("q"), MessageType("b"),
                                 SessionType::End())}));
  EXPECT_EQ(env.at(Role("p")), expected);
}

TEST(SessionSyntax, Errors) {
  EXPECT_THROW(ParseSessionEnv("p : rec X . X"), UnguardedRecursionError);
  EXPECT_THROW(ParseSessionEnv("p : rec X . (q!a.end (+) X)"),
               UnguardedRecursionError);
  EXPECT_THROW(ParseSessionEnv("p : end q : end p : end"),
               DuplicateRoleError);
  EXPECT_THROW(ParseSessionEnv("p : q!a.end (+) q?a.end"),
               NotSessionTypeError);
  EXPECT_THROW(ParseSessionEnv("p : q?a.end + {q,r}?a.end"),
               NotSessionTypeError);
  EXPECT_THROW(ParseSessionEnv("p : q!a.end (+) q!b.end + q!c.end"),
               SyntaxError);
  EXPECT_THROW(ParseSessionEnv("p : q!a.Y"), SyntaxError);
  EXPECT_THROW(ParseSessionEnv("p : p!a.end"), SelfMessageError);
}

TEST(SessionSyntax, PrintRoundTrip) {
  const char* cases[] = {
      "rec X . (q!a.X (+) q!b.end)",
      "{p,q}?a.(r!b.end (+) r!c.end)",
      "p?a.p?b.end + p?b.end",
      "rec X . q!a.rec Y . (p?b.Y + p?c.X)",
  };
  for (const char* text : cases) {
    SessionType t = ParseSessionType(text);
    EXPECT_EQ(ParseSessionType(PrintSessionType(t)), t) << text;
  }
}

SessionType N(const char* text) {
  return NormalizeSessionType(ParseSessionType(text));
}

TEST(Normalize, Idempotence) {
  SessionType t = SessionType::Internal(
      {SessionType::Out(Role("q"), MessageType("a"), SessionType::End()),
       SessionType::Out(Role("q"), MessageType("a"), SessionType::End())});
  EXPECT_EQ(NormalizeSessionType(t),
            SessionType::Out(Role("q"), MessageType("a"), SessionType::End()));
}

TEST(Normalize, OutputDistribution) {
  EXPECT_EQ(N("q!a.r!b.end (+) q!a.r!c.end"), N("q!a.(r!b.end (+) r!c.end)"));
  EXPECT_EQ(PrintSessionType(N("q!a.r!b.end (+) q!a.r!c.end")),
            "q!a.(r!b.end (+) r!c.end)");
}

TEST(Normalize, InputDistribution) {
  // p?a.end + p?a.q!b.end fuses into p?a.(end + q!b.end), which mixes end
  // and an output.
  EXPECT_THROW(N("p?a.end + p?a.q!b.end"), NotSessionTypeError);
  EXPECT_EQ(PrintSessionType(N("p?a.q?b.end + p?a.q?c.end")),
            "p?a.(q?b.end + q?c.end)");
}

TEST(Normalize, SortsAndRenames) {
  EXPECT_EQ(PrintSessionType(N("rec Foo . (q!b.end (+) q!a.Foo)")),
            "rec X . (q!a.X (+) q!b.end)");
  EXPECT_EQ(N("q!b.end (+) q!a.end"), N("q!a.end (+) q!b.end"));
  EXPECT_EQ(PrintSessionType(N("r?x.end + {q,p}?y.end + p?z.end")),
            "p?z.end + {p,q}?y.end + r?x.end");
}

TEST(Normalize, FoldUnfold) {
  SessionType t = ParseSessionType("rec X . (q!a.X (+) q!b.end)");
  SessionType unfolded = Substitute(t.body(), "X", t);
  EXPECT_TRUE(EquivalentSessionTypes(t, unfolded));
  EXPECT_TRUE(EquivalentSessionTypes(
      t, ParseSessionType("q!a.rec Y . (q!a.Y (+) q!b.end) (+) q!b.end")));
  EXPECT_FALSE(EquivalentSessionTypes(
      t, ParseSessionType("rec X . (q!a.q!a.X (+) q!b.end)")));
  // Redundant nesting collapses to the minimal loop.
  EXPECT_EQ(N("rec X . q!a.rec Y . q!a.X"), N("rec Z . q!a.Z"));
}

TEST(Normalize, IdempotentAndPermutationInvariant) {
  const char* cases[] = {
      "rec X . (q!a.X (+) q!b.end)",
      "p?a.(q!b.end (+) q!c.end) + p?b.end",
      "rec X . p?a.rec Y . (q!b.Y (+) q!c.X)",
  };
  for (const char* text : cases) {
    SessionType n = N(text);
    EXPECT_EQ(NormalizeSessionType(n), n);
  }
  EXPECT_EQ(N("p?a.(q!b.end (+) q!c.end) + p?b.end"),
            N("p?b.end + p?a.(q!c.end (+) q!b.end)"));
}

TEST(Normalize, FreeVariablesStay) {
  SessionType t = SessionType::Out(Role("q"), MessageType("a"),
                                   SessionType::Var("X"));
  EXPECT_EQ(NormalizeSessionType(t), t);
  EXPECT_EQ(PrintSessionType(NormalizeSessionType(SessionType::Rec(
                "V", SessionType::Out(Role("q"), MessageType("a"),
                                      SessionType::Internal(
                                          {SessionType::Var("V"),
                                           SessionType::Out(
                                               Role("q"), MessageType("b"),
                                               SessionType::Var("X"))}))))),
            "q!a.rec Y . (q!a.Y (+) q!b.X)");
}

}  // namespace
}  // namespace mpst
