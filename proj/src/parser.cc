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

#include <regex>
#include <set>
#include <string>
#include <vector>

#include "lexer.h"
#include "mpst/errors.h"
#include "mpst/global_type.h"
#include "mpst/session_type.h"

namespace mpst {

namespace {

using internal::Tok;
using internal::Token;

class TokenStream {
 public:
  explicit TokenStream(std::string_view text) : tokens_(internal::Lex(text)) {}

  const Token& Peek(size_t ahead = 0) const {
    size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  bool At(Tok kind, size_t ahead = 0) const { return Peek(ahead).kind == kind; }
  bool AtKeyword(const char* word) const {
    return At(Tok::kIdent) && Peek().text == word;
  }
  Token Next() {
    Token t = Peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool Accept(Tok kind) {
    if (!At(kind)) return false;
    Next();
    return true;
  }
  Token Expect(Tok kind, const char* what) {
    if (!At(kind)) Fail(std::string("expected ") + what);
    return Next();
  }
  [[noreturn]] void Fail(const std::string& message) const {
    const Token& t = Peek();
    throw SyntaxError(message + ", found " + internal::Describe(t), t.line,
                      t.column);
  }

 private:
  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

std::set<Role> ParseRoleSet(TokenStream& ts) {
  std::set<Role> roles;
  if (ts.Accept(Tok::kLBrace)) {
    do {
      roles.insert(Role(ts.Expect(Tok::kIdent, "role name").text));
    } while (ts.Accept(Tok::kComma));
    ts.Expect(Tok::kRBrace, "'}'");
  } else {
    roles.insert(Role(ts.Expect(Tok::kIdent, "role name").text));
  }
  return roles;
}

// ---- global types -------------------------------------------------------

class GlobalParser {
 public:
  explicit GlobalParser(std::string_view text) : ts_(text) {}

  GlobalType ParseAll() {
    GlobalType g = ParseEither();
    if (!ts_.At(Tok::kEof)) ts_.Fail("expected end of input");
    return g;
  }

 private:
  GlobalType ParseEither() {
    GlobalType g = ParseBoth();
    while (ts_.Accept(Tok::kBar)) g = GlobalType::Either(g, ParseBoth());
    return g;
  }

  GlobalType ParseBoth() {
    GlobalType g = ParseSeq();
    while (ts_.Accept(Tok::kAmp)) g = GlobalType::Both(g, ParseSeq());
    return g;
  }

  GlobalType ParseSeq() {
    GlobalType g = ParsePostfix();
    while (ts_.Accept(Tok::kSemi)) g = GlobalType::Seq(g, ParsePostfix());
    return g;
  }

  GlobalType ParsePostfix() {
    GlobalType g = ParseAtom();
    while (true) {
      if (ts_.Accept(Tok::kStar)) {
        g = GlobalType::Star(g);
      } else if (ts_.Accept(Tok::kQuestion)) {
        g = GlobalType::Either(g, GlobalType::Skip());
      } else {
        return g;
      }
    }
  }

  std::vector<GlobalType> ParseList() {
    std::vector<GlobalType> items;
    ts_.Expect(Tok::kLParen, "'('");
    do {
      items.push_back(ParseEither());
    } while (ts_.Accept(Tok::kComma));
    ts_.Expect(Tok::kRParen, "')'");
    return items;
  }

  GlobalType ParseAtom() {
    static const std::regex kLoop("loop([0-9]+)");
    if (ts_.AtKeyword("skip")) {
      ts_.Next();
      return GlobalType::Skip();
    }
    std::smatch m;
    if (ts_.At(Tok::kIdent) && ts_.At(Tok::kLParen, 1) &&
        std::regex_match(ts_.Peek().text, m, kLoop)) {
      Token head = ts_.Next();
      size_t k = std::stoul(m[1].str());
      std::vector<GlobalType> bodies = ParseList();
      if (!ts_.AtKeyword("exit")) ts_.Fail("expected 'exit'");
      ts_.Next();
      std::vector<GlobalType> exits = ParseList();
      if (k == 0 || bodies.size() != k || exits.size() != k) {
        throw SyntaxError(head.text + " needs exactly " + m[1].str() +
                              " bodies and exits",
                          head.line, head.column);
      }
      return GlobalType::KExit(std::move(bodies), std::move(exits));
    }
    if (ts_.Accept(Tok::kLParen)) {
      GlobalType g = ParseEither();
      ts_.Expect(Tok::kRParen, "')'");
      return g;
    }
    if (ts_.At(Tok::kIdent) || ts_.At(Tok::kLBrace)) {
      std::set<Role> senders = ParseRoleSet(ts_);
      ts_.Expect(Tok::kArrow, "'->'");
      Role receiver(ts_.Expect(Tok::kIdent, "receiver").text);
      ts_.Expect(Tok::kColon, "':'");
      MessageType message(ts_.Expect(Tok::kIdent, "message").text);
      return GlobalType::Action(
          Interaction::Make(std::move(senders), receiver, message));
    }
    ts_.Fail("expected a global type");
  }

  TokenStream ts_;
};

// ---- session types ------------------------------------------------------

class SessionParser {
 public:
  explicit SessionParser(std::string_view text) : ts_(text) {}

  SessionType ParseTypeAll() {
    SessionType t = ParseType();
    if (!ts_.At(Tok::kEof)) ts_.Fail("expected end of input");
    return t;
  }

  SessionEnv ParseEnvAll() {
    SessionEnv env;
    bool braced = ts_.Accept(Tok::kLBrace);
    while (ts_.At(Tok::kIdent)) {
      Token name = ts_.Next();
      ts_.Expect(Tok::kColon, "':'");
      SessionType t = ParseType();
      Role role(name.text);
      if (!env.emplace(role, t).second) {
        throw DuplicateRoleError("role " + name.text + " bound twice");
      }
      while (ts_.Accept(Tok::kComma) || ts_.Accept(Tok::kSemi)) {
      }
    }
    if (braced) ts_.Expect(Tok::kRBrace, "'}'");
    if (!ts_.At(Tok::kEof)) ts_.Fail("expected a binding 'role : type'");
    return env;
  }

 private:
  SessionType ParseType() {
    SessionType first = ParseUnary();
    if (!ts_.At(Tok::kOplus) && !ts_.At(Tok::kPlus)) return first;
    Tok op = ts_.Peek().kind;
    std::vector<SessionType> branches{first};
    while (ts_.Accept(op)) branches.push_back(ParseUnary());
    if (ts_.At(Tok::kOplus) || ts_.At(Tok::kPlus)) {
      ts_.Fail("'(+)' and '+' cannot be mixed without parentheses");
    }
    return op == Tok::kOplus ? SessionType::Internal(std::move(branches))
                             : SessionType::External(std::move(branches));
  }

  SessionType ParseCont() {
    if (ts_.Accept(Tok::kDot)) return ParseUnary();
    return SessionType::End();
  }

  SessionType ParseUnary() {
    if (ts_.AtKeyword("end")) {
      ts_.Next();
      return SessionType::End();
    }
    if (ts_.AtKeyword("rec")) {
      ts_.Next();
      std::string var = ts_.Expect(Tok::kIdent, "recursion variable").text;
      ts_.Expect(Tok::kDot, "'.'");
      return SessionType::Rec(var, ParseUnary());
    }
    if (ts_.Accept(Tok::kLParen)) {
      SessionType t = ParseType();
      ts_.Expect(Tok::kRParen, "')'");
      return t;
    }
    if (ts_.At(Tok::kIdent) && ts_.At(Tok::kBang, 1)) {
      Role partner(ts_.Next().text);
      ts_.Next();
      MessageType message(ts_.Expect(Tok::kIdent, "message").text);
      return SessionType::Out(partner, message, ParseCont());
    }
    if (ts_.At(Tok::kLBrace) ||
        (ts_.At(Tok::kIdent) && ts_.At(Tok::kQuestion, 1))) {
      std::set<Role> partners = ParseRoleSet(ts_);
      ts_.Expect(Tok::kQuestion, "'?'");
      MessageType message(ts_.Expect(Tok::kIdent, "message").text);
      return SessionType::In(std::move(partners), message, ParseCont());
    }
    if (ts_.At(Tok::kIdent) && !ts_.At(Tok::kColon, 1)) {
      return SessionType::Var(ts_.Next().text);
    }
    ts_.Fail("expected a session type");
  }

  TokenStream ts_;
};

// Every variable must be bound, and separated from its binder by at least
// one prefix.
void CheckRecursion(const SessionType& t, std::set<std::string>& bound,
                    std::set<std::string>& unguarded) {
  switch (t.kind()) {
    case SessionKind::kEnd:
      return;
    case SessionKind::kVar:
      if (bound.count(t.var()) == 0) {
        throw SyntaxError("unbound recursion variable " + t.var(), 0, 0);
      }
      if (unguarded.count(t.var()) > 0) {
        throw UnguardedRecursionError("recursion variable " + t.var() +
                                      " is not guarded by a prefix");
      }
      return;
    case SessionKind::kOut:
    case SessionKind::kIn: {
      std::set<std::string> none;
      CheckRecursion(t.cont(), bound, none);
      return;
    }
    case SessionKind::kRec: {
      std::set<std::string> inner_bound = bound;
      inner_bound.insert(t.var());
      std::set<std::string> inner_unguarded = unguarded;
      inner_unguarded.insert(t.var());
      CheckRecursion(t.body(), inner_bound, inner_unguarded);
      return;
    }
    default:
      for (const SessionType& b : t.branches()) {
        CheckRecursion(b, bound, unguarded);
      }
      return;
  }
}

void Validate(const SessionType& t) {
  std::set<std::string> bound;
  std::set<std::string> unguarded;
  CheckRecursion(t, bound, unguarded);
  NormalizeSessionType(t);
}

void CheckNoSelfMessage(const Role& role, const SessionType& t) {
  switch (t.kind()) {
    case SessionKind::kOut:
    case SessionKind::kIn:
      if (t.partners().count(role) > 0) {
        throw SelfMessageError("role " + role.name +
                               " communicates with itself");
      }
      CheckNoSelfMessage(role, t.cont());
      return;
    case SessionKind::kRec:
      CheckNoSelfMessage(role, t.body());
      return;
    case SessionKind::kInternal:
    case SessionKind::kExternal:
    case SessionKind::kMerge:
      for (const SessionType& b : t.branches()) CheckNoSelfMessage(role, b);
      return;
    default:
      return;
  }
}

}  // namespace

GlobalType ParseGlobalType(std::string_view text) {
  return GlobalParser(text).ParseAll();
}

SessionType ParseSessionType(std::string_view text) {
  SessionType t = SessionParser(text).ParseTypeAll();
  Validate(t);
  return t;
}

SessionEnv ParseSessionEnv(std::string_view text) {
  SessionEnv env = SessionParser(text).ParseEnvAll();
  for (const auto& [role, t] : env) {
    Validate(t);
    CheckNoSelfMessage(role, t);
  }
  return env;
}

}  // namespace mpst
