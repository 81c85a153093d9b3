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

#ifndef MPST_SESSION_TYPE_H_
#define MPST_SESSION_TYPE_H_

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mpst/interaction.h"

namespace mpst {

// kMerge is an intermediate form produced during projection; it never
// appears in parsed or normalized types.
enum class SessionKind {
  kEnd,
  kVar,
  kOut,
  kIn,
  kInternal,
  kExternal,
  kRec,
  kMerge
};

// How the operands of a kMerge node are combined.
enum class MergeFlavor {
  // The partial merge operator with compatibility checks.
  kStrict,
  // Same-prefix fusion, no compatibility checks, differing outputs allowed.
  kLenient,
  // Like kLenient, and every continuation forgets which branch was taken
  // whenever the operands disagree on their prefixes.
  kOblivious,
};

struct SessionNode;

// Immutable session type. Copies share structure.
class SessionType {
 public:
  // End.
  SessionType();

  static SessionType End();
  static SessionType Var(std::string name);
  static SessionType Out(Role partner, MessageType message, SessionType cont);
  static SessionType In(std::set<Role> partners, MessageType message,
                        SessionType cont);
  static SessionType Internal(std::vector<SessionType> branches);
  static SessionType External(std::vector<SessionType> branches);
  static SessionType Rec(std::string var, SessionType body);
  static SessionType Merge(std::vector<SessionType> operands,
                           MergeFlavor flavor = MergeFlavor::kStrict);

  SessionKind kind() const;
  const std::string& var() const;
  // Out: the single partner. In: the senders.
  const std::set<Role>& partners() const;
  const Role& partner() const;
  const MessageType& message() const;
  const SessionType& cont() const;
  const SessionType& body() const;
  const std::vector<SessionType>& branches() const;
  MergeFlavor flavor() const;

  const SessionNode* get() const { return node_.get(); }

  // Structural equality; see EquivalentSessionTypes for equality modulo
  // the structural equations.
  bool operator==(const SessionType& other) const;

 private:
  explicit SessionType(std::shared_ptr<const SessionNode> node)
      : node_(std::move(node)) {}

  std::shared_ptr<const SessionNode> node_;
};

struct SessionNode {
  SessionKind kind = SessionKind::kEnd;
  // Var name or Rec binder.
  std::string var;
  std::set<Role> partners;
  MessageType message;
  // Out/In: continuation. Rec: body. Choices and Merge: the branches.
  std::vector<SessionType> children;
  MergeFlavor flavor = MergeFlavor::kStrict;
};

using SessionEnv = std::map<Role, SessionType>;

// Throws SyntaxError or UnguardedRecursionError.
SessionType ParseSessionType(std::string_view text);
// Bindings `role : type`, separated by whitespace, commas or semicolons.
// Throws SyntaxError, UnguardedRecursionError or DuplicateRoleError.
SessionEnv ParseSessionEnv(std::string_view text);

std::string PrintSessionType(const SessionType& t);
// One `role : type` line per binding.
std::string PrintSessionEnv(const SessionEnv& env);

// Canonical representative modulo associativity, commutativity and
// idempotence of choices, the two distribution equalities and fold/unfold
// of recursion. Branches are sorted by (partners, message) and recursion
// variables are renamed X, Y, Z, X1, ... in pre-order. Throws
// NotSessionTypeError or UnguardedRecursionError.
SessionType NormalizeSessionType(const SessionType& t);
SessionEnv NormalizeSessionEnv(const SessionEnv& env);
bool EquivalentSessionTypes(const SessionType& t, const SessionType& s);
bool EquivalentSessionEnvs(const SessionEnv& d1, const SessionEnv& d2);

// Free recursion variables.
std::set<std::string> FreeVars(const SessionType& t);
// Capture-avoiding substitution of `replacement` for free `var`.
SessionType Substitute(const SessionType& t, const std::string& var,
                       const SessionType& replacement);
// Unfolds top-level recursion until the root is not a Rec.
SessionType UnfoldTop(const SessionType& t);

}  // namespace mpst

#endif  // MPST_SESSION_TYPE_H_
