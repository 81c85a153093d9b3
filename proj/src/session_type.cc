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

#include "mpst/session_type.h"

#include <stdexcept>

namespace mpst {

namespace {

std::shared_ptr<SessionNode> NewNode(SessionKind kind) {
  auto node = std::make_shared<SessionNode>();
  node->kind = kind;
  return node;
}

}  // namespace

SessionType::SessionType() : node_(NewNode(SessionKind::kEnd)) {}

SessionType SessionType::End() { return SessionType(); }

SessionType SessionType::Var(std::string name) {
  auto node = NewNode(SessionKind::kVar);
  node->var = std::move(name);
  return SessionType(std::move(node));
}

SessionType SessionType::Out(Role partner, MessageType message,
                             SessionType cont) {
  auto node = NewNode(SessionKind::kOut);
  node->partners.insert(std::move(partner));
  node->message = std::move(message);
  node->children.push_back(std::move(cont));
  return SessionType(std::move(node));
}

SessionType SessionType::In(std::set<Role> partners, MessageType message,
                            SessionType cont) {
  if (partners.empty()) throw std::invalid_argument("input without senders");
  auto node = NewNode(SessionKind::kIn);
  node->partners = std::move(partners);
  node->message = std::move(message);
  node->children.push_back(std::move(cont));
  return SessionType(std::move(node));
}

SessionType SessionType::Internal(std::vector<SessionType> branches) {
  if (branches.empty()) throw std::invalid_argument("empty internal choice");
  if (branches.size() == 1) return branches[0];
  auto node = NewNode(SessionKind::kInternal);
  node->children = std::move(branches);
  return SessionType(std::move(node));
}

SessionType SessionType::External(std::vector<SessionType> branches) {
  if (branches.empty()) throw std::invalid_argument("empty external choice");
  if (branches.size() == 1) return branches[0];
  auto node = NewNode(SessionKind::kExternal);
  node->children = std::move(branches);
  return SessionType(std::move(node));
}

SessionType SessionType::Rec(std::string var, SessionType body) {
  auto node = NewNode(SessionKind::kRec);
  node->var = std::move(var);
  node->children.push_back(std::move(body));
  return SessionType(std::move(node));
}

SessionType SessionType::Merge(std::vector<SessionType> operands,
                               MergeFlavor flavor) {
  if (operands.empty()) throw std::invalid_argument("empty merge");
  auto node = NewNode(SessionKind::kMerge);
  node->children = std::move(operands);
  node->flavor = flavor;
  return SessionType(std::move(node));
}

SessionKind SessionType::kind() const { return node_->kind; }
const std::string& SessionType::var() const { return node_->var; }
const std::set<Role>& SessionType::partners() const {
  return node_->partners;
}
const Role& SessionType::partner() const { return *node_->partners.begin(); }
const MessageType& SessionType::message() const { return node_->message; }
const SessionType& SessionType::cont() const { return node_->children[0]; }
const SessionType& SessionType::body() const { return node_->children[0]; }
const std::vector<SessionType>& SessionType::branches() const {
  return node_->children;
}
MergeFlavor SessionType::flavor() const { return node_->flavor; }

bool SessionType::operator==(const SessionType& other) const {
  if (node_ == other.node_) return true;
  const SessionNode& a = *node_;
  const SessionNode& b = *other.node_;
  return a.kind == b.kind && a.var == b.var && a.partners == b.partners &&
         a.message == b.message && a.flavor == b.flavor &&
         a.children == b.children;
}

namespace {

std::string PrefixText(const SessionType& t) {
  std::string out;
  if (t.kind() == SessionKind::kOut) {
    return t.partner().name + "!" + t.message().name;
  }
  if (t.partners().size() == 1) {
    out = t.partners().begin()->name;
  } else {
    out = "{";
    bool first = true;
    for (const Role& r : t.partners()) {
      if (!first) out += ",";
      first = false;
      out += r.name;
    }
    out += "}";
  }
  return out + "?" + t.message().name;
}

void Print(const SessionType& t, bool top, std::string& out) {
  switch (t.kind()) {
    case SessionKind::kEnd:
      out += "end";
      return;
    case SessionKind::kVar:
      out += t.var();
      return;
    case SessionKind::kOut:
    case SessionKind::kIn:
      out += PrefixText(t) + ".";
      Print(t.cont(), false, out);
      return;
    case SessionKind::kRec:
      out += "rec " + t.var() + " . ";
      Print(t.body(), false, out);
      return;
    case SessionKind::kInternal:
    case SessionKind::kExternal: {
      const char* op = t.kind() == SessionKind::kInternal ? " (+) " : " + ";
      if (!top) out += "(";
      for (size_t i = 0; i < t.branches().size(); ++i) {
        if (i > 0) out += op;
        Print(t.branches()[i], false, out);
      }
      if (!top) out += ")";
      return;
    }
    case SessionKind::kMerge:
      out += "merge(";
      for (size_t i = 0; i < t.branches().size(); ++i) {
        if (i > 0) out += ", ";
        Print(t.branches()[i], true, out);
      }
      out += ")";
      return;
  }
}

void CollectFree(const SessionType& t, std::set<std::string>& bound,
                 std::set<std::string>& free) {
  switch (t.kind()) {
    case SessionKind::kEnd:
      return;
    case SessionKind::kVar:
      if (bound.count(t.var()) == 0) free.insert(t.var());
      return;
    case SessionKind::kRec: {
      bool fresh = bound.insert(t.var()).second;
      CollectFree(t.body(), bound, free);
      if (fresh) bound.erase(t.var());
      return;
    }
    default:
      for (const SessionType& c : t.branches()) CollectFree(c, bound, free);
      return;
  }
}

SessionType Rebuild(const SessionType& t,
                    const std::vector<SessionType>& children) {
  switch (t.kind()) {
    case SessionKind::kOut:
      return SessionType::Out(t.partner(), t.message(), children[0]);
    case SessionKind::kIn:
      return SessionType::In(t.partners(), t.message(), children[0]);
    case SessionKind::kRec:
      return SessionType::Rec(t.var(), children[0]);
    case SessionKind::kInternal:
      return SessionType::Internal(children);
    case SessionKind::kExternal:
      return SessionType::External(children);
    case SessionKind::kMerge:
      return SessionType::Merge(children, t.flavor());
    default:
      return t;
  }
}

std::string FreshName(const std::string& base,
                      const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (avoid.count(candidate) == 0) return candidate;
  }
}

SessionType Subst(const SessionType& t, const std::string& var,
                  const SessionType& replacement,
                  const std::set<std::string>& replacement_free) {
  switch (t.kind()) {
    case SessionKind::kEnd:
      return t;
    case SessionKind::kVar:
      return t.var() == var ? replacement : t;
    case SessionKind::kRec: {
      if (t.var() == var) return t;
      if (replacement_free.count(t.var()) > 0) {
        std::set<std::string> avoid = FreeVars(t.body());
        avoid.insert(replacement_free.begin(), replacement_free.end());
        std::string fresh = FreshName(t.var(), avoid);
        SessionType renamed = Substitute(t.body(), t.var(),
                                         SessionType::Var(fresh));
        return SessionType::Rec(
            fresh, Subst(renamed, var, replacement, replacement_free));
      }
      return SessionType::Rec(
          t.var(), Subst(t.body(), var, replacement, replacement_free));
    }
    default: {
      std::vector<SessionType> children;
      for (const SessionType& c : t.branches()) {
        children.push_back(Subst(c, var, replacement, replacement_free));
      }
      return Rebuild(t, children);
    }
  }
}

}  // namespace

std::string PrintSessionType(const SessionType& t) {
  std::string out;
  Print(t, true, out);
  return out;
}

std::string PrintSessionEnv(const SessionEnv& env) {
  std::string out;
  for (const auto& [role, t] : env) {
    out += role.name + " : " + PrintSessionType(t) + "\n";
  }
  return out;
}

std::set<std::string> FreeVars(const SessionType& t) {
  std::set<std::string> bound;
  std::set<std::string> free;
  CollectFree(t, bound, free);
  return free;
}

SessionType Substitute(const SessionType& t, const std::string& var,
                       const SessionType& replacement) {
  return Subst(t, var, replacement, FreeVars(replacement));
}

SessionType UnfoldTop(const SessionType& t) {
  SessionType current = t;
  for (int guard = 0; current.kind() == SessionKind::kRec; ++guard) {
    if (guard > 1000) {
      throw std::invalid_argument("unguarded recursion while unfolding");
    }
    current = Substitute(current.body(), current.var(), current);
  }
  return current;
}

bool EquivalentSessionEnvs(const SessionEnv& d1, const SessionEnv& d2) {
  if (d1.size() != d2.size()) return false;
  for (const auto& [role, t] : d1) {
    auto it = d2.find(role);
    if (it == d2.end() || !EquivalentSessionTypes(t, it->second)) return false;
  }
  return true;
}

SessionEnv NormalizeSessionEnv(const SessionEnv& env) {
  SessionEnv out;
  for (const auto& [role, t] : env) out.emplace(role, NormalizeSessionType(t));
  return out;
}

}  // namespace mpst
