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

#include "mpst/global_type.h"

#include <stdexcept>

namespace mpst {

namespace {

std::shared_ptr<const GlobalNode> MakeNode(GlobalKind kind,
                                           std::vector<GlobalType> operands) {
  auto node = std::make_shared<GlobalNode>();
  node->kind = kind;
  node->operands = std::move(operands);
  return node;
}

}  // namespace

GlobalType::GlobalType() : node_(MakeNode(GlobalKind::kSkip, {})) {}

GlobalType GlobalType::Skip() { return GlobalType(); }

GlobalType GlobalType::Action(Interaction interaction) {
  auto node = std::make_shared<GlobalNode>();
  node->kind = GlobalKind::kAction;
  node->interaction = std::move(interaction);
  return GlobalType(std::move(node));
}

GlobalType GlobalType::Seq(GlobalType first, GlobalType second) {
  return GlobalType(
      MakeNode(GlobalKind::kSeq, {std::move(first), std::move(second)}));
}

GlobalType GlobalType::Both(GlobalType left, GlobalType right) {
  return GlobalType(
      MakeNode(GlobalKind::kBoth, {std::move(left), std::move(right)}));
}

GlobalType GlobalType::Either(GlobalType left, GlobalType right) {
  return GlobalType(
      MakeNode(GlobalKind::kEither, {std::move(left), std::move(right)}));
}

GlobalType GlobalType::Star(GlobalType body) {
  return GlobalType(MakeNode(GlobalKind::kStar, {std::move(body)}));
}

GlobalType GlobalType::KExit(std::vector<GlobalType> bodies,
                             std::vector<GlobalType> exits) {
  if (bodies.empty() || bodies.size() != exits.size()) {
    throw std::invalid_argument(
        "k-exit iteration needs k >= 1 bodies and as many exits");
  }
  std::vector<GlobalType> operands = std::move(bodies);
  operands.insert(operands.end(), exits.begin(), exits.end());
  return GlobalType(MakeNode(GlobalKind::kKExit, std::move(operands)));
}

GlobalKind GlobalType::kind() const { return node_->kind; }
const Interaction& GlobalType::interaction() const {
  return node_->interaction;
}
const GlobalType& GlobalType::left() const { return node_->operands[0]; }
const GlobalType& GlobalType::right() const { return node_->operands[1]; }
const GlobalType& GlobalType::body() const { return node_->operands[0]; }

std::vector<GlobalType> GlobalType::bodies() const {
  size_t k = node_->operands.size() / 2;
  return {node_->operands.begin(), node_->operands.begin() + k};
}

std::vector<GlobalType> GlobalType::exits() const {
  size_t k = node_->operands.size() / 2;
  return {node_->operands.begin() + k, node_->operands.end()};
}

bool GlobalType::operator==(const GlobalType& other) const {
  if (node_ == other.node_) return true;
  if (node_->kind != other.node_->kind) return false;
  if (node_->kind == GlobalKind::kAction) {
    return node_->interaction == other.node_->interaction;
  }
  return node_->operands == other.node_->operands;
}

namespace {

// Binding strength: Either < Both < Seq < postfix/atoms.
int Level(GlobalKind kind) {
  switch (kind) {
    case GlobalKind::kEither:
      return 0;
    case GlobalKind::kBoth:
      return 1;
    case GlobalKind::kSeq:
      return 2;
    default:
      return 3;
  }
}

void Print(const GlobalType& g, std::string& out);

void PrintAt(const GlobalType& g, int min_level, std::string& out) {
  if (Level(g.kind()) < min_level) {
    out += "(";
    Print(g, out);
    out += ")";
  } else {
    Print(g, out);
  }
}

void PrintList(const std::vector<GlobalType>& items, std::string& out) {
  out += "(";
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    Print(items[i], out);
  }
  out += ")";
}

void Print(const GlobalType& g, std::string& out) {
  switch (g.kind()) {
    case GlobalKind::kSkip:
      out += "skip";
      return;
    case GlobalKind::kAction: {
      const Interaction& i = g.interaction();
      if (i.senders.size() == 1) {
        out += i.senders.begin()->name;
      } else {
        out += "{";
        bool first = true;
        for (const Role& r : i.senders) {
          if (!first) out += ",";
          first = false;
          out += r.name;
        }
        out += "}";
      }
      out += " -> " + i.receiver.name + " : " + i.message.name;
      return;
    }
    case GlobalKind::kSeq:
    case GlobalKind::kBoth:
    case GlobalKind::kEither: {
      int level = Level(g.kind());
      const char* op = g.kind() == GlobalKind::kSeq    ? " ; "
                       : g.kind() == GlobalKind::kBoth ? " & "
                                                       : " | ";
      PrintAt(g.left(), level, out);
      out += op;
      PrintAt(g.right(), level + 1, out);
      return;
    }
    case GlobalKind::kStar:
      out += "(";
      Print(g.body(), out);
      out += ")*";
      return;
    case GlobalKind::kKExit: {
      std::vector<GlobalType> bodies = g.bodies();
      std::vector<GlobalType> exits = g.exits();
      out += "loop" + std::to_string(bodies.size()) + " ";
      PrintList(bodies, out);
      out += " exit ";
      PrintList(exits, out);
      return;
    }
  }
}

void CollectRoles(const GlobalType& g, std::set<Role>& roles) {
  if (g.kind() == GlobalKind::kAction) {
    roles.insert(g.interaction().senders.begin(),
                 g.interaction().senders.end());
    roles.insert(g.interaction().receiver);
    return;
  }
  for (const GlobalType& child : g.id()->operands) CollectRoles(child, roles);
}

template <typename F>
int CountIf(const GlobalType& g, F pred) {
  int n = pred(g) ? 1 : 0;
  for (const GlobalType& child : g.id()->operands) n += CountIf(child, pred);
  return n;
}

}  // namespace

std::string PrintGlobalType(const GlobalType& g) {
  std::string out;
  Print(g, out);
  return out;
}

std::set<Role> RolesOf(const GlobalType& g) {
  std::set<Role> roles;
  CollectRoles(g, roles);
  return roles;
}

int CountInteractions(const GlobalType& g) {
  return CountIf(g, [](const GlobalType& n) {
    return n.kind() == GlobalKind::kAction;
  });
}

int Size(const GlobalType& g) {
  return CountIf(g, [](const GlobalType&) { return true; });
}

bool ContainsBoth(const GlobalType& g) {
  return CountIf(g, [](const GlobalType& n) {
           return n.kind() == GlobalKind::kBoth;
         }) > 0;
}

bool ContainsStar(const GlobalType& g) {
  return CountIf(g, [](const GlobalType& n) {
           return n.kind() == GlobalKind::kStar ||
                  n.kind() == GlobalKind::kKExit;
         }) > 0;
}

}  // namespace mpst
