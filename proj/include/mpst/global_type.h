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

#ifndef MPST_GLOBAL_TYPE_H_
#define MPST_GLOBAL_TYPE_H_

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mpst/interaction.h"

namespace mpst {

enum class GlobalKind { kSkip, kAction, kSeq, kBoth, kEither, kStar, kKExit };

struct GlobalNode;

// Immutable global type. Copies share structure.
class GlobalType {
 public:
  // Skip.
  GlobalType();

  static GlobalType Skip();
  static GlobalType Action(Interaction interaction);
  static GlobalType Seq(GlobalType first, GlobalType second);
  static GlobalType Both(GlobalType left, GlobalType right);
  static GlobalType Either(GlobalType left, GlobalType right);
  static GlobalType Star(GlobalType body);
  // Throws std::invalid_argument unless 1 <= bodies.size() == exits.size().
  static GlobalType KExit(std::vector<GlobalType> bodies,
                          std::vector<GlobalType> exits);

  GlobalKind kind() const;
  const Interaction& interaction() const;
  // Operands of Seq, Both and Either.
  const GlobalType& left() const;
  const GlobalType& right() const;
  const GlobalType& body() const;
  std::vector<GlobalType> bodies() const;
  std::vector<GlobalType> exits() const;

  // Node identity, used to report locations.
  const GlobalNode* id() const { return node_.get(); }

  // Structural equality.
  bool operator==(const GlobalType& other) const;

 private:
  explicit GlobalType(std::shared_ptr<const GlobalNode> node)
      : node_(std::move(node)) {}

  std::shared_ptr<const GlobalNode> node_;
};

struct GlobalNode {
  GlobalKind kind = GlobalKind::kSkip;
  Interaction interaction;
  // Seq/Both/Either: two operands. Star: the body. KExit: bodies then exits.
  std::vector<GlobalType> operands;
};

// Parses the textual syntax. `|` binds weakest, then `&`, then `;`, then
// postfix `*` and `?`. Throws SyntaxError or SelfMessageError.
GlobalType ParseGlobalType(std::string_view text);
std::string PrintGlobalType(const GlobalType& g);

std::set<Role> RolesOf(const GlobalType& g);
int CountInteractions(const GlobalType& g);
// Number of nodes of the syntax tree.
int Size(const GlobalType& g);
bool ContainsBoth(const GlobalType& g);
bool ContainsStar(const GlobalType& g);

}  // namespace mpst

#endif  // MPST_GLOBAL_TYPE_H_
