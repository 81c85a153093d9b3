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

#ifndef MPST_INTERACTION_H_
#define MPST_INTERACTION_H_

#include <compare>
#include <set>
#include <string>
#include <vector>

namespace mpst {

// A participant of a session.
struct Role {
  std::string name;

  Role() = default;
  explicit Role(std::string n) : name(std::move(n)) {}

  auto operator<=>(const Role&) const = default;
  bool operator==(const Role&) const = default;
};

struct MessageType {
  std::string name;

  MessageType() = default;
  explicit MessageType(std::string n) : name(std::move(n)) {}

  auto operator<=>(const MessageType&) const = default;
  bool operator==(const MessageType&) const = default;
};

// One letter of the trace alphabet: every sender delivers `message` to
// `receiver`, which consumes all of them at once.
struct Interaction {
  std::set<Role> senders;
  Role receiver;
  MessageType message;

  auto operator<=>(const Interaction&) const = default;
  bool operator==(const Interaction&) const = default;

  // Throws SelfMessageError when the receiver is also a sender and
  // std::invalid_argument when there are no senders.
  static Interaction Make(std::set<Role> senders, Role receiver,
                          MessageType message);
  static Interaction Make(const std::string& sender,
                          const std::string& receiver,
                          const std::string& message);
};

using Trace = std::vector<Interaction>;

// Compact token form used in trace dumps: "p->q:a", "{p,q}->r:a".
std::string ToString(const Interaction& interaction);
// Space separated tokens; the empty trace prints as "<empty>".
std::string ToString(const Trace& trace);
// Inverse of ToString(const Trace&).
Trace ParseTrace(const std::string& text);

// Adjacent letters `first second` may be swapped when the receiver of
// `first` takes no part in `second`.
bool CanSwap(const Interaction& first, const Interaction& second);

}  // namespace mpst

#endif  // MPST_INTERACTION_H_
