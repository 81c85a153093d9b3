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

#include "mpst/interaction.h"

#include <sstream>
#include <stdexcept>

#include "mpst/errors.h"

namespace mpst {

Interaction Interaction::Make(std::set<Role> senders, Role receiver,
                              MessageType message) {
  if (senders.empty()) {
    throw std::invalid_argument("interaction without senders");
  }
  if (senders.count(receiver) > 0) {
    throw SelfMessageError("role " + receiver.name +
                           " sends a message to itself");
  }
  return Interaction{std::move(senders), std::move(receiver),
                     std::move(message)};
}

Interaction Interaction::Make(const std::string& sender,
                              const std::string& receiver,
                              const std::string& message) {
  return Make({Role(sender)}, Role(receiver), MessageType(message));
}

std::string ToString(const Interaction& interaction) {
  std::string out;
  if (interaction.senders.size() == 1) {
    out = interaction.senders.begin()->name;
  } else {
    out = "{";
    bool first = true;
    for (const Role& r : interaction.senders) {
      if (!first) out += ",";
      first = false;
      out += r.name;
    }
    out += "}";
  }
  return out + "->" + interaction.receiver.name + ":" +
         interaction.message.name;
}

std::string ToString(const Trace& trace) {
  if (trace.empty()) return "<empty>";
  std::string out;
  for (size_t i = 0; i < trace.size(); ++i) {
    if (i > 0) out += " ";
    out += ToString(trace[i]);
  }
  return out;
}

namespace {

Interaction ParseToken(const std::string& token) {
  size_t arrow = token.find("->");
  size_t colon = token.rfind(':');
  if (arrow == std::string::npos || colon == std::string::npos ||
      colon < arrow) {
    throw std::invalid_argument("bad trace token: " + token);
  }
  std::string lhs = token.substr(0, arrow);
  std::set<Role> senders;
  if (!lhs.empty() && lhs.front() == '{' && lhs.back() == '}') {
    std::stringstream ss(lhs.substr(1, lhs.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) senders.insert(Role(item));
  } else {
    senders.insert(Role(lhs));
  }
  return Interaction::Make(std::move(senders),
                           Role(token.substr(arrow + 2, colon - arrow - 2)),
                           MessageType(token.substr(colon + 1)));
}

}  // namespace

Trace ParseTrace(const std::string& text) {
  Trace trace;
  std::stringstream ss(text);
  std::string token;
  while (ss >> token) {
    if (token == "<empty>") continue;
    trace.push_back(ParseToken(token));
  }
  return trace;
}

bool CanSwap(const Interaction& first, const Interaction& second) {
  return first.receiver != second.receiver &&
         second.senders.count(first.receiver) == 0;
}

}  // namespace mpst
