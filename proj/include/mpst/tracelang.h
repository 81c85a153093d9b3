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

#ifndef MPST_TRACELANG_H_
#define MPST_TRACELANG_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mpst/global_type.h"
#include "mpst/interaction.h"

namespace mpst {

// Nondeterministic automaton without epsilon moves over interactions.
struct TraceAutomaton {
  int initial = 0;
  std::vector<bool> final;
  // Outgoing edges per state, sorted by (label, target).
  std::vector<std::vector<std::pair<Interaction, int>>> edges;

  int num_states() const { return static_cast<int>(final.size()); }
  std::set<Interaction> Alphabet() const;
};

using ParikhVector = std::map<Interaction, int>;

inline constexpr size_t kDefaultTraceCap = 100000;

TraceAutomaton EmptyLanguage();
TraceAutomaton EpsilonLanguage();
TraceAutomaton SingletonLanguage(const Interaction& letter);
TraceAutomaton FiniteLanguage(const std::set<Trace>& traces);
TraceAutomaton Concatenate(const TraceAutomaton& a, const TraceAutomaton& b);
TraceAutomaton UnionAutomata(const TraceAutomaton& a, const TraceAutomaton& b);
TraceAutomaton KleeneStar(const TraceAutomaton& a);
// Interleavings of one word of each operand.
TraceAutomaton ShuffleAutomata(const TraceAutomaton& a1,
                               const TraceAutomaton& a2);
// Removes states that are unreachable or cannot reach a final state.
TraceAutomaton Trim(const TraceAutomaton& a);

TraceAutomaton CompileTraces(const GlobalType& g);
// The k-exit iteration rewritten with the binary star:
// (B1;...;Bk)* ; (E1 | B1;E2 | ... | B1;...;Bk-1;Ek).
GlobalType DesugarKExit(const GlobalType& g);

bool Accepts(const TraceAutomaton& a, const Trace& w);

// Every accepted word of length <= max_len. Throws BudgetExceededError when
// more than `cap` words qualify.
std::set<Trace> EnumerateTraces(const TraceAutomaton& a, int max_len,
                                size_t cap = kDefaultTraceCap);

struct InclusionResult {
  bool included = true;
  // A shortest, then lexicographically least, word of L(a2) \ L(a1).
  std::optional<Trace> witness;
};

// Decides L(a2) ⊆ L(a1).
InclusionResult Includes(const TraceAutomaton& a1, const TraceAutomaton& a2);
bool LanguageEqual(const TraceAutomaton& a1, const TraceAutomaton& a2);

// Words obtained from an accepted word by swapping exactly one adjacent
// pair `x y` with CanSwap(x, y).
TraceAutomaton SwapAutomaton(const TraceAutomaton& a);

struct WellFormedness {
  bool well_formed = true;
  // When not well formed: `witness` is accepted, swapping its letters at
  // `position` and `position + 1` gives `swapped`, which is not.
  Trace witness;
  size_t position = 0;
  Trace swapped;
};

WellFormedness WellFormedLanguage(const TraceAutomaton& a);
WellFormedness WellFormed(const GlobalType& g);

ParikhVector ParikhVectorOf(const Trace& w);

// Canonical description of the minimal deterministic automaton; equal keys
// mean equal languages.
std::string LanguageKey(const TraceAutomaton& a);

// Graphviz rendering.
std::string ToDot(const TraceAutomaton& a);

}  // namespace mpst

#endif  // MPST_TRACELANG_H_
