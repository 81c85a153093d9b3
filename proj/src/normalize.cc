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

#include "mpst/errors.h"
#include "mpst/session_type.h"
#include "session_graph.h"

namespace mpst {

SessionType NormalizeSessionType(const SessionType& t) {
  try {
    return internal::Normalize(t);
  } catch (const internal::EvalError& e) {
    if (e.kind == internal::EvalError::kUnguarded) {
      throw UnguardedRecursionError(e.detail);
    }
    throw NotSessionTypeError(e.detail);
  }
}

bool EquivalentSessionTypes(const SessionType& t, const SessionType& s) {
  return NormalizeSessionType(t) == NormalizeSessionType(s);
}

}  // namespace mpst
