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

#include <deque>
#include <set>
#include <string>
#include <vector>

#include "mpst/projector.h"
#include "mpst/tracelang.h"

namespace mpst {

namespace {

// Bound on the number of terms visited by the rewriting search, relative
// to the budget.
constexpr int kSearchFactor = 16;

void Blocks(const GlobalType& g, std::vector<GlobalType>& out) {
  if (g.kind() == GlobalKind::kSeq) {
    Blocks(g.left(), out);
    Blocks(g.right(), out);
  } else {
    out.push_back(g);
  }
}

GlobalType Sequence(const std::vector<GlobalType>& blocks, size_t from = 0) {
  if (from >= blocks.size()) return GlobalType::Skip();
  GlobalType out = blocks[from];
  for (size_t i = from + 1; i < blocks.size(); ++i) {
    out = GlobalType::Seq(out, blocks[i]);
  }
  return out;
}

GlobalType WithChildren(const GlobalType& g,
                        const std::vector<GlobalType>& c) {
  switch (g.kind()) {
    case GlobalKind::kSeq:
      return GlobalType::Seq(c[0], c[1]);
    case GlobalKind::kBoth:
      return GlobalType::Both(c[0], c[1]);
    case GlobalKind::kEither:
      return GlobalType::Either(c[0], c[1]);
    case GlobalKind::kStar:
      return GlobalType::Star(c[0]);
    case GlobalKind::kKExit: {
      size_t k = c.size() / 2;
      return GlobalType::KExit({c.begin(), c.begin() + k},
                               {c.begin() + k, c.end()});
    }
    default:
      return g;
  }
}

std::vector<GlobalType> Children(const GlobalType& g) {
  switch (g.kind()) {
    case GlobalKind::kSeq:
    case GlobalKind::kBoth:
    case GlobalKind::kEither:
      return {g.left(), g.right()};
    case GlobalKind::kStar:
      return {g.body()};
    case GlobalKind::kKExit: {
      std::vector<GlobalType> c = g.bodies();
      std::vector<GlobalType> e = g.exits();
      c.insert(c.end(), e.begin(), e.end());
      return c;
    }
    default:
      return {};
  }
}

// (G0;G1) | (G0;G2) becomes G0;(G1 | G2), everywhere.
GlobalType Factor(const GlobalType& g) {
  std::vector<GlobalType> c = Children(g);
  if (c.empty()) return g;
  for (GlobalType& x : c) x = Factor(x);
  if (g.kind() != GlobalKind::kEither) return WithChildren(g, c);
  std::vector<GlobalType> left, right;
  Blocks(c[0], left);
  Blocks(c[1], right);
  size_t k = 0;
  while (k < left.size() && k < right.size() && left[k] == right[k]) ++k;
  if (k == 0) return GlobalType::Either(c[0], c[1]);
  std::vector<GlobalType> common(left.begin(), left.begin() + k);
  if (k == left.size() && k == right.size()) return Sequence(common);
  common.push_back(Factor(
      GlobalType::Either(Sequence(left, k), Sequence(right, k))));
  return Sequence(common);
}

// Cartesian product of per-child variants, rebuilt with `build`.
template <typename Build>
std::vector<GlobalType> Product(const std::vector<std::vector<GlobalType>>& v,
                                size_t cap, Build build) {
  std::vector<std::vector<GlobalType>> acc{{}};
  for (const auto& options : v) {
    std::vector<std::vector<GlobalType>> next;
    for (const auto& prefix : acc) {
      for (const GlobalType& o : options) {
        if (next.size() >= cap) break;
        auto p = prefix;
        p.push_back(o);
        next.push_back(std::move(p));
      }
    }
    acc = std::move(next);
  }
  std::vector<GlobalType> out;
  for (const auto& c : acc) out.push_back(build(c));
  return out;
}

// Replaces every parallel composition by one of its two orders.
std::vector<GlobalType> Serializations(const GlobalType& g, size_t cap) {
  if (!ContainsBoth(g)) return {g};
  std::vector<std::vector<GlobalType>> v;
  for (const GlobalType& c : Children(g)) v.push_back(Serializations(c, cap));
  if (g.kind() != GlobalKind::kBoth) {
    return Product(v, cap, [&](const auto& c) { return WithChildren(g, c); });
  }
  std::vector<GlobalType> out;
  for (const GlobalType& l : v[0]) {
    for (const GlobalType& r : v[1]) {
      if (out.size() >= cap) return out;
      out.push_back(GlobalType::Seq(l, r));
      out.push_back(GlobalType::Seq(r, l));
    }
  }
  return out;
}

void Rules(const GlobalType& a, const GlobalType& b,
           std::vector<GlobalType>& out) {
  out.push_back(GlobalType::Seq(a, b));
  switch (a.kind()) {
    case GlobalKind::kSkip:
      out.push_back(b);
      break;
    case GlobalKind::kEither:
      out.push_back(GlobalType::Either(GlobalType::Both(a.left(), b),
                                       GlobalType::Both(a.right(), b)));
      break;
    case GlobalKind::kSeq:
      out.push_back(GlobalType::Seq(GlobalType::Both(a.left(), b), a.right()));
      out.push_back(GlobalType::Seq(a.left(), GlobalType::Both(a.right(), b)));
      break;
    case GlobalKind::kStar: {
      GlobalType once = GlobalType::Both(a.body(), b);
      out.push_back(GlobalType::Either(GlobalType::Seq(once, a), b));
      out.push_back(GlobalType::Either(GlobalType::Seq(a, once), b));
      break;
    }
    case GlobalKind::kKExit:
      out.push_back(GlobalType::Both(DesugarKExit(a), b));
      break;
    default:
      break;
  }
}

// Every term obtained by one rewrite of one parallel composition.
std::vector<GlobalType> Rewrites(const GlobalType& g) {
  std::vector<GlobalType> out;
  if (g.kind() == GlobalKind::kBoth) {
    Rules(g.left(), g.right(), out);
    Rules(g.right(), g.left(), out);
  }
  std::vector<GlobalType> c = Children(g);
  for (size_t i = 0; i < c.size(); ++i) {
    if (!ContainsBoth(c[i])) continue;
    for (const GlobalType& r : Rewrites(c[i])) {
      std::vector<GlobalType> copy = c;
      copy[i] = r;
      out.push_back(WithChildren(g, copy));
    }
  }
  return out;
}

void Interleavings(const std::vector<GlobalType>& u, size_t i,
                   const std::vector<GlobalType>& v, size_t j,
                   std::vector<GlobalType>& acc, size_t cap,
                   std::vector<GlobalType>& out) {
  if (out.size() >= cap) return;
  if (i == u.size() && j == v.size()) {
    out.push_back(Sequence(acc));
    return;
  }
  if (i < u.size()) {
    acc.push_back(u[i]);
    Interleavings(u, i + 1, v, j, acc, cap, out);
    acc.pop_back();
  }
  if (j < v.size()) {
    acc.push_back(v[j]);
    Interleavings(u, i, v, j + 1, acc, cap, out);
    acc.pop_back();
  }
}

// Parallel compositions of loop-free operands become interleavings of
// their sequential blocks.
std::vector<GlobalType> BlockShuffles(const GlobalType& g, size_t cap) {
  if (!ContainsBoth(g)) return {g};
  if (g.kind() == GlobalKind::kKExit) return BlockShuffles(DesugarKExit(g), cap);
  std::vector<std::vector<GlobalType>> v;
  for (const GlobalType& c : Children(g)) v.push_back(BlockShuffles(c, cap));
  if (g.kind() != GlobalKind::kBoth) {
    return Product(v, cap, [&](const auto& c) { return WithChildren(g, c); });
  }
  std::vector<GlobalType> out;
  for (const GlobalType& l : v[0]) {
    for (const GlobalType& r : v[1]) {
      if (ContainsStar(l) || ContainsStar(r)) {
        if (out.size() + 2 > cap) return out;
        out.push_back(GlobalType::Seq(l, r));
        out.push_back(GlobalType::Seq(r, l));
        continue;
      }
      std::vector<GlobalType> u, w, acc;
      Blocks(l, u);
      Blocks(r, w);
      Interleavings(u, 0, w, 0, acc, cap, out);
    }
  }
  return out;
}

class CandidateList {
 public:
  explicit CandidateList(size_t budget) : budget_(budget) {}

  bool full() const { return out_.size() >= budget_; }

  void Add(const GlobalType& g) {
    if (full()) return;
    GlobalType f = Factor(g);
    if (keys_.insert(LanguageKey(CompileTraces(f))).second) out_.push_back(f);
  }

  std::vector<GlobalType> Take() { return std::move(out_); }

 private:
  size_t budget_;
  std::set<std::string> keys_;
  std::vector<GlobalType> out_;
};

}  // namespace

std::vector<GlobalType> EliminateAnd(const GlobalType& g, int budget) {
  if (budget < 1) throw std::invalid_argument("budget must be positive");
  size_t cap = static_cast<size_t>(budget);
  CandidateList list(cap);
  for (const GlobalType& s : Serializations(g, cap)) list.Add(s);

  std::set<std::string> seen{PrintGlobalType(g)};
  std::deque<GlobalType> queue{g};
  size_t visited = 0;
  while (!queue.empty() && !list.full() && visited < cap * kSearchFactor) {
    GlobalType t = queue.front();
    queue.pop_front();
    ++visited;
    if (!ContainsBoth(t)) {
      list.Add(t);
      continue;
    }
    for (const GlobalType& r : Rewrites(t)) {
      if (seen.insert(PrintGlobalType(r)).second) queue.push_back(r);
    }
  }

  for (const GlobalType& s : BlockShuffles(g, cap)) list.Add(s);
  return list.Take();
}

}  // namespace mpst
