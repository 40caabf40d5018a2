#pragma once

// Query instances and join trees. An instance carries base-relation sizes at
// the singletons and join result sizes at every larger set it admits; trees
// are binary with one leaf per relation. Costs: total intermediate size,
// largest intermediate, and a sort-merge variant with x * log2(x) terms.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "joinconv/lattice.hpp"
#include "joinconv/set_function.hpp"

namespace joinconv {

class QueryInstance {
 public:
  QueryInstance(int n, std::vector<std::string> names,
                std::vector<std::pair<int, int>> edge_list, bool cross_products)
      : n_(n),
        names_(std::move(names)),
        edges_(std::move(edge_list)),
        cross_products_(cross_products),
        cardinalities_(n, kAbsent),
        adjacency_(n, 0) {
    if (n < 1 || n > kMaxRelations)
      throw std::runtime_error("relation count out of range [1, 30]");
    if (static_cast<int>(names_.size()) != n)
      throw std::runtime_error("relation name list does not match n");
    for (auto [a, b] : edges_) {
      if (a < 0 || a >= n || b < 0 || b >= n || a == b)
        throw std::runtime_error("edge endpoint out of range");
      adjacency_[a] |= std::uint32_t{1} << b;
      adjacency_[b] |= std::uint32_t{1} << a;
    }
  }

  int n() const { return n_; }
  const std::vector<std::string>& relation_names() const { return names_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  bool cross_products() const { return cross_products_; }
  RelationSet all_relations() const { return RelationSet::all(n_); }
  std::uint32_t neighbors(int i) const { return adjacency_[i]; }

  bool has_cardinality(RelationSet s) const {
    return cardinalities_[s] != kAbsent;
  }

  // Spanned cardinality of s: base size for singletons, join result size
  // otherwise. With cross products disabled only connected sets may be
  // consulted; that contract is a debug assertion here.
  std::int64_t cardinality(RelationSet s) const {
    assert(!s.empty());
    assert(cross_products_ || connected(s));
    std::int64_t v = cardinalities_[s];
    if (v == kAbsent)
      throw std::logic_error("cardinality consulted for an absent set");
    return v;
  }

  void set_cardinality(RelationSet s, std::int64_t value) {
    assert(!s.empty() && value >= 0);
    cardinalities_[s] = value;
  }

  const SetFunction<std::int64_t>& raw_cardinalities() const {
    return cardinalities_;
  }

  // True iff the subgraph induced by s is connected; singletons are.
  // Fixpoint frontier expansion over the per-relation neighbor masks.
  bool connected(RelationSet s) const {
    assert(!s.empty());
    std::uint32_t target = s.bits();
    std::uint32_t reached = target & (0 - target);
    for (;;) {
      std::uint32_t next = reached;
      for (std::uint32_t rest = reached; rest;) {
        int i = std::countr_zero(rest);
        rest &= rest - 1;
        next |= adjacency_[i] & target;
      }
      if (next == reached) break;
      reached = next;
    }
    return reached == target;
  }

 private:
  static constexpr std::int64_t kAbsent = -1;

  int n_;
  std::vector<std::string> names_;
  std::vector<std::pair<int, int>> edges_;
  bool cross_products_;
  SetFunction<std::int64_t> cardinalities_;
  std::vector<std::uint32_t> adjacency_;
};

inline bool is_connected(const QueryInstance& q, RelationSet s) {
  return q.connected(s);
}

// Largest join result size the instance stores, 0 when n = 1.
inline std::int64_t max_join_cardinality(const QueryInstance& q) {
  std::int64_t w = 0;
  std::uint32_t size = std::uint32_t{1} << q.n();
  for (std::uint32_t s = 0; s < size; ++s) {
    RelationSet set(s);
    if (set.count() >= 2 && q.has_cardinality(set))
      w = std::max(w, q.cardinality(set));
  }
  return w;
}

// Binary join tree; move-only, children on the heap.
struct JoinTree {
  int leaf = -1;
  RelationSet span;
  std::unique_ptr<JoinTree> left, right;

  bool is_leaf() const { return leaf >= 0; }

  static JoinTree make_leaf(int relation) {
    assert(relation >= 0);
    JoinTree t;
    t.leaf = relation;
    t.span = RelationSet::singleton(relation);
    return t;
  }

  static JoinTree make_join(JoinTree l, JoinTree r) {
    assert((l.span & r.span).empty());
    JoinTree t;
    t.span = l.span | r.span;
    t.left = std::make_unique<JoinTree>(std::move(l));
    t.right = std::make_unique<JoinTree>(std::move(r));
    return t;
  }
};

// Sum of join result sizes over all inner nodes; leaves cost nothing.
inline std::int64_t cost_out(const JoinTree& t, const QueryInstance& q) {
  if (t.is_leaf()) return 0;
  std::int64_t children =
      checked_add(cost_out(*t.left, q), cost_out(*t.right, q));
  return checked_add(q.cardinality(t.span), children);
}

// Largest join result size over all inner nodes; leaves cost nothing.
inline std::int64_t cost_max(const JoinTree& t, const QueryInstance& q) {
  if (t.is_leaf()) return 0;
  std::int64_t children =
      std::max(cost_max(*t.left, q), cost_max(*t.right, q));
  return std::max(q.cardinality(t.span), children);
}

// x * log2(x) with the x = 0 case defined as 0.
inline double xlogx(std::int64_t x) {
  assert(x >= 0);
  if (x == 0) return 0.0;
  double v = static_cast<double>(x);
  return v * std::log2(v);
}

// Sort-merge cost: each inner node pays the x log x sort terms of both
// children's spanned cardinalities (base size when the child is a leaf)
// plus the children's own costs. The node's own output size does not enter.
inline double cost_smj(const JoinTree& t, const QueryInstance& q) {
  if (t.is_leaf()) return 0.0;
  return xlogx(q.cardinality(t.left->span)) +
         xlogx(q.cardinality(t.right->span)) + cost_smj(*t.left, q) +
         cost_smj(*t.right, q);
}

// One submultiplicativity breach: c(set) exceeds c(part) * c(set \ part).
struct CardinalityViolation {
  RelationSet set;
  RelationSet part;
  std::int64_t value;
  std::int64_t bound;
};

// Checks c(S) <= c(S1) * c(S2) for every stored set and every unordered
// partition whose sides are both stored. Empty result means the instance is
// consistent; equality is allowed.
inline std::vector<CardinalityViolation> validate_cardinalities(
    const QueryInstance& q) {
  std::vector<CardinalityViolation> out;
  std::uint32_t size = std::uint32_t{1} << q.n();
  for (std::uint32_t s = 0; s < size; ++s) {
    RelationSet set(s);
    if (set.count() < 2 || !q.has_cardinality(set)) continue;
    std::int64_t value = q.cardinality(set);
    // Half of the proper submasks, each unordered partition once: keep the
    // side containing the lowest bit of s.
    std::uint32_t low = s & (0 - s);
    for (RelationSet part : enumerate_proper_subsets(set)) {
      if (!(part.bits() & low)) continue;
      RelationSet other = set - part;
      if (!q.has_cardinality(part) || !q.has_cardinality(other)) continue;
      std::int64_t bound =
          checked_mul(q.cardinality(part), q.cardinality(other));
      if (value > bound)
        out.push_back(CardinalityViolation{set, part, value, bound});
    }
  }
  return out;
}

}  // namespace joinconv
