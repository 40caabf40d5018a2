#pragma once

// Bitmask plumbing for set-indexed dynamic programming: relation sets as
// machine-word masks, proper-subset walks in increasing order, and
// cardinality-bucketed enumeration of the whole lattice.

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace joinconv {

// Hard cap on the relation count. Tables are dense in 2^n, so anything past
// this is out of reach on one machine anyway.
inline constexpr int kMaxRelations = 30;

// A set of base relations, one bit per relation index, bit i <=> relation i.
class RelationSet {
 public:
  using word = std::uint32_t;

  constexpr RelationSet() = default;
  constexpr explicit RelationSet(word bits) : bits_(bits) {}

  static constexpr RelationSet singleton(int i) {
    assert(i >= 0 && i < kMaxRelations);
    return RelationSet(word{1} << i);
  }
  // The full set {R_0, ..., R_{n-1}}.
  static constexpr RelationSet all(int n) {
    assert(n >= 0 && n <= kMaxRelations);
    return RelationSet(n == 0 ? 0 : (word{1} << n) - 1);
  }

  constexpr word bits() const { return bits_; }
  constexpr int count() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(int i) const { return (bits_ >> i) & 1; }
  constexpr bool is_subset_of(RelationSet s) const {
    return (bits_ & ~s.bits_) == 0;
  }
  // Index of the lowest member; set must be nonempty.
  constexpr int lowest() const {
    assert(!empty());
    return std::countr_zero(bits_);
  }

  constexpr RelationSet operator|(RelationSet o) const {
    return RelationSet(bits_ | o.bits_);
  }
  constexpr RelationSet operator&(RelationSet o) const {
    return RelationSet(bits_ & o.bits_);
  }
  constexpr RelationSet operator^(RelationSet o) const {
    return RelationSet(bits_ ^ o.bits_);
  }
  // Set difference.
  constexpr RelationSet operator-(RelationSet o) const {
    return RelationSet(bits_ & ~o.bits_);
  }
  constexpr bool operator==(const RelationSet&) const = default;

  // Iteration over member indices, lowest first.
  class member_iterator {
   public:
    constexpr explicit member_iterator(word m) : m_(m) {}
    constexpr int operator*() const { return std::countr_zero(m_); }
    constexpr member_iterator& operator++() {
      m_ &= m_ - 1;
      return *this;
    }
    constexpr bool operator!=(member_iterator o) const { return m_ != o.m_; }

   private:
    word m_;
  };
  struct member_range {
    word m;
    constexpr member_iterator begin() const { return member_iterator(m); }
    constexpr member_iterator end() const { return member_iterator(0); }
  };
  constexpr member_range members() const { return member_range{bits_}; }

 private:
  word bits_ = 0;
};

// Walks every t with {} != t != s, t subset of s, in increasing bitmask
// order. The step (t - s) & s jumps to the next submask numerically; the
// walk starts at the lowest bit of s and stops just before reaching s.
class ProperSubsetRange {
  using word = RelationSet::word;

 public:
  explicit ProperSubsetRange(RelationSet s) : s_(s.bits()) {
    assert(!s.empty());
  }

  class iterator {
   public:
    iterator(word t, word s) : t_(t), s_(s) {}
    RelationSet operator*() const { return RelationSet(t_); }
    iterator& operator++() {
      t_ = (t_ - s_) & s_;
      return *this;
    }
    bool operator!=(const iterator& o) const { return t_ != o.t_; }

   private:
    word t_, s_;
  };

  iterator begin() const { return iterator(s_ & (word{0} - s_), s_); }
  iterator end() const { return iterator(s_, s_); }

 private:
  word s_;
};

inline ProperSubsetRange enumerate_proper_subsets(RelationSet s) {
  return ProperSubsetRange(s);
}

// All subsets of {R_0..R_{n-1}} with exactly k members, increasing bitmask
// order. Steps with Gosper's hack; k = 0 yields just the empty set.
class CardinalitySetRange {
  using word = RelationSet::word;

 public:
  CardinalitySetRange(int n, int k) : n_(n), k_(k) {
    assert(n >= 0 && n <= kMaxRelations && k >= 0 && k <= n);
  }

  class iterator {
   public:
    iterator(word v, word limit) : v_(v), limit_(limit) {}
    RelationSet operator*() const { return RelationSet(v_); }
    iterator& operator++() {
      if (v_ == 0) {  // the k = 0 case has nothing to step to
        v_ = limit_;
        return *this;
      }
      word u = v_ & (word{0} - v_);
      word w = v_ + u;
      v_ = w | (((v_ ^ w) >> 2) / u);
      if (v_ >= limit_) v_ = limit_;
      return *this;
    }
    bool operator!=(const iterator& o) const { return v_ != o.v_; }

   private:
    word v_, limit_;
  };

  iterator begin() const {
    word limit = word{1} << n_;
    if (k_ == 0) return iterator(0, limit);
    return iterator((word{1} << k_) - 1, limit);
  }
  iterator end() const { return iterator(word{1} << n_, word{1} << n_); }

 private:
  int n_, k_;
};

inline CardinalitySetRange sets_of_cardinality(int n, int k) {
  return CardinalitySetRange(n, k);
}

// Masks of [0, 2^n) bucketed by popcount, each bucket in increasing order.
// The layered convolution engine leans on these lists to touch only the
// cardinality band it needs.
struct CardinalityIndex {
  explicit CardinalityIndex(int n) : by_card(n + 1) {
    std::uint32_t size = std::uint32_t{1} << n;
    for (int k = 0; k <= n; ++k)
      by_card[k].reserve(k == 0 || k == n ? 1 : 0);
    for (std::uint32_t s = 0; s < size; ++s)
      by_card[std::popcount(s)].push_back(s);
  }
  std::vector<std::vector<std::uint32_t>> by_card;
};

}  // namespace joinconv
