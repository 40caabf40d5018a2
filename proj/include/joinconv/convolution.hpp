#pragma once

// Subset convolutions. The naive forms walk every split of every set and act
// as exactness oracles; fsc_ring is the fast ranked pipeline: rank the
// inputs, zeta each slice, convolve per rank pointwise, Moebius back, then
// read the diagonal.

#include <cstdint>
#include <vector>

#include "joinconv/lattice.hpp"
#include "joinconv/set_function.hpp"
#include "joinconv/transforms.hpp"

namespace joinconv {

// acc += a * b in the ring; specialized so machine integers stay checked.
template <class V>
struct RingMul {
  static void mul_add_assign(V& acc, const V& a, const V& b) { acc += a * b; }
};

template <>
struct RingMul<std::int64_t> {
  static void mul_add_assign(std::int64_t& acc, std::int64_t a,
                             std::int64_t b) {
    acc = checked_add(acc, checked_mul(a, b));
  }
};

// h(s) = sum over t subset of s of f(t) * g(s \ t); O(3^n) splits.
template <class V>
SetFunction<V> naive_ring_convolution(const SetFunction<V>& f,
                                      const SetFunction<V>& g) {
  assert(f.n() == g.n());
  SetFunction<V> h(f.n());
  std::uint32_t size = std::uint32_t{1} << f.n();
  for (std::uint32_t s = 0; s < size; ++s) {
    V acc{};
    // Decrementing submask walk, t runs over all submasks of s including
    // s itself and the empty set.
    for (std::uint32_t t = s;; t = (t - 1) & s) {
      RingMul<V>::mul_add_assign(acc, f.at_bits(t), g.at_bits(s ^ t));
      if (t == 0) break;
    }
    h.at_bits(s) = acc;
  }
  return h;
}

// h(s) = min over t subset of s of f(t) + g(s \ t), infinity absorbing.
inline SetFunction<std::int64_t> naive_min_plus_convolution(
    const SetFunction<std::int64_t>& f, const SetFunction<std::int64_t>& g) {
  assert(f.n() == g.n());
  SetFunction<std::int64_t> h(f.n(), ext::kInfinity);
  std::uint32_t size = std::uint32_t{1} << f.n();
  for (std::uint32_t s = 0; s < size; ++s) {
    std::int64_t best = ext::kInfinity;
    for (std::uint32_t t = s;; t = (t - 1) & s) {
      best = ext::min(best, ext::add(f.at_bits(t), g.at_bits(s ^ t)));
      if (t == 0) break;
    }
    h.at_bits(s) = best;
  }
  return h;
}

// One array of length 2^n per rank r in [0, n]. After ranking an input, the
// r-th slice carries only sets of cardinality exactly r, so every entry
// below rank r stays at the ring zero; zeta then spreads values upward but
// never below their rank.
template <class V>
struct RankedTable {
  explicit RankedTable(int n_relations)
      : n(n_relations),
        slices(n_relations + 1,
               std::vector<V>(std::size_t{1} << n_relations)) {}

  int n;
  std::vector<std::vector<V>> slices;

  // Rank support invariant: slice r is the ring zero strictly below rank r.
  bool rank_support_holds() const {
    for (int r = 0; r <= n; ++r)
      for (std::uint32_t s = 0; s < (std::uint32_t{1} << n); ++s)
        if (std::popcount(s) < r && !(slices[r][s] == V{})) return false;
    return true;
  }
};

// Slices f by cardinality and zeta-transforms each slice.
template <class V>
RankedTable<V> ranked_zeta(const SetFunction<V>& f) {
  RankedTable<V> table(f.n());
  std::uint32_t size = std::uint32_t{1} << f.n();
  for (std::uint32_t s = 0; s < size; ++s)
    table.slices[std::popcount(s)][s] = f.at_bits(s);
  for (int r = 0; r <= f.n(); ++r)
    detail::zeta_inplace<V, RingOps<V>>(table.slices[r], f.n());
  return table;
}

// Pointwise ranked product: out(s, r) = sum over d of zf(s, d) * zg(s, r-d).
// Every pairing is multiplied, zeros included; this is the plain oracle-grade
// pipeline, the layered engine is the tuned one.
template <class V>
RankedTable<V> ranked_convolution(const RankedTable<V>& zf,
                                  const RankedTable<V>& zg,
                                  std::uint64_t* mult_counter = nullptr) {
  assert(zf.n == zg.n);
  int n = zf.n;
  RankedTable<V> out(n);
  std::uint64_t mults = 0;
  std::uint32_t size = std::uint32_t{1} << n;
  for (int r = 0; r <= n; ++r)
    for (int d = 0; d <= r; ++d) {
      const std::vector<V>& a = zf.slices[d];
      const std::vector<V>& b = zg.slices[r - d];
      std::vector<V>& acc = out.slices[r];
      for (std::uint32_t s = 0; s < size; ++s)
        RingMul<V>::mul_add_assign(acc[s], a[s], b[s]);
      mults += size;
    }
  if (mult_counter) *mult_counter += mults;
  return out;
}

// Fast subset convolution over a ring, exactly equal to
// naive_ring_convolution on every input: rank, zeta, ranked product,
// Moebius per slice, gather the diagonal h(s) = slice |s| at s.
template <class V>
SetFunction<V> fsc_ring(const SetFunction<V>& f, const SetFunction<V>& g,
                        std::uint64_t* mult_counter = nullptr) {
  assert(f.n() == g.n());
  int n = f.n();
  RankedTable<V> zf = ranked_zeta(f);
  RankedTable<V> zg = ranked_zeta(g);
  RankedTable<V> conv = ranked_convolution(zf, zg, mult_counter);
  for (int r = 0; r <= n; ++r)
    detail::mobius_inplace<V, RingOps<V>>(conv.slices[r], n);
  SetFunction<V> h(n);
  std::uint32_t size = std::uint32_t{1} << n;
  for (std::uint32_t s = 0; s < size; ++s)
    h.at_bits(s) = conv.slices[std::popcount(s)][s];
  return h;
}

}  // namespace joinconv
