#pragma once

// Zeta and Moebius transforms over the subset lattice, one in-place pass per
// bit. Each pass touches pairs (s without bit, s with bit), which the blocked
// loop walks as two contiguous runs so the compiler can vectorize plain
// integer instantiations.

#include <cstdint>
#include <vector>

#include "joinconv/set_function.hpp"

namespace joinconv {

// Ring add/sub used inside the transforms. Machine integers go through the
// checked helpers; wider types (big integers, polynomials) bring their own
// operators and never wrap.
template <class V>
struct RingOps {
  static void add_assign(V& a, const V& b) { a += b; }
  static void sub_assign(V& a, const V& b) { a -= b; }
};

template <>
struct RingOps<std::int64_t> {
  static void add_assign(std::int64_t& a, std::int64_t b) {
    a = checked_add(a, b);
  }
  static void sub_assign(std::int64_t& a, std::int64_t b) {
    a = checked_sub(a, b);
  }
};

namespace detail {

// (zeta f)(s) = sum over t subset of s of f(t), computed in place.
template <class V, class Ops>
void zeta_inplace(std::vector<V>& a, int n) {
  for (int j = 0; j < n; ++j) {
    std::size_t stride = std::size_t{1} << j;
    for (std::size_t base = 0; base < a.size(); base += 2 * stride)
      for (std::size_t i = base; i < base + stride; ++i)
        Ops::add_assign(a[i + stride], a[i]);
  }
}

// Inverse of zeta_inplace: per bit, subtract the value of the set without
// the bit. Running it after zeta_inplace restores the input exactly.
template <class V, class Ops>
void mobius_inplace(std::vector<V>& a, int n) {
  for (int j = 0; j < n; ++j) {
    std::size_t stride = std::size_t{1} << j;
    for (std::size_t base = 0; base < a.size(); base += 2 * stride)
      for (std::size_t i = base; i < base + stride; ++i)
        Ops::sub_assign(a[i + stride], a[i]);
  }
}

}  // namespace detail

template <class V>
SetFunction<V> zeta_transform(const SetFunction<V>& f) {
  SetFunction<V> out = f;
  detail::zeta_inplace<V, RingOps<V>>(out.values(), f.n());
  return out;
}

template <class V>
SetFunction<V> mobius_transform(const SetFunction<V>& f) {
  SetFunction<V> out = f;
  detail::mobius_inplace<V, RingOps<V>>(out.values(), f.n());
  return out;
}

}  // namespace joinconv
