#pragma once

// Dense tables over the subset lattice plus the scalar value kinds the
// convolutions run over: checked 64-bit ring integers and extended integers
// with an absorbing infinity for (min, +) work.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "joinconv/lattice.hpp"

namespace joinconv {

// All ring arithmetic on machine integers goes through these. A wrapped
// result would silently corrupt an optimum, so overflow throws instead.
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw std::overflow_error("integer overflow in ring addition");
  return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r))
    throw std::overflow_error("integer overflow in ring subtraction");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw std::overflow_error("integer overflow in ring multiplication");
  return r;
}

// A value per subset of {R_0..R_{n-1}}, indexed by bitmask.
template <class V>
class SetFunction {
 public:
  explicit SetFunction(int n, V init = V{})
      : n_(n), values_(std::size_t{1} << n, init) {
    assert(n >= 0 && n <= kMaxRelations);
  }
  SetFunction(int n, std::vector<V> values)
      : n_(n), values_(std::move(values)) {
    assert(values_.size() == (std::size_t{1} << n));
  }

  int n() const { return n_; }
  std::size_t size() const { return values_.size(); }

  V& operator[](RelationSet s) { return values_[s.bits()]; }
  const V& operator[](RelationSet s) const { return values_[s.bits()]; }
  V& at_bits(std::uint32_t bits) { return values_[bits]; }
  const V& at_bits(std::uint32_t bits) const { return values_[bits]; }

  std::vector<V>& values() { return values_; }
  const std::vector<V>& values() const { return values_; }

  bool operator==(const SetFunction&) const = default;

 private:
  int n_;
  std::vector<V> values_;
};

// Extended integers for (min, +): costs plus a reserved infinity that
// absorbs under addition. Kept as plain int64 with helpers so hot loops
// stay branch-light; the sentinel leaves ample headroom above any cost the
// load-time W * n bound admits.
namespace ext {

inline constexpr std::int64_t kInfinity = std::int64_t{1} << 62;

inline constexpr bool is_infinite(std::int64_t v) { return v >= kInfinity; }

inline std::int64_t add(std::int64_t a, std::int64_t b) {
  if (is_infinite(a) || is_infinite(b)) return kInfinity;
  return checked_add(a, b);
}

inline constexpr std::int64_t min(std::int64_t a, std::int64_t b) {
  return a < b ? a : b;
}

}  // namespace ext

}  // namespace joinconv
