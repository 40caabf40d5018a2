#pragma once

// Cost embedding value kind: a cost v is carried as the monomial x^v, an
// unreachable entry as the zero polynomial. Ring addition merges terms, ring
// multiplication adds exponents, so a (min, +) step becomes "multiply, then
// take the smallest exponent that survives". Coefficients are arbitrary
// precision so the Moebius cancellation in the fast convolution is exact.

#include <gmpxx.h>

#include <cassert>
#include <cstdint>
#include <map>

#include "joinconv/convolution.hpp"

namespace joinconv {

class CoefficientPolynomial {
 public:
  CoefficientPolynomial() = default;

  static CoefficientPolynomial monomial(std::int64_t exponent,
                                        long coefficient = 1) {
    assert(exponent >= 0);
    CoefficientPolynomial p;
    if (coefficient != 0) p.terms_[exponent] = coefficient;
    return p;
  }

  // The zero polynomial stands for infinity: no reachable cost at all.
  bool is_zero() const { return terms_.empty(); }

  // Smallest exponent with a non-zero coefficient; terms are kept clean of
  // zeros, so this is just the first entry.
  std::int64_t min_exponent() const {
    assert(!is_zero());
    return terms_.begin()->first;
  }

  const std::map<std::int64_t, mpz_class>& terms() const { return terms_; }

  CoefficientPolynomial& operator+=(const CoefficientPolynomial& o) {
    for (const auto& [e, c] : o.terms_) {
      mpz_class& entry = terms_[e];
      entry += c;
      if (entry == 0) terms_.erase(e);
    }
    return *this;
  }

  CoefficientPolynomial& operator-=(const CoefficientPolynomial& o) {
    for (const auto& [e, c] : o.terms_) {
      mpz_class& entry = terms_[e];
      entry -= c;
      if (entry == 0) terms_.erase(e);
    }
    return *this;
  }

  // this += a * b, optionally doubled (for symmetric convolution pairs).
  void add_product(const CoefficientPolynomial& a,
                   const CoefficientPolynomial& b, bool doubled = false) {
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        mpz_class& entry = terms_[ea + eb];
        entry += ca * cb;
        if (doubled) entry += ca * cb;
        if (entry == 0) terms_.erase(ea + eb);
      }
  }

  bool operator==(const CoefficientPolynomial&) const = default;

 private:
  std::map<std::int64_t, mpz_class> terms_;
};

template <>
struct RingMul<CoefficientPolynomial> {
  static void mul_add_assign(CoefficientPolynomial& acc,
                             const CoefficientPolynomial& a,
                             const CoefficientPolynomial& b) {
    acc.add_product(a, b);
  }
};

}  // namespace joinconv
