#pragma once

// Layer-by-layer subset-convolution engine. The join-ordering DP touches
// cardinality k only after every smaller cardinality is final, so instead of
// re-running the full fast convolution per layer the engine caches the zeta
// slice of each finalized rank and, at layer k, only
//   - accumulates the rank-k ranked product from cached slices 1..k-1,
//     pairing slice d with slice k-d and walking d up to k/2 (doubling the
//     asymmetric pairs), skipping sets below cardinality max(d, k-d) where
//     a factor is identically zero,
//   - Moebius-transforms the accumulator over sets of cardinality <= k only,
//   - finalizes dp on rank k through a caller-supplied post-update,
//   - zeta-transforms the fresh rank-k slice into the cache.
// One full DP run therefore costs O(2^n * n^2) ring operations.

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "joinconv/lattice.hpp"
#include "joinconv/polynomial.hpp"
#include "joinconv/set_function.hpp"
#include "joinconv/transforms.hpp"

namespace joinconv {

// Value domains the engine is instantiated over. Each names the dp/slice
// element type, the accumulator type for ranked products, and the ring ops.

// Clamped 0/1 counting for feasibility checks. With dp entries clamped to
// {0, 1}, zeta slice entries are at most C(n, r) <= C(30, 15) < 2^28, one
// product is < 2^56, and an accumulator sums at most n/2 doubled products,
// staying < 2^61. Nothing here can overflow for n <= 30, so the ops are
// plain; debug builds assert the slice bound anyway.
struct ClampedCountingDomain {
  using value_type = std::uint32_t;
  using acc_type = std::int64_t;
  static constexpr std::uint32_t kMaxSliceValue = std::uint32_t{1} << 28;

  static void add_assign(value_type& a, value_type b) { a += b; }
  static void sub_assign(acc_type& a, acc_type b) { a -= b; }
  static void mul_add(acc_type& acc, value_type a, value_type b,
                      bool doubled) {
    assert(a < kMaxSliceValue && b < kMaxSliceValue);
    acc_type p = static_cast<acc_type>(a) * b;
    acc += doubled ? 2 * p : p;
  }
};

// Exact counting in checked 64-bit; overflow throws instead of wrapping.
struct CheckedCountingDomain {
  using value_type = std::int64_t;
  using acc_type = std::int64_t;

  static void add_assign(value_type& a, value_type b) { a = checked_add(a, b); }
  static void sub_assign(acc_type& a, acc_type b) { a = checked_sub(a, b); }
  static void mul_add(acc_type& acc, value_type a, value_type b,
                      bool doubled) {
    std::int64_t p = checked_mul(a, b);
    if (doubled) p = checked_add(p, p);
    acc = checked_add(acc, p);
  }
};

// Exact counting in arbitrary precision, for count cross-checks.
struct BigCountingDomain {
  using value_type = mpz_class;
  using acc_type = mpz_class;

  static void add_assign(value_type& a, const value_type& b) { a += b; }
  static void sub_assign(acc_type& a, const acc_type& b) { a -= b; }
  static void mul_add(acc_type& acc, const value_type& a, const value_type& b,
                      bool doubled) {
    acc += a * b;
    if (doubled) acc += a * b;
  }
};

// Monomial cost embedding; see polynomial.hpp.
struct EmbeddingDomain {
  using value_type = CoefficientPolynomial;
  using acc_type = CoefficientPolynomial;

  static void add_assign(value_type& a, const value_type& b) { a += b; }
  static void sub_assign(acc_type& a, const acc_type& b) { a -= b; }
  static void mul_add(acc_type& acc, const value_type& a, const value_type& b,
                      bool doubled) {
    acc.add_product(a, b, doubled);
  }
};

struct EngineOptions {
  // Evaluate layers up to kSmallLayerMax by direct split enumeration instead
  // of the ranked product. Produces identical dp tables; off by default.
  bool small_layer_direct = false;
};

inline constexpr int kSmallLayerMax = 6;

struct EngineStats {
  std::uint64_t mults = 0;
  std::vector<std::int64_t> layer_ns;
};

template <class D>
class LayeredDpState {
  using value_type = typename D::value_type;
  using acc_type = typename D::acc_type;

  struct SliceOps {
    static void add_assign(value_type& a, const value_type& b) {
      D::add_assign(a, b);
    }
  };

 public:
  // Seeds dp on the empty set and the singletons from base (other entries of
  // base are ignored), caches zeta slices 0 and 1, and stands at layer 1.
  // An engine sized n = 1 is complete immediately.
  LayeredDpState(int n, const SetFunction<value_type>& base,
                 EngineOptions options = {},
                 const CardinalityIndex* index = nullptr)
      : n_(n),
        options_(options),
        dp_(std::size_t{1} << n),
        zeta_(n + 1),
        acc_(std::size_t{1} << n),
        layer_(1) {
    assert(n >= 1 && base.n() == n);
    if (index == nullptr) {
      owned_index_ = std::make_unique<CardinalityIndex>(n);
      index = owned_index_.get();
    }
    index_ = index;

    dp_[0] = base.at_bits(0);
    for (int i = 0; i < n_; ++i)
      dp_[std::uint32_t{1} << i] = base[RelationSet::singleton(i)];

    zeta_[0].assign(dp_.size(), value_type{});
    std::fill(zeta_[0].begin(), zeta_[0].end(), dp_[0]);
    zeta_[1].assign(dp_.size(), value_type{});
    for (int i = 0; i < n_; ++i)
      zeta_[1][std::uint32_t{1} << i] = dp_[std::uint32_t{1} << i];
    detail::zeta_inplace<value_type, SliceOps>(zeta_[1], n_);
  }

  int n() const { return n_; }
  int current_layer() const { return layer_; }
  bool complete() const { return layer_ >= n_; }

  const value_type& dp(RelationSet s) const { return dp_[s.bits()]; }
  SetFunction<value_type> dp_table() const {
    return SetFunction<value_type>(n_, dp_);
  }
  const std::vector<value_type>& zeta_slice(int r) const {
    assert(r <= layer_);
    return zeta_[r];
  }
  const EngineStats& stats() const { return stats_; }

  // Finalizes layer k = current_layer + 1: ranked product, restricted
  // Moebius, post_update on every set of cardinality k, new cached slice.
  // post_update receives (set, convolution value) and must return the dp
  // value to store; it is called exactly once per rank-k set.
  template <class PostUpdate>
  void advance(PostUpdate&& post_update) {
    assert(!complete());
    auto t0 = std::chrono::steady_clock::now();
    int k = layer_ + 1;
    const auto& by_card = index_->by_card;

    std::fill(acc_.begin(), acc_.end(), acc_type{});

    if (options_.small_layer_direct && k <= kSmallLayerMax) {
      // Direct split enumeration; same ring value as the ranked product.
      for (std::uint32_t s : by_card[k]) {
        acc_type acc{};
        for (std::uint32_t t = (0 - s) & s; t != s; t = (t - s) & s) {
          D::mul_add(acc, dp_[t], dp_[s ^ t], false);
          ++stats_.mults;
        }
        acc_[s] = std::move(acc);
      }
    } else {
      // Ranked product into the accumulator. Below cardinality max(d, k-d)
      // one factor is still zero by rank support, so those sets are skipped;
      // the same holds for everything above k, which the next DP layers
      // never read at rank k.
      for (int d = 1; d <= k / 2; ++d) {
        int kd = k - d;
        bool doubled = d != kd;
        const std::vector<value_type>& a = zeta_[d];
        const std::vector<value_type>& b = zeta_[kd];
        for (int j = kd; j <= k && j <= n_; ++j) {
          for (std::uint32_t s : by_card[j])
            D::mul_add(acc_[s], a[s], b[s], doubled);
          stats_.mults += by_card[j].size();
        }
      }

      // Moebius, restricted to cardinality <= k. Sets below max over d of
      // max(d, k-d) = ceil(k/2) hold the ring zero throughout: their
      // accumulator entries were never written and every subset of theirs
      // is zero too, so the restricted passes leave them untouched.
      int low = (k + 1) / 2;
      for (int bit = 0; bit < n_; ++bit) {
        std::uint32_t bit_mask = std::uint32_t{1} << bit;
        for (int j = low; j <= k && j <= n_; ++j)
          for (std::uint32_t s : by_card[j])
            if (s & bit_mask) D::sub_assign(acc_[s], acc_[s ^ bit_mask]);
      }
    }

    for (std::uint32_t s : by_card[k])
      dp_[s] = post_update(RelationSet(s), std::move(acc_[s]));

    // Fresh zeta slice for rank k; contiguous full passes vectorize well
    // and values can only live at cardinality >= k afterwards.
    zeta_[k].assign(dp_.size(), value_type{});
    for (std::uint32_t s : by_card[k]) zeta_[k][s] = dp_[s];
    detail::zeta_inplace<value_type, SliceOps>(zeta_[k], n_);

    layer_ = k;
    stats_.layer_ns.push_back(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now() - t0)
            .count());
  }

 private:
  int n_;
  EngineOptions options_;
  const CardinalityIndex* index_ = nullptr;
  std::unique_ptr<CardinalityIndex> owned_index_;
  std::vector<value_type> dp_;
  std::vector<std::vector<value_type>> zeta_;
  std::vector<acc_type> acc_;
  int layer_;
  EngineStats stats_;
};

template <class D>
LayeredDpState<D> layered_init(int n,
                               const SetFunction<typename D::value_type>& base,
                               EngineOptions options = {},
                               const CardinalityIndex* index = nullptr) {
  return LayeredDpState<D>(n, base, options, index);
}

template <class D, class PostUpdate>
void layered_advance(LayeredDpState<D>& state, PostUpdate&& post_update) {
  state.advance(std::forward<PostUpdate>(post_update));
}

}  // namespace joinconv
