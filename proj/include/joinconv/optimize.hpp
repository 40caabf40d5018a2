#pragma once

// Join-order optimizers over a query instance.
//
//   dpsub_*            exhaustive subset DP, every split of every set; the
//                      exactness baseline for everything else
//   feasible_under_gamma
//                      counting DP through the layered engine, clamped to
//                      {0, 1}: is there a tree whose intermediates all stay
//                      at or under gamma?
//   dpconv_max         smallest feasible gamma by halving over the sorted
//                      distinct join sizes, then a capped baseline pass to
//                      materialize table and tree
//   dpconv_out_embedding
//                      the (min, +) DP carried through the ring engine via
//                      the monomial cost embedding; exact, desk-scale
//   optimize_ccap      bound the largest intermediate first, then minimize
//                      total intermediate size under that bound

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "joinconv/costmodel.hpp"
#include "joinconv/layered.hpp"

namespace joinconv {

enum class CostKind { Out, Max, Smj };

struct RunStats {
  std::uint64_t splits = 0;
  std::uint64_t mults = 0;
  std::vector<std::int64_t> layer_ns;

  void merge_layers(const std::vector<std::int64_t>& other) {
    if (layer_ns.size() < other.size()) layer_ns.resize(other.size(), 0);
    for (std::size_t i = 0; i < other.size(); ++i) layer_ns[i] += other[i];
  }
};

template <class V>
struct DpResult {
  V optimal_value{};
  std::optional<std::int64_t> gamma;
  SetFunction<V> dp_table;
  std::optional<JoinTree> tree;
  RunStats stats;
};

// Thrown when the embedding would need exponents past the configured budget.
struct ExponentBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OptimizerOptions {
  EngineOptions engine;
  // Upper bound on W * n for the cost embedding; past it the monomial
  // encoding is refused outright rather than silently truncated.
  std::int64_t exponent_budget = std::int64_t{1} << 16;
};

inline constexpr double kSmjTolerance = 1e-9;

namespace detail {

inline std::vector<std::uint8_t> connectivity_table(const QueryInstance& q) {
  std::uint32_t size = std::uint32_t{1} << q.n();
  std::vector<std::uint8_t> conn(size, 0);
  for (std::uint32_t s = 1; s < size; ++s)
    conn[s] = q.connected(RelationSet(s)) ? 1 : 0;
  return conn;
}

}  // namespace detail

// Reconstructs an optimal tree from a finalized dp table: at each set, the
// first split (increasing bitmask order) whose combination reproduces the
// stored value wins, which makes the output deterministic.
inline JoinTree build_join_tree(const SetFunction<std::int64_t>& dp,
                                const QueryInstance& q, CostKind kind,
                                RelationSet s) {
  assert(kind != CostKind::Smj);
  if (s.count() == 1) return JoinTree::make_leaf(s.lowest());
  std::int64_t target = dp[s];
  assert(!ext::is_infinite(target));
  std::int64_t c = q.cardinality(s);
  for (RelationSet t : enumerate_proper_subsets(s)) {
    std::int64_t l = dp[t], r = dp[s - t];
    std::int64_t cand = kind == CostKind::Out
                            ? ext::add(c, ext::add(l, r))
                            : std::max(c, std::max(l, r));
    if (cand == target)
      return JoinTree::make_join(build_join_tree(dp, q, kind, t),
                                 build_join_tree(dp, q, kind, s - t));
  }
  throw std::logic_error("join tree extraction: no split matches the dp value");
}

// Sort-merge variant; real-valued, so the split test carries a pinned
// relative tolerance instead of exact equality.
inline JoinTree build_join_tree(const SetFunction<double>& dp,
                                const QueryInstance& q, RelationSet s) {
  if (s.count() == 1) return JoinTree::make_leaf(s.lowest());
  double target = dp[s];
  for (RelationSet t : enumerate_proper_subsets(s)) {
    double cand = xlogx(q.cardinality(t)) + xlogx(q.cardinality(s - t)) +
                  dp[t] + dp[s - t];
    if (std::abs(cand - target) <=
        kSmjTolerance * std::max(1.0, std::abs(target)))
      return JoinTree::make_join(build_join_tree(dp, q, t),
                                 build_join_tree(dp, q, s - t));
  }
  throw std::logic_error("join tree extraction: no split matches the dp value");
}

namespace detail {

template <CostKind K>
using dp_value_t =
    std::conditional_t<K == CostKind::Smj, double, std::int64_t>;

// The baseline: iterate sets in increasing mask order (subsets first), try
// every proper split. A cap prunes whole sets: c(S) > cap parks S at
// infinity without enumerating its splits.
template <CostKind K>
DpResult<dp_value_t<K>> dpsub_impl(const QueryInstance& q,
                                   std::optional<std::int64_t> cap) {
  using V = dp_value_t<K>;
  constexpr bool kReal = K == CostKind::Smj;
  const V kInf = kReal ? V(std::numeric_limits<double>::infinity())
                       : V(ext::kInfinity);
  int n = q.n();
  std::uint32_t size = std::uint32_t{1} << n;

  DpResult<V> result{kInf, std::nullopt, SetFunction<V>(n, kInf),
                     std::nullopt, RunStats{}};
  std::vector<V>& dp = result.dp_table.values();
  for (int i = 0; i < n; ++i) dp[std::uint32_t{1} << i] = V(0);

  std::vector<std::uint8_t> conn;
  if (!q.cross_products()) conn = connectivity_table(q);

  std::vector<double> xlx;
  if constexpr (kReal) {
    xlx.resize(size, 0.0);
    for (std::uint32_t s = 1; s < size; ++s)
      if (q.has_cardinality(RelationSet(s)))
        xlx[s] = xlogx(q.cardinality(RelationSet(s)));
  }

  const std::vector<std::int64_t>& card = q.raw_cardinalities().values();
  std::uint64_t splits = 0;
  for (std::uint32_t s = 1; s < size; ++s) {
    if (std::popcount(s) < 2) continue;
    if (!conn.empty() && !conn[s]) continue;
    std::int64_t c = card[s];
    if (cap && c > *cap) continue;
    V best = kInf;
    for (std::uint32_t t = (0 - s) & s; t != s; t = (t - s) & s) {
      ++splits;
      V cand;
      if constexpr (K == CostKind::Out)
        cand = ext::add(dp[t], dp[s ^ t]);
      else if constexpr (K == CostKind::Max)
        cand = std::max(dp[t], dp[s ^ t]);
      else
        cand = xlx[t] + xlx[s ^ t] + dp[t] + dp[s ^ t];
      best = std::min(best, cand);
    }
    if constexpr (K == CostKind::Out)
      dp[s] = ext::add(c, best);
    else if constexpr (K == CostKind::Max)
      dp[s] = best >= kInf ? kInf : std::max(c, best);
    else
      dp[s] = best;
  }

  result.stats.splits = splits;
  RelationSet full = q.all_relations();
  result.optimal_value = result.dp_table[full];
  bool solved = kReal ? result.optimal_value !=
                            std::numeric_limits<double>::infinity()
                      : !ext::is_infinite(std::int64_t(result.optimal_value));
  if (solved) {
    if constexpr (kReal)
      result.tree = build_join_tree(result.dp_table, q, full);
    else
      result.tree = build_join_tree(result.dp_table, q, K, full);
  }
  return result;
}

template <class V>
DpResult<V> single_relation_result() {
  DpResult<V> r{V(0), std::nullopt, SetFunction<V>(1), std::nullopt,
                RunStats{}};
  r.dp_table[RelationSet::singleton(0)] = V(0);
  r.tree = JoinTree::make_leaf(0);
  return r;
}

}  // namespace detail

inline DpResult<std::int64_t> dpsub_out(
    const QueryInstance& q, std::optional<std::int64_t> cap = std::nullopt) {
  return detail::dpsub_impl<CostKind::Out>(q, cap);
}

inline DpResult<std::int64_t> dpsub_max(
    const QueryInstance& q, std::optional<std::int64_t> cap = std::nullopt) {
  return detail::dpsub_impl<CostKind::Max>(q, cap);
}

inline DpResult<double> dpsub_smj(const QueryInstance& q) {
  return detail::dpsub_impl<CostKind::Smj>(q, std::nullopt);
}

// Is there a join tree for the whole query whose every intermediate result
// has at most gamma tuples? One clamped counting DP, so a yes also means a
// witness tree exists at every feasible set along the way.
inline bool feasible_under_gamma(const QueryInstance& q, std::int64_t gamma,
                                 EngineOptions engine_options = {},
                                 const CardinalityIndex* index = nullptr,
                                 RunStats* stats = nullptr) {
  int n = q.n();
  if (n == 1) return true;
  RelationSet full = q.all_relations();
  if (!q.cross_products() && !q.connected(full)) return false;
  // The root join belongs to every tree; a gamma below it can never work.
  if (q.cardinality(full) > gamma) return false;

  std::vector<std::uint8_t> conn;
  if (!q.cross_products()) conn = detail::connectivity_table(q);

  SetFunction<std::uint32_t> base(n, 0);
  for (int i = 0; i < n; ++i) base[RelationSet::singleton(i)] = 1;
  LayeredDpState<ClampedCountingDomain> engine(n, base, engine_options, index);
  while (!engine.complete())
    engine.advance([&](RelationSet s, std::int64_t conv) -> std::uint32_t {
      if (conv <= 0) return 0;
      if (!conn.empty() && !conn[s.bits()]) return 0;
      return q.cardinality(s) <= gamma ? 1 : 0;
    });
  if (stats) {
    stats->mults += engine.stats().mults;
    stats->merge_layers(engine.stats().layer_ns);
  }
  return engine.dp(full) > 0;
}

// Binary search state over the distinct join sizes, largest first. With
// feasibility monotone in gamma, the feasible candidates form a prefix of
// the list; p always names a known-feasible index and step the next stride.
struct GammaSearchState {
  std::vector<std::int64_t> candidates;
  std::size_t p = 0;
  std::size_t step = 0;

  static GammaSearchState for_instance(const QueryInstance& q) {
    GammaSearchState st;
    std::uint32_t size = std::uint32_t{1} << q.n();
    for (std::uint32_t s = 1; s < size; ++s) {
      RelationSet set(s);
      if (set.count() >= 2 && q.has_cardinality(set))
        st.candidates.push_back(q.cardinality(set));
    }
    std::sort(st.candidates.begin(), st.candidates.end(),
              std::greater<std::int64_t>());
    st.candidates.erase(
        std::unique(st.candidates.begin(), st.candidates.end()),
        st.candidates.end());
    return st;
  }
};

struct MaxSearchOutcome {
  std::int64_t gamma = 0;
  RunStats stats;
};

// The search half of dpconv_max: smallest gamma whose feasibility DP says
// yes. candidates[0] is the overall maximum and always feasible; probes
// below c(full set) are skipped since the root join alone rules them out.
inline MaxSearchOutcome dpconv_max_value(const QueryInstance& q,
                                         OptimizerOptions options = {}) {
  MaxSearchOutcome out;
  int n = q.n();
  if (n == 1) return out;
  RelationSet full = q.all_relations();
  if (!q.cross_products() && !q.connected(full)) {
    out.gamma = ext::kInfinity;
    return out;
  }

  GammaSearchState st = GammaSearchState::for_instance(q);
  assert(!st.candidates.empty());
  std::int64_t root = q.cardinality(full);
  auto root_pos =
      std::lower_bound(st.candidates.begin(), st.candidates.end(), root,
                       std::greater<std::int64_t>());
  assert(root_pos != st.candidates.end() && *root_pos == root);
  std::size_t hi = std::size_t(root_pos - st.candidates.begin());

  CardinalityIndex index(n);
  st.p = 0;
  st.step = hi == 0 ? 0 : std::bit_floor(hi);
  while (st.step) {
    std::size_t probe = st.p + st.step;
    if (probe <= hi &&
        feasible_under_gamma(q, st.candidates[probe], options.engine, &index,
                             &out.stats))
      st.p = probe;
    st.step >>= 1;
  }
  out.gamma = st.candidates[st.p];
  return out;
}

// Minimal largest-intermediate optimization: gamma search, then a capped
// baseline pass to materialize the dp table and an optimal tree. The capped
// pass must land exactly on the searched value.
inline DpResult<std::int64_t> dpconv_max(const QueryInstance& q,
                                         OptimizerOptions options = {}) {
  if (q.n() == 1) return detail::single_relation_result<std::int64_t>();
  MaxSearchOutcome search = dpconv_max_value(q, options);
  if (ext::is_infinite(search.gamma)) {
    DpResult<std::int64_t> r{ext::kInfinity, std::nullopt,
                             SetFunction<std::int64_t>(q.n(), ext::kInfinity),
                             std::nullopt, search.stats};
    return r;
  }
  DpResult<std::int64_t> result = dpsub_max(q, search.gamma);
  if (result.optimal_value != search.gamma)
    throw std::logic_error(
        "gamma search and capped materialization disagree; instance corrupt");
  result.gamma = search.gamma;
  result.stats.mults += search.stats.mults;
  result.stats.merge_layers(search.stats.layer_ns);
  return result;
}

// Exact total-intermediate-size optimization through the ring engine: costs
// ride as monomial exponents, the layered convolution counts trees per
// exponent, and each layer re-encodes the smallest surviving exponent plus
// the set's own join size. Demands W * n within the exponent budget.
inline DpResult<std::int64_t> dpconv_out_embedding(
    const QueryInstance& q, OptimizerOptions options = {}) {
  int n = q.n();
  if (n == 1) return detail::single_relation_result<std::int64_t>();
  std::int64_t w = max_join_cardinality(q);
  if (checked_mul(w, n) > options.exponent_budget)
    throw ExponentBudgetError(
        "cost embedding refused: W * n exceeds the exponent budget");

  std::vector<std::uint8_t> conn;
  if (!q.cross_products()) conn = detail::connectivity_table(q);

  SetFunction<CoefficientPolynomial> base(n);
  for (int i = 0; i < n; ++i)
    base[RelationSet::singleton(i)] = CoefficientPolynomial::monomial(0);
  LayeredDpState<EmbeddingDomain> engine(n, base, options.engine);
  while (!engine.complete())
    engine.advance([&](RelationSet s, CoefficientPolynomial conv) {
      if (!conn.empty() && !conn[s.bits()]) return CoefficientPolynomial{};
      if (conv.is_zero()) return CoefficientPolynomial{};
      return CoefficientPolynomial::monomial(conv.min_exponent() +
                                             q.cardinality(s));
    });

  DpResult<std::int64_t> result{0, std::nullopt,
                                SetFunction<std::int64_t>(n, ext::kInfinity),
                                std::nullopt, RunStats{}};
  std::uint32_t size = std::uint32_t{1} << n;
  for (std::uint32_t s = 1; s < size; ++s) {
    RelationSet set(s);
    const CoefficientPolynomial& p = engine.dp(set);
    if (!p.is_zero()) result.dp_table[set] = p.min_exponent();
  }
  result.stats.mults = engine.stats().mults;
  result.stats.layer_ns = engine.stats().layer_ns;
  RelationSet full = q.all_relations();
  result.optimal_value = result.dp_table[full];
  if (!ext::is_infinite(result.optimal_value))
    result.tree = build_join_tree(result.dp_table, q, CostKind::Out, full);
  return result;
}

// Two-pass capped optimization: bound the largest intermediate at its
// optimum gamma*, then minimize total intermediate size among the trees
// that respect the bound. Only the gamma value is needed from the first
// pass, so the tree materialization there is skipped.
struct CcapResult {
  std::int64_t gamma_star = 0;
  DpResult<std::int64_t> capped;
};

inline CcapResult optimize_ccap(const QueryInstance& q,
                                OptimizerOptions options = {}) {
  if (q.n() == 1)
    return CcapResult{0, detail::single_relation_result<std::int64_t>()};
  MaxSearchOutcome search = dpconv_max_value(q, options);
  CcapResult out;
  out.gamma_star = search.gamma;
  if (ext::is_infinite(search.gamma)) {
    out.capped = dpsub_out(q);
    return out;
  }
  out.capped = dpsub_out(q, search.gamma);
  out.capped.gamma = search.gamma;
  out.capped.stats.mults += search.stats.mults;
  out.capped.stats.merge_layers(search.stats.layer_ns);
  return out;
}

}  // namespace joinconv
