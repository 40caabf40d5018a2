#pragma once

// Synthetic workload and measurement harness. Clique instances are grown in
// increasing cardinality order so every join size can be capped by the
// cheapest way to split the set, which keeps the table submultiplicative;
// all randomness is a fixed splittable 64-bit generator keyed by subset, so
// one (n, seed, max_card) triple pins the instance bit for bit.

#include <gmpxx.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "joinconv/optimize.hpp"
#include "joinconv/query_io.hpp"

namespace joinconv {

// SplitMix64; tiny, well known, identical output on every platform.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [1, bound], rejection-debiased.
  std::int64_t next_in(std::int64_t bound) {
    assert(bound >= 1);
    std::uint64_t range = static_cast<std::uint64_t>(bound);
    std::uint64_t limit = (~std::uint64_t{0} / range) * range;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return static_cast<std::int64_t>(v % range) + 1;
  }
};

// One independent stream per subset mask, all derived from the base seed.
inline SplitMix64 subset_stream(std::uint64_t seed, std::uint32_t subset) {
  SplitMix64 g(seed + 0x9E3779B97F4A7C15ull * (std::uint64_t{subset} + 1));
  g.next();
  return g;
}

// Largest max_card the generator accepts; keeps every partition product
// within 2^60 so the minimization below cannot overflow.
inline constexpr std::int64_t kMaxGeneratorCardinality = std::int64_t{1} << 30;

// Random clique query: base sizes uniform in [1, max_card]; each larger
// set S gets a size uniform in [1, min(max_card, min over partitions of
// c(S1) * c(S2))], filled in increasing cardinality order. The result always
// passes validate_cardinalities.
inline QueryInstance generate_clique(int n, std::uint64_t seed,
                                     std::int64_t max_card) {
  if (n < 2 || n > kMaxRelations)
    throw std::runtime_error("generate_clique: n out of range [2, 30]");
  if (max_card < 1 || max_card > kMaxGeneratorCardinality)
    throw std::runtime_error("generate_clique: max_card out of range");

  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("R" + std::to_string(i));
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  QueryInstance q(n, std::move(names), std::move(edges), true);

  std::vector<std::int64_t> c(std::size_t{1} << n, 0);
  for (int i = 0; i < n; ++i) {
    std::uint32_t s = std::uint32_t{1} << i;
    c[s] = subset_stream(seed, s).next_in(max_card);
    q.set_cardinality(RelationSet(s), c[s]);
  }
  for (int k = 2; k <= n; ++k)
    for (RelationSet set : sets_of_cardinality(n, k)) {
      std::uint32_t s = set.bits();
      // Cheapest split: each unordered partition once, fixing the side that
      // holds the lowest bit.
      std::uint32_t low = s & (0 - s);
      std::uint32_t rest = s ^ low;
      std::int64_t best = max_card;
      for (std::uint32_t u = 0; u != rest; u = (u - rest) & rest) {
        std::uint32_t t = u | low;
        best = std::min(best, c[t] * c[s ^ t]);
      }
      c[s] = subset_stream(seed, s).next_in(best);
      q.set_cardinality(set, c[s]);
    }
  return q;
}

// One algorithm run on one instance, everything a CSV row or a result file
// needs. Exactly one of cost_int / cost_real is meaningful.
struct AlgorithmRun {
  std::string algorithm;
  bool real_valued = false;
  std::int64_t cost_int = 0;
  double cost_real = 0.0;
  std::optional<std::int64_t> gamma;
  std::optional<JoinTree> tree;
  std::int64_t elapsed_ns = 0;
  RunStats stats;
};

inline const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names = {
      "dpsub-out",  "dpsub-max",  "dpsub-smj", "dpconv-max",
      "dpconv-out", "ccap-naive", "ccap-fast"};
  return names;
}

// Runs one named algorithm, tree extraction included in the clock. cap is
// only meaningful for the baseline dpsub algorithms.
inline AlgorithmRun run_algorithm(
    const std::string& name, const QueryInstance& q,
    OptimizerOptions options = {},
    std::optional<std::int64_t> cap = std::nullopt) {
  bool is_baseline =
      name == "dpsub-out" || name == "dpsub-max" || name == "dpsub-smj";
  if (cap && !is_baseline)
    throw std::runtime_error("--cap only applies to the dpsub baselines");

  AlgorithmRun run;
  run.algorithm = name;
  auto t0 = std::chrono::steady_clock::now();
  if (name == "dpsub-out") {
    DpResult<std::int64_t> r = dpsub_out(q, cap);
    run.cost_int = r.optimal_value;
    run.tree = std::move(r.tree);
    run.stats = std::move(r.stats);
  } else if (name == "dpsub-max") {
    DpResult<std::int64_t> r = dpsub_max(q, cap);
    run.cost_int = r.optimal_value;
    run.tree = std::move(r.tree);
    run.stats = std::move(r.stats);
  } else if (name == "dpsub-smj") {
    DpResult<double> r = dpsub_smj(q);
    run.real_valued = true;
    run.cost_real = r.optimal_value;
    run.tree = std::move(r.tree);
    run.stats = std::move(r.stats);
  } else if (name == "dpconv-max") {
    DpResult<std::int64_t> r = dpconv_max(q, options);
    run.cost_int = r.optimal_value;
    run.gamma = r.gamma;
    run.tree = std::move(r.tree);
    run.stats = std::move(r.stats);
  } else if (name == "dpconv-out") {
    DpResult<std::int64_t> r = dpconv_out_embedding(q, options);
    run.cost_int = r.optimal_value;
    run.tree = std::move(r.tree);
    run.stats = std::move(r.stats);
  } else if (name == "ccap-naive") {
    DpResult<std::int64_t> first = dpsub_max(q);
    std::int64_t gamma = first.optimal_value;
    DpResult<std::int64_t> second =
        ext::is_infinite(gamma) ? dpsub_out(q) : dpsub_out(q, gamma);
    run.cost_int = second.optimal_value;
    run.gamma = gamma;
    run.tree = std::move(second.tree);
    run.stats = std::move(second.stats);
    run.stats.splits += first.stats.splits;
  } else if (name == "ccap-fast") {
    CcapResult r = optimize_ccap(q, options);
    run.cost_int = r.capped.optimal_value;
    run.gamma = r.gamma_star;
    run.tree = std::move(r.capped.tree);
    run.stats = std::move(r.capped.stats);
  } else {
    throw std::runtime_error("unknown algorithm: " + name);
  }
  run.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return run;
}

struct BenchConfig {
  std::vector<std::string> algorithms;
  int n_min = 3;
  int n_max = 10;
  int repetitions = 3;
  std::uint64_t seed = 1;
  std::int64_t max_card = 100'000'000;
  bool timing = true;
  OptimizerOptions optimizer;
};

inline void validate_config(const BenchConfig& cfg) {
  if (cfg.algorithms.empty())
    throw std::runtime_error("bench: no algorithms selected");
  for (const std::string& a : cfg.algorithms) {
    const auto& known = known_algorithms();
    if (std::find(known.begin(), known.end(), a) == known.end())
      throw std::runtime_error("bench: unknown algorithm '" + a + "'");
  }
  if (cfg.n_min < 2 || cfg.n_max > kMaxRelations || cfg.n_min > cfg.n_max)
    throw std::runtime_error("bench: size range out of [2, 30]");
  if (cfg.repetitions < 1) throw std::runtime_error("bench: reps must be >= 1");
  if (cfg.max_card < 1 || cfg.max_card > kMaxGeneratorCardinality)
    throw std::runtime_error("bench: max_card out of range");
  for (const std::string& a : cfg.algorithms)
    if (a == "dpconv-out" &&
        checked_mul(cfg.max_card, cfg.n_max) > cfg.optimizer.exponent_budget)
      throw std::runtime_error(
          "bench: dpconv-out refused, max_card * n exceeds the exponent "
          "budget; lower --max-card");
}

// Instance seed for one (n, rep) cell of a sweep.
inline std::uint64_t instance_seed(std::uint64_t base, int n, int rep) {
  SplitMix64 g(base ^ (std::uint64_t(n) << 32) ^ std::uint64_t(rep));
  return g.next();
}

inline std::string format_cost(const AlgorithmRun& run) {
  if (run.real_valued) {
    std::ostringstream os;
    os << std::setprecision(17) << run.cost_real;
    return os.str();
  }
  if (ext::is_infinite(run.cost_int)) return "inf";
  return std::to_string(run.cost_int);
}

// Full sweep: one generated instance per (n, rep), every selected algorithm
// on it, one CSV row each. Where two algorithms compute the same objective
// their values must agree; a mismatch aborts with enough detail to replay
// the exact instance.
inline void run_benchmark(const BenchConfig& cfg, std::ostream& csv,
                          std::ostream* summary = nullptr) {
  validate_config(cfg);
  csv << "n,rep,algorithm,cost_value,elapsed_ns,splits_enumerated,"
         "ring_multiplications\n";

  struct Key {
    int n;
    std::string algorithm;
    bool operator<(const Key& o) const {
      return n != o.n ? n < o.n : algorithm < o.algorithm;
    }
  };
  std::vector<std::pair<Key, std::int64_t>> timings;

  for (int n = cfg.n_min; n <= cfg.n_max; ++n)
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      std::uint64_t seed = instance_seed(cfg.seed, n, rep);
      QueryInstance q = generate_clique(n, seed, cfg.max_card);

      std::vector<AlgorithmRun> runs;
      for (const std::string& name : cfg.algorithms)
        runs.push_back(run_algorithm(name, q, cfg.optimizer));

      auto check_agree = [&](const char* a, const char* b) {
        const AlgorithmRun* ra = nullptr;
        const AlgorithmRun* rb = nullptr;
        for (const AlgorithmRun& r : runs) {
          if (r.algorithm == a) ra = &r;
          if (r.algorithm == b) rb = &r;
        }
        if (ra && rb && ra->cost_int != rb->cost_int)
          throw std::logic_error(
              "benchmark consistency failure: " + std::string(a) + "=" +
              format_cost(*ra) + " vs " + std::string(b) + "=" +
              format_cost(*rb) + " at n=" + std::to_string(n) +
              " rep=" + std::to_string(rep) +
              " (reproduce: generate --n " + std::to_string(n) + " --seed " +
              std::to_string(seed) + " --max-card " +
              std::to_string(cfg.max_card) + ")");
      };
      check_agree("dpsub-max", "dpconv-max");
      check_agree("dpsub-out", "dpconv-out");
      check_agree("ccap-naive", "ccap-fast");

      for (const AlgorithmRun& run : runs) {
        std::int64_t elapsed = cfg.timing ? run.elapsed_ns : 0;
        csv << n << ',' << rep << ',' << run.algorithm << ','
            << format_cost(run) << ',' << elapsed << ',' << run.stats.splits
            << ',' << run.stats.mults << '\n';
        if (cfg.timing)
          timings.emplace_back(Key{n, run.algorithm}, run.elapsed_ns);
      }
    }

  if (summary && cfg.timing) {
    std::sort(timings.begin(), timings.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    *summary << "n algorithm median_ns mean_ns\n";
    for (std::size_t i = 0; i < timings.size();) {
      std::size_t j = i;
      std::vector<std::int64_t> vals;
      while (j < timings.size() && !(timings[i].first < timings[j].first) &&
             !(timings[j].first < timings[i].first))
        vals.push_back(timings[j++].second);
      std::sort(vals.begin(), vals.end());
      std::int64_t median = vals[vals.size() / 2];
      if (vals.size() % 2 == 0)
        median = (vals[vals.size() / 2 - 1] + vals[vals.size() / 2]) / 2;
      double mean = 0;
      for (std::int64_t v : vals) mean += double(v);
      mean /= double(vals.size());
      *summary << timings[i].first.n << ' ' << timings[i].first.algorithm
               << ' ' << median << ' ' << std::fixed << std::setprecision(0)
               << mean << '\n';
      i = j;
    }
  }
}

// Closed-form operation counts: exhaustive split enumeration needs 3^n set
// operations, the approximate convolution route 2^{3n/2} / sqrt(eps). The
// cheaper side is decided in exact arithmetic by cross-multiplying
// 2^{3n} * eps_den against 3^{2n} * eps_num, with eps taken as the exact
// binary rational of the given double.
struct OpsTableRow {
  int n = 0;
  double epsilon = 0.0;
  mpz_class exact_ops;
  double approx_ops = 0.0;
  bool approx_below_exact = false;
};

inline std::vector<OpsTableRow> theoretical_ops_table(
    int n, const std::vector<double>& epsilons) {
  if (n < 1 || n > 4096)
    throw std::runtime_error("ops-table: n out of range [1, 4096]");
  mpz_class exact;
  mpz_ui_pow_ui(exact.get_mpz_t(), 3, n);
  std::vector<OpsTableRow> rows;
  for (double eps : epsilons) {
    if (!(eps > 0.0) || eps > 1.0)
      throw std::runtime_error("ops-table: eps must be in (0, 1]");
    OpsTableRow row;
    row.n = n;
    row.epsilon = eps;
    row.exact_ops = exact;
    row.approx_ops = std::pow(2.0, 1.5 * n) / std::sqrt(eps);
    mpq_class frac(eps);
    frac.canonicalize();
    mpz_class lhs, rhs;
    mpz_ui_pow_ui(lhs.get_mpz_t(), 2, 3 * static_cast<unsigned>(n));
    lhs *= frac.get_den();
    mpz_ui_pow_ui(rhs.get_mpz_t(), 3, 2 * static_cast<unsigned>(n));
    rhs *= frac.get_num();
    row.approx_below_exact = lhs < rhs;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace joinconv
