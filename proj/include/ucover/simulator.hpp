#pragma once

// Seeded Monte Carlo engine for the random covering model: sample paths,
// the sets E_n and F_j, finite approximations of the uniform covering set,
// and the coverage / measure / countability experiments.

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "ucover/bounds.hpp"
#include "ucover/radius.hpp"
#include "ucover/rng.hpp"
#include "ucover/torus.hpp"

namespace ucover {

inline constexpr std::uint64_t kDefaultSeed = 0x5EEDC0DE;

/// omega_1..omega_N for one trial; omega_k is word k-1 of the Philox stream
/// keyed by (master_seed, trial_id), so growing N keeps the prefix.
class SamplePath {
 public:
  SamplePath(std::uint64_t master_seed, std::uint64_t trial_id, std::int64_t N);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t trial_id() const { return trial_; }
  std::int64_t size() const { return static_cast<std::int64_t>(points_.size()); }
  /// 1-based.
  double omega(std::int64_t k) const { return points_[static_cast<std::size_t>(k - 1)]; }
  std::span<const double> points() const { return points_; }
  /// Appends draws up to N; no-op when already that long.
  void extend(std::int64_t N);

 private:
  std::uint64_t seed_;
  std::uint64_t trial_;
  std::vector<double> points_;
};

SamplePath sample_path(std::uint64_t master_seed, std::uint64_t trial_id, std::int64_t N);

/// Sorted multiset of centers that accepts insertions cheaply: a large sorted
/// block plus a small sorted overflow, merged once the overflow outgrows the
/// square root of the block.
class CenterIndex {
 public:
  void insert(double x);
  void insert_range(std::span<const double> xs);
  std::size_t size() const { return main_.size() + extra_.size(); }
  /// Intersection of `a` with the union of balls B(x, r) over all centers.
  ArcSet intersect_balls(const ArcSet& a, double r) const;
  ArcSet union_balls(double r) const;

 private:
  void rebalance();
  std::vector<double> main_;
  std::vector<double> extra_;
};

/// E_n = union of B(omega_k, r_n), k = 1..n.
ArcSet build_E(const SamplePath& path, std::int64_t n, const RadiusFamily& f);
/// Intersection of E_n over n = p..N, built incrementally.
ArcSet uniform_set_approx(const SamplePath& path, std::int64_t p, std::int64_t N, const RadiusFamily& f);

/// Runs the finite approximation forward and reports the running set at each
/// requested N (sorted ascending, all >= p).
std::vector<ArcSet> uniform_set_trajectory(const SamplePath& path, std::int64_t p,
                                           std::span<const std::int64_t> checkpoints, const RadiusFamily& f);

/// F_j = union of B(omega_k, r_{n_{j+1}}) over n_{j-1} < k <= n_j.
ArcSet build_F(const SamplePath& path, const GeometricSchedule& sched, int j, const RadiusFamily& f);
/// Intersection of F_j over j = l..m.
ArcSet mu_lm_support(const SamplePath& path, const GeometricSchedule& sched, int l, int m, const RadiusFamily& f);

/// Geometric checkpoints start, 2 start, 4 start, ... capped at stop (which is
/// always included).
std::vector<std::int64_t> geometric_checkpoints(std::int64_t start, std::int64_t stop, double factor = 2.0);

struct Interval95 {
  double lo = 0.0;
  double hi = 1.0;
};
/// Wilson score interval at 95% for k successes in n trials.
Interval95 wilson_interval(std::int64_t k, std::int64_t n);

struct RunOptions {
  std::uint64_t master_seed = kDefaultSeed;
  unsigned threads = 1;
};

/// Calls fn(trial_id) for trial_id in [0, trials) on up to `threads` workers
/// and returns the results in trial order. The first exception thrown by any
/// trial is rethrown after all workers stop.
template <class Fn>
auto run_trials(std::int64_t trials, unsigned threads, Fn&& fn) -> std::vector<decltype(fn(std::int64_t{}))> {
  using R = decltype(fn(std::int64_t{}));
  std::vector<R> results(static_cast<std::size_t>(trials));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::int64_t t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        results[static_cast<std::size_t>(t)] = fn(t);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(trials);
        return;
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::int64_t>(trials, 1))));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return results;
}

struct CoverageRow {
  std::int64_t n = 0;
  std::int64_t trials = 0;
  std::int64_t not_covered = 0;
  double frequency = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double shepp_lower = 0.0;
  double shepp_upper = 0.0;
  // Shepp's bounds with the true arc length 2 r_n of each ball; NaN when
  // 2 r_n >= 1/2, outside the range of Shepp's formulas.
  double shepp_lower_2r = 0.0;
  double shepp_upper_2r = 0.0;
};

/// Frequency of {T not contained in E_n} per checkpoint. The shepp_lower/upper
/// columns plug r_n in as the arc length, the usual substitution in covering
/// arguments; only the upper one is a valid bound for balls of radius r_n. When
/// 2 r_n >= 1 every ball is the whole circle and all Shepp columns are 0.
std::vector<CoverageRow> coverage_experiment(const RadiusFamily& f, std::span<const std::int64_t> checkpoints,
                                             std::int64_t trials, const RunOptions& opt = {});

struct MeasureRow {
  std::int64_t N = 0;
  double mean_measure_U = 0.0;
  double se_measure_U = 0.0;
  double mean_arcs_U = 0.0;
  double mean_measure_E = 0.0;
  double se_measure_E = 0.0;
  double expected_measure_E = 0.0;  // 1 - (1 - 2 r_N)^N
};

std::vector<MeasureRow> measure_experiment(const RadiusFamily& f, std::int64_t p,
                                           std::span<const std::int64_t> checkpoints, std::int64_t trials,
                                           const RunOptions& opt = {});

struct CountabilityRow {
  std::int64_t N = 0;
  double mean_measure = 0.0;
  double mean_arcs = 0.0;
  double mean_ratio = 0.0;         // measure / (2 p r_N)
  double frac_stabilized = 0.0;    // exactly p arcs, all omega_1..omega_p inside
  double frac_contains_all = 0.0;  // omega_1..omega_p inside
  double frac_at_most_p = 0.0;     // at most p arcs
  double frac_criterion = 0.0;     // at most p arcs, all inside, ratio in [0.4, 1]
};

std::vector<CountabilityRow> countability_experiment(const RadiusFamily& f, std::int64_t p,
                                                     std::span<const std::int64_t> checkpoints, std::int64_t trials,
                                                     const RunOptions& opt = {});

struct CorrelationReport {
  double r = 0.0;
  double distance = 0.0;
  std::int64_t trials = 0;
  double joint_hit_mean = 0.0;
  double joint_hit_expected = 0.0;  // max(0, 2r - d)
  double joint_hit_se = 0.0;
  bool joint_hit_ok = false;        // within 4 standard errors
  double joint_miss_mean = 0.0;
  double joint_miss_bound = 0.0;    // 1 - 4r + 2r 1{d < 2r}
  double joint_miss_se = 0.0;
  bool joint_miss_ok = false;
};

/// Random ball B(omega, r) with omega uniform; compares hit statistics at x, y
/// with their closed forms.
CorrelationReport ball_correlation_check(double r, std::int64_t trials, double x, double y,
                                          std::uint64_t master_seed = kDefaultSeed);

}  // namespace ucover
