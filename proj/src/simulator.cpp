#include "ucover/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ucover/errors.hpp"

namespace ucover {

namespace {

void require_samples(const SamplePath& path, std::int64_t n, const char* what) {
  if (n > path.size()) {
    throw Error(ErrorCode::insufficient_samples, std::string(what) + " needs " + std::to_string(n) +
                                                     " samples but the path has " + std::to_string(path.size()));
  }
}

std::vector<double> sorted_prefix(const SamplePath& path, std::int64_t from, std::int64_t to) {
  std::vector<double> v(path.points().begin() + from, path.points().begin() + to);
  std::sort(v.begin(), v.end());
  return v;
}

struct MeanVar {
  double mean = 0.0;
  double se = 0.0;
};

MeanVar mean_se(std::span<const double> xs) {
  MeanVar out;
  if (xs.empty()) return out;
  long double sum = 0.0L;
  for (double x : xs) sum += x;
  const long double mean = sum / static_cast<long double>(xs.size());
  out.mean = static_cast<double>(mean);
  if (xs.size() < 2) return out;
  long double ss = 0.0L;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const long double var = ss / static_cast<long double>(xs.size() - 1);
  out.se = static_cast<double>(std::sqrt(var / static_cast<long double>(xs.size())));
  return out;
}

void require_checkpoints(std::span<const std::int64_t> checkpoints, std::int64_t floor_value) {
  if (checkpoints.empty()) throw Error(ErrorCode::invalid_configuration, "at least one checkpoint is required");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < floor_value) {
      throw Error(ErrorCode::invalid_configuration, "checkpoint " + std::to_string(checkpoints[i]) +
                                                        " is below the smallest admissible index " +
                                                        std::to_string(floor_value));
    }
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw Error(ErrorCode::invalid_configuration, "checkpoints must be strictly increasing");
    }
  }
}

void require_trials(std::int64_t trials) {
  if (trials < 1) throw Error(ErrorCode::invalid_configuration, "trials must be >= 1");
}

}  // namespace

SamplePath::SamplePath(std::uint64_t master_seed, std::uint64_t trial_id, std::int64_t N)
    : seed_(master_seed), trial_(trial_id) {
  if (N < 1) throw Error(ErrorCode::domain, "sample path length must be >= 1");
  extend(N);
}

void SamplePath::extend(std::int64_t N) {
  const auto have = static_cast<std::int64_t>(points_.size());
  if (N <= have) return;
  PhiloxStream stream(seed_, trial_);
  points_.reserve(static_cast<std::size_t>(N));
  for (std::int64_t i = have; i < N; ++i) points_.push_back(stream.uniform(static_cast<std::uint64_t>(i)));
}

SamplePath sample_path(std::uint64_t master_seed, std::uint64_t trial_id, std::int64_t N) {
  return SamplePath(master_seed, trial_id, N);
}

void CenterIndex::insert(double x) {
  extra_.insert(std::upper_bound(extra_.begin(), extra_.end(), x), x);
  rebalance();
}

void CenterIndex::insert_range(std::span<const double> xs) {
  extra_.insert(extra_.end(), xs.begin(), xs.end());
  std::sort(extra_.begin(), extra_.end());
  rebalance();
}

void CenterIndex::rebalance() {
  const auto limit = static_cast<std::size_t>(std::sqrt(static_cast<double>(main_.size()))) + 16;
  if (extra_.size() <= limit) return;
  const auto mid = static_cast<std::ptrdiff_t>(main_.size());
  main_.insert(main_.end(), extra_.begin(), extra_.end());
  std::inplace_merge(main_.begin(), main_.begin() + mid, main_.end());
  extra_.clear();
}

ArcSet CenterIndex::intersect_balls(const ArcSet& a, double r) const {
  const std::span<const double> groups[] = {main_, extra_};
  return intersect_with_balls(a, std::span<const std::span<const double>>(groups), r);
}

ArcSet CenterIndex::union_balls(double r) const { return intersect_balls(ArcSet::full(), r); }

ArcSet build_E(const SamplePath& path, std::int64_t n, const RadiusFamily& f) {
  if (n < 1) throw Error(ErrorCode::domain, "E_n needs n >= 1");
  require_samples(path, n, "E_n");
  return union_of_balls(sorted_prefix(path, 0, n), f(n));
}

std::vector<ArcSet> uniform_set_trajectory(const SamplePath& path, std::int64_t p,
                                           std::span<const std::int64_t> checkpoints, const RadiusFamily& f) {
  if (p < 1) throw Error(ErrorCode::domain, "p must be >= 1");
  require_checkpoints(checkpoints, p);
  require_samples(path, checkpoints.back(), "uniform set approximation");

  std::vector<ArcSet> out;
  out.reserve(checkpoints.size());
  CenterIndex index;
  index.insert_range(path.points().subspan(0, static_cast<std::size_t>(p)));
  ArcSet running = index.union_balls(f(p));
  std::size_t next = 0;
  for (std::int64_t n = p;; ++n) {
    if (n > p) {
      index.insert(path.omega(n));
      if (!running.empty()) running = index.intersect_balls(running, f(n));
    }
    if (n == checkpoints[next]) {
      out.push_back(running);
      if (++next == checkpoints.size()) break;
    }
  }
  return out;
}

ArcSet uniform_set_approx(const SamplePath& path, std::int64_t p, std::int64_t N, const RadiusFamily& f) {
  if (N < p) throw Error(ErrorCode::domain, "uniform set approximation needs p <= N");
  const std::int64_t cp[] = {N};
  return std::move(uniform_set_trajectory(path, p, cp, f).front());
}

ArcSet build_F(const SamplePath& path, const GeometricSchedule& sched, int j, const RadiusFamily& f) {
  if (j < 0) throw Error(ErrorCode::domain, "F_j needs j >= 0");
  require_samples(path, sched.n(j + 1), "F_j");
  return union_of_balls(sorted_prefix(path, sched.n(j - 1), sched.n(j)), f(sched.n(j + 1)));
}

ArcSet mu_lm_support(const SamplePath& path, const GeometricSchedule& sched, int l, int m, const RadiusFamily& f) {
  if (l < 0 || l > m) throw Error(ErrorCode::domain, "mu_{l,m} needs 0 <= l <= m");
  require_samples(path, sched.n(m + 1), "mu_{l,m}");
  ArcSet support = build_F(path, sched, l, f);
  for (int j = l + 1; j <= m && !support.empty(); ++j) {
    const std::vector<double> centers = sorted_prefix(path, sched.n(j - 1), sched.n(j));
    support = intersect_with_balls(support, centers, f(sched.n(j + 1)));
  }
  return support;
}

std::vector<std::int64_t> geometric_checkpoints(std::int64_t start, std::int64_t stop, double factor) {
  if (start < 1 || stop < start || !(factor > 1.0)) {
    throw Error(ErrorCode::invalid_configuration, "checkpoints need 1 <= start <= stop and factor > 1");
  }
  std::vector<std::int64_t> out;
  double x = static_cast<double>(start);
  std::int64_t v = start;
  while (v < stop) {
    out.push_back(v);
    x *= factor;
    v = std::max(v + 1, static_cast<std::int64_t>(std::llround(x)));
  }
  out.push_back(stop);
  return out;
}

Interval95 wilson_interval(std::int64_t k, std::int64_t n) {
  if (n <= 0) return {};
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // The endpoints are exact at k = 0 and k = n; rounding would leave ~1e-18.
  return {k == 0 ? 0.0 : std::max(0.0, center - half), k == n ? 1.0 : std::min(1.0, center + half)};
}

std::vector<CoverageRow> coverage_experiment(const RadiusFamily& f, std::span<const std::int64_t> checkpoints,
                                             std::int64_t trials, const RunOptions& opt) {
  require_trials(trials);
  require_checkpoints(checkpoints, f.n_min());
  const std::int64_t N = checkpoints.back();

  const auto flags = run_trials(trials, opt.threads, [&](std::int64_t t) {
    const SamplePath path(opt.master_seed, static_cast<std::uint64_t>(t), N);
    std::vector<char> not_covered;
    not_covered.reserve(checkpoints.size());
    CenterIndex index;
    std::int64_t have = 0;
    for (const std::int64_t n : checkpoints) {
      index.insert_range(path.points().subspan(static_cast<std::size_t>(have), static_cast<std::size_t>(n - have)));
      have = n;
      not_covered.push_back(covers_full(index.union_balls(f(n))) ? 0 : 1);
    }
    return not_covered;
  });

  std::vector<CoverageRow> rows;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    CoverageRow row;
    row.n = checkpoints[c];
    row.trials = trials;
    for (const auto& v : flags) row.not_covered += v[c];
    row.frequency = static_cast<double>(row.not_covered) / static_cast<double>(trials);
    const Interval95 ci = wilson_interval(row.not_covered, trials);
    row.wilson_lo = ci.lo;
    row.wilson_hi = ci.hi;
    const double r = f(row.n);
    if (2.0 * r < 1.0) {
      row.shepp_lower = shepp_lower(row.n, r);
      row.shepp_upper = shepp_upper(row.n, r);
      const bool in_range = 4.0 * r < 1.0;
      row.shepp_lower_2r = in_range ? shepp_lower(row.n, 2.0 * r) : std::numeric_limits<double>::quiet_NaN();
      row.shepp_upper_2r = in_range ? shepp_upper(row.n, 2.0 * r) : std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<MeasureRow> measure_experiment(const RadiusFamily& f, std::int64_t p,
                                           std::span<const std::int64_t> checkpoints, std::int64_t trials,
                                           const RunOptions& opt) {
  require_trials(trials);
  if (p < f.n_min()) throw Error(ErrorCode::invalid_configuration, "p must be >= n_min of the radius family");
  require_checkpoints(checkpoints, p);
  const std::int64_t N = checkpoints.back();

  struct TrialData {
    std::vector<double> u, arcs, e;
  };
  const auto data = run_trials(trials, opt.threads, [&](std::int64_t t) {
    const SamplePath path(opt.master_seed, static_cast<std::uint64_t>(t), N);
    TrialData d;
    for (const ArcSet& s : uniform_set_trajectory(path, p, checkpoints, f)) {
      d.u.push_back(measure(s));
      d.arcs.push_back(static_cast<double>(s.size()));
    }
    for (const std::int64_t n : checkpoints) d.e.push_back(measure(build_E(path, n, f)));
    return d;
  });

  std::vector<MeasureRow> rows;
  std::vector<double> u, arcs, e;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    u.clear();
    arcs.clear();
    e.clear();
    for (const auto& d : data) {
      u.push_back(d.u[c]);
      arcs.push_back(d.arcs[c]);
      e.push_back(d.e[c]);
    }
    MeasureRow row;
    row.N = checkpoints[c];
    const MeanVar mu = mean_se(u);
    const MeanVar me = mean_se(e);
    row.mean_measure_U = mu.mean;
    row.se_measure_U = mu.se;
    row.mean_arcs_U = mean_se(arcs).mean;
    row.mean_measure_E = me.mean;
    row.se_measure_E = me.se;
    const double r = f(row.N);
    row.expected_measure_E =
        2.0 * r >= 1.0 ? 1.0 : -std::expm1(static_cast<double>(row.N) * std::log1p(-2.0 * r));
    rows.push_back(row);
  }
  return rows;
}

std::vector<CountabilityRow> countability_experiment(const RadiusFamily& f, std::int64_t p,
                                                     std::span<const std::int64_t> checkpoints, std::int64_t trials,
                                                     const RunOptions& opt) {
  require_trials(trials);
  if (p < f.n_min()) throw Error(ErrorCode::invalid_configuration, "p must be >= n_min of the radius family");
  require_checkpoints(checkpoints, p);
  const std::int64_t N = checkpoints.back();

  struct Obs {
    double measure, arcs, ratio;
    bool contains_all, at_most_p, stabilized, criterion;
  };
  const auto data = run_trials(trials, opt.threads, [&](std::int64_t t) {
    const SamplePath path(opt.master_seed, static_cast<std::uint64_t>(t), N);
    std::vector<Obs> obs;
    const auto sets = uniform_set_trajectory(path, p, checkpoints, f);
    for (std::size_t c = 0; c < sets.size(); ++c) {
      const ArcSet& s = sets[c];
      Obs o{};
      o.measure = measure(s);
      o.arcs = static_cast<double>(s.size());
      o.ratio = o.measure / (2.0 * static_cast<double>(p) * f(checkpoints[c]));
      o.contains_all = true;
      for (std::int64_t k = 1; k <= p; ++k) o.contains_all = o.contains_all && contains(s, path.omega(k));
      o.at_most_p = static_cast<std::int64_t>(s.size()) <= p;
      o.stabilized = static_cast<std::int64_t>(s.size()) == p && o.contains_all;
      o.criterion = o.at_most_p && o.contains_all && o.ratio >= 0.4 && o.ratio <= 1.0 + 1e-12;
      obs.push_back(o);
    }
    return obs;
  });

  std::vector<CountabilityRow> rows;
  const double n = static_cast<double>(trials);
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    CountabilityRow row;
    row.N = checkpoints[c];
    long double m = 0, a = 0, ratio = 0;
    double stab = 0, all = 0, atmost = 0, crit = 0;
    for (const auto& d : data) {
      const Obs& o = d[c];
      m += o.measure;
      a += o.arcs;
      ratio += o.ratio;
      stab += o.stabilized;
      all += o.contains_all;
      atmost += o.at_most_p;
      crit += o.criterion;
    }
    row.mean_measure = static_cast<double>(m / n);
    row.mean_arcs = static_cast<double>(a / n);
    row.mean_ratio = static_cast<double>(ratio / n);
    row.frac_stabilized = stab / n;
    row.frac_contains_all = all / n;
    row.frac_at_most_p = atmost / n;
    row.frac_criterion = crit / n;
    rows.push_back(row);
  }
  return rows;
}

CorrelationReport ball_correlation_check(double r, std::int64_t trials, double x, double y,
                                          std::uint64_t master_seed) {
  if (!(r > 0.0 && r < 0.25)) throw Error(ErrorCode::invalid_radius, "correlation check needs 0 < r < 1/4");
  require_trials(trials);
  CorrelationReport rep;
  rep.r = r;
  rep.distance = dist(x, y);
  rep.trials = trials;
  PhiloxEngine eng(master_seed, 0);
  std::int64_t hits = 0, misses = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const double w = eng.uniform();
    const bool hx = dist(w, x) <= r;
    const bool hy = dist(w, y) <= r;
    hits += hx && hy;
    misses += !hx && !hy;
  }
  const double n = static_cast<double>(trials);
  const bool near = rep.distance < 2.0 * r;
  rep.joint_hit_mean = static_cast<double>(hits) / n;
  rep.joint_hit_expected = std::max(0.0, 2.0 * r - rep.distance);
  const double ph = rep.joint_hit_expected;
  rep.joint_hit_se = std::sqrt(ph * (1.0 - ph) / n);
  rep.joint_hit_ok = std::fabs(rep.joint_hit_mean - ph) <= 4.0 * rep.joint_hit_se + 1e-15;
  rep.joint_miss_mean = static_cast<double>(misses) / n;
  rep.joint_miss_bound = 1.0 - 4.0 * r + (near ? 2.0 * r : 0.0);
  const double pm = 1.0 - 4.0 * r + ph;
  rep.joint_miss_se = std::sqrt(pm * (1.0 - pm) / n);
  rep.joint_miss_ok = rep.joint_miss_mean <= rep.joint_miss_bound + 4.0 * rep.joint_miss_se + 1e-15;
  return rep;
}

}  // namespace ucover
