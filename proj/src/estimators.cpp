#include "ucover/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ucover/errors.hpp"

namespace ucover {

namespace {

constexpr double kCoverTol = 1e-12;

struct Stats {
  double mean = 0.0;
  double se = 0.0;
};

Stats stats(std::span<const double> xs) {
  Stats out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  LineFit fit;
  const std::size_t n = x.size();
  if (n < 2) return fit;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  const double sse = std::max(0.0, syy - fit.slope * sxy);
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (n > 2) fit.slope_se = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  return fit;
}

std::vector<double> sorted_centers(const SamplePath& path, std::span<const std::int64_t> idx) {
  std::vector<double> v;
  v.reserve(idx.size());
  for (const std::int64_t k : idx) v.push_back(path.omega(k));
  std::sort(v.begin(), v.end());
  return v;
}

ArcSet ball_union(const SamplePath& path, std::span<const std::int64_t> idx, double r) {
  return union_of_balls(sorted_centers(path, idx), r);
}

void check_cover_inputs(const SamplePath& path, const GeometricSchedule& sched, double c, int l, int i_max) {
  if (!(c > 0.0)) throw Error(ErrorCode::domain, "cover growth needs c > 0");
  if (l < 0 || i_max < l) throw Error(ErrorCode::domain, "cover growth needs 0 <= l <= i_max");
  if (path.size() < sched.n(i_max + 1)) {
    throw Error(ErrorCode::insufficient_samples,
                "cover growth needs " + std::to_string(sched.n(i_max + 1)) + " samples");
  }
}

// Running G_{l,i}: intersection of E_{n_j} over j = l..i.
class CoveredSet {
 public:
  CoveredSet(const SamplePath& path, const GeometricSchedule& sched, const RadiusFamily& f, int l)
      : path_(path), sched_(sched), f_(f) {
    add_until(sched.n(l));
    set_ = index_.union_balls(f(sched.n(l)));
  }

  void advance(int i) {
    add_until(sched_.n(i));
    if (!set_.empty()) set_ = index_.intersect_balls(set_, f_(sched_.n(i)));
  }

  const ArcSet& get() const { return set_; }

 private:
  void add_until(std::int64_t n) {
    index_.insert_range(path_.points().subspan(static_cast<std::size_t>(have_), static_cast<std::size_t>(n - have_)));
    have_ = n;
  }

  const SamplePath& path_;
  const GeometricSchedule& sched_;
  const RadiusFamily& f_;
  CenterIndex index_;
  std::int64_t have_ = 0;
  ArcSet set_;
};

}  // namespace

std::string_view to_string(CoverVariant v) { return v == CoverVariant::simple ? "simple" : "refined"; }

CoverGrowthTrace cover_growth_simple(const SamplePath& path, const GeometricSchedule& sched, double c, int l,
                                     int i_max) {
  check_cover_inputs(path, sched, c, l, i_max);
  const RadiusFamily f = RadiusFamily::power_law(c, 1.0);
  CoverGrowthTrace trace;
  trace.variant = CoverVariant::simple;
  trace.l = l;

  std::vector<std::int64_t> kept(static_cast<std::size_t>(sched.n(l)));
  std::iota(kept.begin(), kept.end(), std::int64_t{1});
  CoveredSet g(path, sched, f, l);
  ArcSet cover = ball_union(path, kept, f(sched.n(l)));
  std::int64_t admitted = 0;

  for (int i = l;; ++i) {
    if (i > l) g.advance(i);
    CoverLevel level;
    level.i = i;
    level.n_i = sched.n(i);
    level.N = static_cast<std::int64_t>(kept.size());
    level.M = admitted;
    level.covered_ok = includes(cover, g.get(), kCoverTol);
    trace.levels.push_back(level);
    if (i == i_max) break;

    // Indices whose ball B(omega_k, r_{n_{i+1}}) meets the current cover.
    const double r_next = f(sched.n(i + 1));
    const ArcSet reach = thicken(cover, r_next);
    admitted = 0;
    for (std::int64_t k = sched.n(i) + 1; k <= sched.n(i + 1); ++k) {
      if (contains(reach, path.omega(k))) {
        kept.push_back(k);
        ++admitted;
      }
    }
    cover = ball_union(path, kept, r_next);
  }
  return trace;
}

CoverGrowthTrace cover_growth_refined(const SamplePath& path, const GeometricSchedule& sched, double c, int l,
                                      int i_max) {
  check_cover_inputs(path, sched, c, l, i_max);
  const RadiusFamily f = RadiusFamily::power_law(c, 1.0);
  CoverGrowthTrace trace;
  trace.variant = CoverVariant::refined;
  trace.l = l;

  std::vector<std::int64_t> kept(static_cast<std::size_t>(sched.n(l)));  // I_i
  std::iota(kept.begin(), kept.end(), std::int64_t{1});
  std::vector<std::int64_t> spare;  // J_i
  std::vector<std::int64_t> all;
  CoveredSet g(path, sched, f, l);
  ArcSet cover = ball_union(path, kept, f(sched.n(l)));  // H_i
  std::int64_t admitted = 0;

  for (int i = l;; ++i) {
    if (i > l) g.advance(i);
    CoverLevel level;
    level.i = i;
    level.n_i = sched.n(i);
    level.N = static_cast<std::int64_t>(kept.size());
    level.Q = static_cast<std::int64_t>(spare.size());
    level.M = admitted;
    level.covered_ok = includes(cover, g.get(), kCoverTol);
    trace.levels.push_back(level);
    if (i == i_max) break;

    // A new ball meeting H_i is kept when it comes within r_{n_i} + r_{n_{i+2}}
    // of some center of H_i; otherwise its radius-r_{n_{i+2}} ball misses H_i
    // and it only serves this one level. Old spare indices are dropped.
    const double r_next = f(sched.n(i + 1));
    const ArcSet meets = thicken(cover, r_next);
    const ArcSet stays = thicken(cover, f(sched.n(i + 2)));
    spare.clear();
    admitted = 0;
    for (std::int64_t k = sched.n(i) + 1; k <= sched.n(i + 1); ++k) {
      const double w = path.omega(k);
      if (!contains(meets, w)) continue;
      ++admitted;
      if (contains(stays, w)) kept.push_back(k);
      else spare.push_back(k);
    }
    all = kept;
    all.insert(all.end(), spare.begin(), spare.end());
    cover = ball_union(path, all, r_next);
  }
  return trace;
}

CoverGrowthTrace cover_growth(CoverVariant variant, const SamplePath& path, const GeometricSchedule& sched,
                              double c, int l, int i_max) {
  return variant == CoverVariant::simple ? cover_growth_simple(path, sched, c, l, i_max)
                                         : cover_growth_refined(path, sched, c, l, i_max);
}

GrowthSummary summarize_growth(std::span<const CoverGrowthTrace> traces, double c, double theta) {
  GrowthSummary sum;
  sum.c = c;
  sum.theta = theta;
  sum.trials = static_cast<std::int64_t>(traces.size());
  if (traces.empty()) return sum;
  const CoverGrowthTrace& first = traces.front();
  sum.variant = first.variant;
  sum.l = first.l;
  sum.i_max = first.levels.back().i;
  const std::size_t L = first.levels.size();

  const ThetaDelta td = theta_delta(c, theta);
  const double ratio_bound = 2.0 * c * (theta * theta - 1.0) / theta;
  sum.exponent_bound = first.variant == CoverVariant::simple ? upper_bound_weak(c, theta).value
                                                             : std::log(lambda(c, theta)) / std::log(theta);

  std::vector<double> xs, ys, buf_a, buf_b;
  for (std::size_t k = 0; k < L; ++k) {
    GrowthLevelSummary lv;
    lv.i = first.levels[k].i;
    lv.n_i = first.levels[k].n_i;
    lv.ratio_bound = ratio_bound;

    buf_a.clear();
    buf_b.clear();
    for (const auto& t : traces) {
      buf_a.push_back(static_cast<double>(t.levels[k].N));
      buf_b.push_back(static_cast<double>(t.levels[k].Q));
      lv.covered_ok = lv.covered_ok && t.levels[k].covered_ok;
    }
    const Stats sn = stats(buf_a);
    const Stats sq = stats(buf_b);
    lv.mean_N = sn.mean;
    lv.se_N = sn.se;
    lv.mean_Q = sq.mean;
    lv.se_Q = sq.se;

    if (k + 1 < L) {
      // Next-level admissions per kept ball.
      buf_a.clear();
      for (const auto& t : traces) {
        buf_a.push_back(static_cast<double>(t.levels[k + 1].M) / static_cast<double>(t.levels[k].N));
      }
      const Stats sr = stats(buf_a);
      lv.mean_ratio = sr.mean;
      lv.se_ratio = sr.se;
      lv.ratio_ok = sr.mean <= ratio_bound + 4.0 * sr.se;
    }
    if (k > 0) {
      // Paired per-trial excess over the matrix recursion applied to the
      // previous level; its mean must not be significantly positive.
      const auto& prev = sum.levels.back();
      lv.predicted_N = (1.0 + td.big_theta) * prev.mean_N + td.big_theta * prev.mean_Q;
      lv.predicted_Q = td.delta * (prev.mean_N + prev.mean_Q);
      buf_a.clear();
      buf_b.clear();
      for (const auto& t : traces) {
        const double pn = static_cast<double>(t.levels[k - 1].N);
        const double pq = static_cast<double>(t.levels[k - 1].Q);
        buf_a.push_back(static_cast<double>(t.levels[k].N) - ((1.0 + td.big_theta) * pn + td.big_theta * pq));
        buf_b.push_back(static_cast<double>(t.levels[k].Q) - td.delta * (pn + pq));
      }
      const Stats dn = stats(buf_a);
      const Stats dq = stats(buf_b);
      lv.matrix_ok = dn.mean <= 4.0 * dn.se && dq.mean <= 4.0 * dq.se;
    }
    sum.all_covered_ok = sum.all_covered_ok && lv.covered_ok;
    xs.push_back(lv.i * std::log(theta));
    ys.push_back(std::log(lv.mean_N + lv.mean_Q));
    sum.levels.push_back(lv);
  }
  sum.exponent = fit_line(xs, ys).slope;
  return sum;
}

CoverGrowthExperiment cover_growth_experiment(CoverVariant variant, double c, double theta, int l, int levels,
                                              std::int64_t trials, const RunOptions& opt) {
  if (trials < 1) throw Error(ErrorCode::invalid_configuration, "trials must be >= 1");
  if (levels < 1) throw Error(ErrorCode::invalid_configuration, "levels must be >= 1");
  if (l < 0) throw Error(ErrorCode::invalid_configuration, "l must be >= 0");
  if (!(c > 0.0)) throw Error(ErrorCode::invalid_configuration, "c must be > 0");
  const GeometricSchedule sched(theta);
  const int i_max = l + levels;
  const std::int64_t N = sched.n(i_max + 1);
  CoverGrowthExperiment out;
  out.traces = run_trials(trials, opt.threads, [&](std::int64_t t) {
    const SamplePath path(opt.master_seed, static_cast<std::uint64_t>(t), N);
    return cover_growth(variant, path, sched, c, l, i_max);
  });
  out.summary = summarize_growth(out.traces, c, theta);
  return out;
}

void write_trace_csv(std::ostream& out, std::span<const CoverGrowthTrace> traces) {
  out << "trial,level,i,n_i,N_i,Q_i,M_i,covered_ok\n";
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const auto& levels = traces[t].levels;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const CoverLevel& lv = levels[k];
      out << t << ',' << k << ',' << lv.i << ',' << lv.n_i << ',' << lv.N << ',' << lv.Q << ',' << lv.M << ','
          << (lv.covered_ok ? 1 : 0) << '\n';
    }
  }
}

BoxFit box_dimension_fit(std::span<const ArcSet> sets, std::span<const std::int64_t> scales) {
  if (sets.size() != scales.size()) throw Error(ErrorCode::domain, "box fit needs one set per scale");
  if (scales.size() < 4) throw Error(ErrorCode::domain, "box fit needs at least 4 scales");
  BoxFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const std::int64_t count = box_count(sets[i], scales[i]);
    fit.scales.push_back(scales[i]);
    fit.counts.push_back(count);
    if (count == 0) continue;
    x.push_back(std::log(static_cast<double>(scales[i])));
    y.push_back(std::log(static_cast<double>(count)));
  }
  if (x.size() < 2) return fit;
  const LineFit lf = fit_line(x, y);
  fit.defined = true;
  fit.raw_slope = lf.slope;
  fit.slope = std::clamp(lf.slope, 0.0, 1.0);
  fit.r2 = lf.r2;
  fit.slope_se = lf.slope_se;
  return fit;
}

BoxFit mu_support_box_fit(const SamplePath& path, const GeometricSchedule& sched, double c, int l, int m) {
  if (m - l < 3) throw Error(ErrorCode::domain, "box fit of mu supports needs m - l >= 3");
  const RadiusFamily f = RadiusFamily::power_law(c, 1.0);
  std::vector<ArcSet> sets;
  std::vector<std::int64_t> scales;
  ArcSet support;
  for (int mm = l; mm <= m; ++mm) {
    support = mm == l ? build_F(path, sched, l, f) : intersect(support, build_F(path, sched, mm, f));
    sets.push_back(support);
    const double k = std::floor(static_cast<double>(sched.n(mm + 1)) / (2.0 * c));
    scales.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(k)));
  }
  return box_dimension_fit(sets, scales);
}

RieszReport riesz_experiment(const GeometricSchedule& sched, double c, int l, int m, double s, std::int64_t trials,
                             const RunOptions& opt) {
  const double theta = sched.theta();
  if (!(c > c_star(theta))) {
    throw Error(ErrorCode::invalid_configuration, "riesz experiment needs c > c_star(theta)");
  }
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::invalid_configuration, "riesz experiment needs 0 < s < 1");
  const double s_ct = s_exponent(c, theta);
  if (!(s + s_ct < 1.0)) throw Error(ErrorCode::invalid_configuration, "riesz experiment needs s + s(c, theta) < 1");
  if (l < 0 || m < l) throw Error(ErrorCode::invalid_configuration, "riesz experiment needs 0 <= l <= m");
  if (trials < 1) throw Error(ErrorCode::invalid_configuration, "trials must be >= 1");

  const RadiusFamily f = RadiusFamily::power_law(c, 1.0);
  RieszReport rep;
  rep.c = c;
  rep.theta = theta;
  rep.l = l;
  rep.m = m;
  rep.s = s;
  rep.s_ctheta = s_ct;
  rep.trials = trials;
  rep.k_lm = k_lm(sched, f, l, m);
  rep.c_l = c_l_constant(c, theta, l, s_ct);
  rep.j_s = riesz_total(s);
  rep.j_s_total = riesz_total(s + s_ct);
  rep.offdiag_bound = rep.k_lm * rep.k_lm * rep.c_l * rep.j_s_total;
  rep.full_bound = rep.k_lm * rep.k_lm * (rep.j_s + rep.c_l * rep.j_s_total);

  const std::int64_t N = sched.n(m + 1);
  struct Obs {
    double energy = 0.0, measure = 0.0;
  };
  const auto obs = run_trials(trials, opt.threads, [&](std::int64_t t) {
    const SamplePath path(opt.master_seed, static_cast<std::uint64_t>(t), N);
    const ArcSet support = mu_lm_support(path, sched, l, m, f);
    return Obs{riesz_energy(support, s), measure(support)};
  });
  std::vector<double> meas_sq;
  for (const Obs& o : obs) {
    rep.energies.push_back(o.energy);
    rep.mean_measure += o.measure;
    meas_sq.push_back(o.measure * o.measure);
  }
  rep.mean_measure /= static_cast<double>(trials);
  rep.mean_measure_sq = stats(meas_sq).mean;
  const Stats se = stats(rep.energies);
  rep.mean_energy = se.mean;
  rep.se_energy = se.se;
  rep.ratio = rep.mean_energy / rep.offdiag_bound;
  rep.within_order = rep.mean_energy < 10.0 * rep.offdiag_bound;
  rep.violation_4sigma = rep.mean_energy - 4.0 * rep.se_energy > rep.offdiag_bound;
  return rep;
}

namespace {

// Integral of 1 / R_s nu over [a, b] (a subset of the support).
double inverse_potential_integral(const ArcSet& support, double s, double a, double b) {
  if (!(b > a)) return 0.0;
  auto g = [&](double x) { return 1.0 / riesz_potential(support, s, x); };
  // R_s nu has |x - e|^(1-s) cusps at the support edges, which are always
  // integration limits here; double-exponential quadrature absorbs them.
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(g, a, b, 1e-9);
}

// Integral of 1 / R_s nu over (A intersected with support), in Lebesgue measure.
double inverse_potential_over(const ArcSet& support, double s, const ArcSet& region) {
  const ArcSet piece = intersect(support, region);
  double total = 0.0;
  for (const Arc& arc : piece.arcs()) total += inverse_potential_integral(support, s, arc.start, arc.end());
  return total;
}

}  // namespace

ArcSet random_support(PhiloxEngine& rng, int arcs, double max_radius) {
  if (arcs < 1 || !(max_radius > 0.0)) throw Error(ErrorCode::domain, "random support needs arcs >= 1 and radius > 0");
  std::vector<Arc> pieces;
  pieces.reserve(static_cast<std::size_t>(arcs));
  for (int i = 0; i < arcs; ++i) {
    const double center = rng.uniform();
    const double r = max_radius * (1.0 - rng.uniform());
    pieces.push_back({center - r, 2.0 * r});
  }
  return ArcSet::from_arcs(std::move(pieces));
}

double frostman_mass(const ArcSet& support, double s, const Arc& probe) {
  const double m = measure(support);
  if (!(m > 0.0)) throw Error(ErrorCode::degenerate_measure, "Frostman check needs a support of positive measure");
  const ArcSet region = probe.length >= 1.0 ? ArcSet::full() : ArcSet::from_arcs({probe});
  return inverse_potential_over(support, s, region) / m;
}

FrostmanReport frostman_check(const ArcSet& support, double s, int probe_arcs, PhiloxEngine& rng) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::invalid_exponent, "Frostman check needs 0 < s < 1");
  const double m = measure(support);
  if (!(m > 0.0)) throw Error(ErrorCode::degenerate_measure, "Frostman check needs a support of positive measure");
  FrostmanReport rep;
  rep.s = s;
  rep.support_measure = m;
  rep.energy_normalized = riesz_energy(support, s) / (m * m);
  rep.jensen_bound = 1.0 / rep.energy_normalized;
  rep.total_mass = inverse_potential_over(support, s, ArcSet::full()) / m;
  rep.jensen_ok = rep.total_mass >= rep.jensen_bound * (1.0 - 1e-6);
  rep.max_excess = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < probe_arcs; ++p) {
    FrostmanProbe probe;
    probe.start = rng.uniform();
    // Log-uniform lengths in [1e-4, 1] so small scales get probed too.
    probe.length = std::pow(1e-4, rng.uniform());
    probe.mass = frostman_mass(support, s, {probe.start, probe.length});
    probe.bound = std::pow(std::min(probe.length, 0.5), s);
    probe.violated = probe.mass > probe.bound + 1e-6;
    rep.violations += probe.violated;
    rep.max_excess = std::max(rep.max_excess, probe.mass - probe.bound);
    rep.probes.push_back(probe);
  }
  return rep;
}

}  // namespace ucover
