#pragma once

// Cover-growth constructions behind the upper dimension bounds, box-counting
// fits, and the energy / Frostman checks behind the lower bound.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ucover/bounds.hpp"
#include "ucover/rng.hpp"
#include "ucover/simulator.hpp"
#include "ucover/torus.hpp"

namespace ucover {

enum class CoverVariant { simple, refined };
std::string_view to_string(CoverVariant v);

struct CoverLevel {
  int i = 0;
  std::int64_t n_i = 0;
  std::int64_t N = 0;  // kept balls
  std::int64_t Q = 0;  // balls that may be dropped at the next level (refined only)
  std::int64_t M = 0;  // indices newly admitted at this level
  bool covered_ok = false;
};

struct CoverGrowthTrace {
  CoverVariant variant = CoverVariant::simple;
  int l = 0;
  std::vector<CoverLevel> levels;  // i = l..i_max
};

/// Levels i = l..i_max with r_n = c/n. Each level also checks that the cover
/// contains G_{l,i}, the intersection of E_{n_j} over j = l..i.
/// Needs path.size() >= n_{i_max + 1}.
CoverGrowthTrace cover_growth_simple(const SamplePath& path, const GeometricSchedule& sched, double c, int l,
                                     int i_max);
CoverGrowthTrace cover_growth_refined(const SamplePath& path, const GeometricSchedule& sched, double c, int l,
                                      int i_max);
CoverGrowthTrace cover_growth(CoverVariant variant, const SamplePath& path, const GeometricSchedule& sched,
                              double c, int l, int i_max);

struct GrowthLevelSummary {
  int i = 0;
  std::int64_t n_i = 0;
  double mean_N = 0.0;
  double mean_Q = 0.0;
  double se_N = 0.0;
  double se_Q = 0.0;
  // Simple variant: M_{i+1}/N_i against 2c(theta^2-1)/theta (next-level ratio,
  // absent on the last level).
  double mean_ratio = 0.0;
  double se_ratio = 0.0;
  double ratio_bound = 0.0;
  bool ratio_ok = true;
  // Refined variant: matrix prediction from the previous level's means.
  double predicted_N = 0.0;
  double predicted_Q = 0.0;
  bool matrix_ok = true;
  bool covered_ok = true;
};

struct GrowthSummary {
  CoverVariant variant = CoverVariant::simple;
  double c = 0.0;
  double theta = 0.0;
  int l = 0;
  int i_max = 0;
  std::int64_t trials = 0;
  /// Least-squares slope of log mean(N_i + Q_i) against i log theta.
  double exponent = 0.0;
  /// upper_bound_weak (simple) or log Lambda / log theta (refined) at (c, theta).
  double exponent_bound = 0.0;
  bool all_covered_ok = true;
  std::vector<GrowthLevelSummary> levels;
};

struct CoverGrowthExperiment {
  std::vector<CoverGrowthTrace> traces;  // one per trial
  GrowthSummary summary;
};

CoverGrowthExperiment cover_growth_experiment(CoverVariant variant, double c, double theta, int l, int levels,
                                              std::int64_t trials, const RunOptions& opt = {});
GrowthSummary summarize_growth(std::span<const CoverGrowthTrace> traces, double c, double theta);

/// Header `trial,level,i,n_i,N_i,Q_i,M_i,covered_ok`.
void write_trace_csv(std::ostream& out, std::span<const CoverGrowthTrace> traces);

struct BoxFit {
  bool defined = false;
  double slope = 0.0;  // clamped to [0, 1]
  double raw_slope = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
  std::vector<std::int64_t> scales;
  std::vector<std::int64_t> counts;
};

/// Least-squares fit of log box_count(sets[i], scales[i]) against log scales[i].
/// Needs at least 4 scales; scales where the set is empty are skipped and the
/// fit is undefined when fewer than 2 remain.
BoxFit box_dimension_fit(std::span<const ArcSet> sets, std::span<const std::int64_t> scales);

/// Box fit of the nested supports of mu_{l,m'} for m' = l..m, each counted at
/// grid size floor(n_{m'+1} / (2c)) (boxes of about one ball diameter).
BoxFit mu_support_box_fit(const SamplePath& path, const GeometricSchedule& sched, double c, int l, int m);

struct RieszReport {
  double c = 0.0;
  double theta = 0.0;
  int l = 0;
  int m = 0;
  double s = 0.0;
  double s_ctheta = 0.0;
  std::int64_t trials = 0;
  double mean_energy = 0.0;
  double se_energy = 0.0;
  double mean_measure = 0.0;
  double mean_measure_sq = 0.0;
  double k_lm = 0.0;
  double c_l = 0.0;
  double j_s = 0.0;
  double j_s_total = 0.0;      // J_{s + s(c, theta)}
  double offdiag_bound = 0.0;  // K^2 C_l J_{s+s(c,theta)}, no diagonal term
  double full_bound = 0.0;     // K^2 (J_s + C_l J_{s+s(c,theta)})
  double ratio = 0.0;          // mean_energy / offdiag_bound
  bool within_order = false;   // mean_energy < 10 offdiag_bound
  bool violation_4sigma = false;
  std::vector<double> energies;  // per trial
};

/// Needs c > c_star(theta) and s + s(c, theta) < 1 (invalid_configuration
/// otherwise).
RieszReport riesz_experiment(const GeometricSchedule& sched, double c, int l, int m, double s, std::int64_t trials,
                             const RunOptions& opt = {});

struct FrostmanProbe {
  double start = 0.0;
  double length = 0.0;
  double mass = 0.0;   // theta(A)
  double bound = 0.0;  // diameter(A)^s
  bool violated = false;
};

struct FrostmanReport {
  double s = 0.0;
  double support_measure = 0.0;
  double energy_normalized = 0.0;  // I_s(nu)
  double total_mass = 0.0;         // theta(T)
  double jensen_bound = 0.0;       // 1 / I_s(nu)
  bool jensen_ok = false;
  std::int64_t violations = 0;
  double max_excess = 0.0;  // max of mass - bound over probes
  std::vector<FrostmanProbe> probes;
};

/// nu = normalized Lebesgue measure on the support; d theta / d nu = 1 / R_s nu.
/// Probe arcs have uniform start and log-uniform length in [1e-4, 1].
/// Throws Error(degenerate_measure) for a null support.
FrostmanReport frostman_check(const ArcSet& support, double s, int probe_arcs, PhiloxEngine& rng);
/// Union of `arcs` closed balls with uniform centers and radii uniform in
/// (0, max_radius].
ArcSet random_support(PhiloxEngine& rng, int arcs, double max_radius);
/// theta(A) for a single probe arc.
double frostman_mass(const ArcSet& support, double s, const Arc& probe);

}  // namespace ucover
