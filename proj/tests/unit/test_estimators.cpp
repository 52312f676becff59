#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../oracles.hpp"
#include "ucover/errors.hpp"
#include "ucover/estimators.hpp"

using namespace ucover;

namespace {

// G_{l,i}: intersection of E_{n_j} over j = l..i, computed from scratch.
ArcSet g_li(const SamplePath& p, const GeometricSchedule& s, double c, int l, int i) {
  const auto f = RadiusFamily::power_law(c, 1);
  ArcSet g = build_E(p, s.n(l), f);
  for (int j = l + 1; j <= i; ++j) g = intersect(g, build_E(p, s.n(j), f));
  return g;
}

}  // namespace

TEST_CASE("simple cover trace invariants") {
  const GeometricSchedule s(2.0);
  const int l = 3, i_max = 11;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const SamplePath p(kDefaultSeed, t, s.n(i_max + 1));
    const auto tr = cover_growth_simple(p, s, 0.2, l, i_max);
    REQUIRE(tr.levels.size() == static_cast<std::size_t>(i_max - l + 1));
    CHECK(tr.levels[0].N == s.n(l));
    CHECK(tr.levels[0].M == 0);
    for (std::size_t k = 1; k < tr.levels.size(); ++k) {
      CHECK(tr.levels[k].N == tr.levels[k - 1].N + tr.levels[k].M);
      CHECK(tr.levels[k].Q == 0);
    }
    for (const auto& lv : tr.levels) CHECK(lv.covered_ok);
  }
}

TEST_CASE("refined cover trace invariants and independent validity") {
  const GeometricSchedule s(2.0);
  const int l = 3, i_max = 10;
  const double c = 0.2;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const SamplePath p(kDefaultSeed, t, s.n(i_max + 1));
    const auto tr = cover_growth_refined(p, s, c, l, i_max);
    CHECK(tr.levels[0].N == s.n(l));
    CHECK(tr.levels[0].Q == 0);
    for (const auto& lv : tr.levels) {
      CHECK(lv.N >= 1);
      CHECK(lv.Q >= 0);
      CHECK(lv.covered_ok);
    }
    for (std::size_t k = 1; k < tr.levels.size(); ++k) CHECK(tr.levels[k].N >= tr.levels[k - 1].N);
  }
  // The trace's own validity flag is computed from the same cover; recompute
  // G_{l,i} from scratch and check it has no more mass than the bound on the
  // cover's measure.
  const SamplePath p(kDefaultSeed, 99, s.n(i_max + 1));
  const auto tr = cover_growth_refined(p, s, c, l, i_max);
  for (const auto& lv : tr.levels) {
    const double r = c / static_cast<double>(lv.n_i);
    CHECK(measure(g_li(p, s, c, l, lv.i)) <= 2 * r * static_cast<double>(lv.N + lv.Q) + 1e-12);
  }
}

TEST_CASE("growth statistics over many trials") {
  const auto simple = cover_growth_experiment(CoverVariant::simple, 0.2, 2.0, 3, 8, 300);
  for (const auto& lv : simple.summary.levels) CHECK(lv.ratio_ok);
  CHECK(simple.summary.all_covered_ok);
  CHECK(simple.summary.exponent <= simple.summary.exponent_bound + 0.05);
  CHECK(simple.summary.exponent_bound == doctest::Approx(upper_bound_weak(0.2, 2.0).value));

  const auto refined = cover_growth_experiment(CoverVariant::refined, 0.2, 2.0, 3, 8, 300);
  for (const auto& lv : refined.summary.levels) CHECK(lv.matrix_ok);
  CHECK(refined.summary.exponent <= refined.summary.exponent_bound + 0.05);
  CHECK(refined.summary.exponent_bound == doctest::Approx(std::log(lambda(0.2, 2.0)) / std::log(2.0)));

  std::ostringstream os;
  write_trace_csv(os, refined.traces);
  CHECK(os.str().rfind("trial,level,i,n_i,N_i,Q_i,M_i,covered_ok\n", 0) == 0);
}

TEST_CASE("insufficient samples") {
  const GeometricSchedule s(2.0);
  const SamplePath p(1, 0, 100);
  CHECK_THROWS_AS(cover_growth_simple(p, s, 0.2, 3, 10), Error);
}

TEST_CASE("box dimension fits") {
  std::vector<std::int64_t> scales = {16, 64, 256, 1024, 4096};
  std::vector<ArcSet> full(scales.size(), ArcSet::full());
  const BoxFit f = box_dimension_fit(full, scales);
  CHECK(f.defined);
  CHECK(f.slope == doctest::Approx(1.0).epsilon(0.01));
  std::vector<ArcSet> dot(scales.size(), ArcSet::from_interval(0.3, 0.3 + 1e-12));
  CHECK(box_dimension_fit(dot, scales).slope == doctest::Approx(0.0).epsilon(1e-9));
  std::vector<ArcSet> none(scales.size());
  CHECK_FALSE(box_dimension_fit(none, scales).defined);
  CHECK_THROWS_AS(box_dimension_fit(std::span(full).first(3), std::span(scales).first(3)), Error);

  const GeometricSchedule s(8.6);
  const SamplePath p(kDefaultSeed, 0, s.n(8));
  const BoxFit mu = mu_support_box_fit(p, s, 1.0, 1, 7);
  if (mu.defined) {
    CHECK(mu.slope >= 0.0);
    CHECK(mu.slope <= 1.0);
  }
}

TEST_CASE("Riesz experiment") {
  const GeometricSchedule s(2.0);
  const auto rep = riesz_experiment(s, 2.0, 2, 6, 0.2, 200);
  CHECK(rep.within_order);
  CHECK(rep.full_bound >= rep.offdiag_bound);
  CHECK(rep.k_lm == doctest::Approx(k_lm(s, RadiusFamily::power_law(2.0, 1), 2, 6)));
  for (double e : rep.energies) CHECK(std::isfinite(e));
  CHECK(rep.mean_measure == doctest::Approx(rep.k_lm).epsilon(0.1));

  // Small-s limit: energy tends to the squared measure.
  const auto small = riesz_experiment(s, 2.0, 2, 6, 0.01, 200);
  CHECK(small.mean_energy == doctest::Approx(small.mean_measure_sq).epsilon(0.1));

  CHECK_THROWS_AS(riesz_experiment(s, 0.5, 2, 6, 0.2, 10), Error);
  CHECK_THROWS_AS(riesz_experiment(s, 2.0, 2, 6, 0.5, 10), Error);
}

TEST_CASE("Frostman mass on the whole circle has constant density") {
  for (double s : {0.2, 0.4, 0.8}) {
    const double js = std::pow(2.0, s) / (1 - s);
    for (double len : {1e-4, 0.01, 0.3, 0.9}) {
      const double mass = frostman_mass(ArcSet::full(), s, {0.37, len});
      CHECK(mass == doctest::Approx(len / js).epsilon(1e-9));
      CHECK(mass <= std::pow(len, s));
    }
  }
}

TEST_CASE("Frostman mass matches Gauss-Kronrod on a random support") {
  PhiloxEngine rng(5, 0);
  const ArcSet support = random_support(rng, 8, 0.08);
  const double s = 0.4;
  const double m = measure(support);
  for (const Arc& arc : support.arcs()) {
    auto g = [&](double x) { return 1.0 / riesz_potential(support, s, x); };
    const double expect = oracle::gk_integral(g, arc.start, arc.end()) / m;
    CHECK(frostman_mass(support, s, {arc.start, arc.length}) == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("Frostman check") {
  PhiloxEngine rng(kDefaultSeed, 0);
  const ArcSet support = random_support(rng, 20, 0.05);
  const auto rep = frostman_check(support, 0.4, 100, rng);
  CHECK(rep.violations == 0);
  CHECK(rep.jensen_ok);
  CHECK(rep.probes.size() == 100);
  CHECK_THROWS_AS(frostman_check(ArcSet{}, 0.4, 10, rng), Error);
  CHECK_THROWS_AS(frostman_check(support, 1.2, 10, rng), Error);
}
