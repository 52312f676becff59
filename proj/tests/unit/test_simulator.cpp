#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../oracles.hpp"
#include "ucover/errors.hpp"
#include "ucover/rng.hpp"
#include "ucover/simulator.hpp"

using namespace ucover;

TEST_CASE("Philox known answers") {
  for (const auto& kat : oracle::philox_kats()) CHECK(philox4x64_10(kat.ctr, kat.key) == kat.out);
}

TEST_CASE("stream matches numpy's Philox") {
  PhiloxStream s(0x5EEDC0DE, 3);
  for (std::size_t i = 0; i < oracle::kNumpyStreamSeed5EEDC0DETrial3.size(); ++i) {
    CHECK(s.raw(i) == oracle::kNumpyStreamSeed5EEDC0DETrial3[i]);
  }
  CHECK(s.uniform(0) == 0.5964386893376614);
  CHECK(s.uniform(1) == 0.40321906205029234);
  CHECK(s.uniform(2) == 0.8805810338901925);
  // Random access agrees with sequential reads.
  PhiloxEngine e(0x5EEDC0DE, 3);
  for (std::uint64_t i = 0; i < 64; ++i) CHECK(e.raw() == s.raw(i));
  CHECK(s.raw(1000) != PhiloxStream(0x5EEDC0DE, 4).raw(1000));
}

TEST_CASE("sample paths are deterministic and extend their prefix") {
  const SamplePath a(7, 1, 1000), b(7, 1, 1000);
  CHECK(std::equal(a.points().begin(), a.points().end(), b.points().begin()));
  SamplePath c(7, 1, 100);
  c.extend(1000);
  CHECK(std::equal(a.points().begin(), a.points().end(), c.points().begin()));
  CHECK(a.omega(1) == a.points()[0]);
}

TEST_CASE("uniform moments and Kolmogorov-Smirnov") {
  const SamplePath big(kDefaultSeed, 0, 1000000);
  double sum = 0;
  for (double x : big.points()) sum += x;
  CHECK(std::fabs(sum / 1e6 - 0.5) < 3 / std::sqrt(12e6));

  std::vector<double> xs(big.points().begin(), big.points().begin() + 100000);
  std::sort(xs.begin(), xs.end());
  double d = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max({d, (i + 1) / n - xs[i], xs[i] - i / n});
  }
  CHECK(d < 1.63 / std::sqrt(n));
}

TEST_CASE("center index intersects like the direct union") {
  const SamplePath p(3, 0, 5000);
  CenterIndex idx;
  ArcSet region = ArcSet::from_arcs({{0.1, 0.2}, {0.55, 0.3}});
  for (std::int64_t k = 1; k <= 5000; ++k) {
    idx.insert(p.omega(k));
    if (k % 613 == 0) {
      std::vector<double> sorted(p.points().begin(), p.points().begin() + k);
      std::sort(sorted.begin(), sorted.end());
      const double r = 0.5 / static_cast<double>(k);
      CHECK(approx_equal(idx.intersect_balls(region, r), intersect(region, union_of_balls(sorted, r)), 1e-14));
      CHECK(approx_equal(idx.union_balls(r), union_of_balls(sorted, r), 1e-14));
    }
  }
  CHECK(idx.size() == 5000);
}

TEST_CASE("E_n basics") {
  const auto f = RadiusFamily::log_over_n(1);
  const SamplePath p(11, 0, 2000);
  const ArcSet e1 = build_E(p, 1, RadiusFamily::power_law(0.1, 1));
  CHECK(e1.size() == 1);
  CHECK(measure(e1) == doctest::Approx(0.2));
  for (std::int64_t n : {2, 10, 100, 2000}) {
    CHECK(measure(build_E(p, n, f)) <= std::min(1.0, 2 * n * radius(f, n)) + 1e-12);
  }
  CHECK_THROWS_AS(build_E(p, 2001, f), Error);
  CHECK(covers_full(build_E(p, 1, RadiusFamily::power_law(0.6, 0))));
}

TEST_CASE("coverage is monotone in the radius") {
  const SamplePath p(5, 2, 300);
  for (std::int64_t n : {10, 100, 300}) {
    const ArcSet small = build_E(p, n, RadiusFamily::power_law(0.5, 1));
    const ArcSet large = build_E(p, n, RadiusFamily::power_law(0.9, 1));
    CHECK(includes(large, small, 1e-15));
  }
}

TEST_CASE("expected measure of E_n") {
  const auto f = RadiusFamily::log_over_n(0.7);
  for (std::int64_t n : {50, 400}) {
    const auto meas = run_trials(2000, 1, [&](std::int64_t t) {
      return measure(build_E(SamplePath(kDefaultSeed, static_cast<std::uint64_t>(t), n), n, f));
    });
    double m = 0, m2 = 0;
    for (double x : meas) {
      m += x;
      m2 += x * x;
    }
    m /= 2000;
    const double se = std::sqrt((m2 / 2000 - m * m) / 1999);
    const double expect = 1 - std::pow(1 - 2 * radius(f, n), static_cast<double>(n));
    CHECK(std::fabs(m - expect) < 4 * se);
  }
}

TEST_CASE("finite approximation of the uniform covering set") {
  const auto f = RadiusFamily::power_law(1, 1.2);
  const SamplePath p(13, 0, 4000);
  CHECK(uniform_set_approx(p, 50, 50, f) == build_E(p, 50, f));
  const std::vector<std::int64_t> cps = {50, 100, 400, 1600, 4000};
  const auto traj = uniform_set_trajectory(p, 50, cps, f);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    for (std::int64_t k = 1; k <= 50; ++k) CHECK(contains(traj[i], p.omega(k)));
    if (i > 0) CHECK(includes(traj[i - 1], traj[i], 1e-15));
    CHECK(approx_equal(traj[i], uniform_set_approx(p, 50, cps[i], f), 1e-15));
  }
}

TEST_CASE("F_j and mu support") {
  const GeometricSchedule sched(2.0);
  const auto f = RadiusFamily::power_law(1, 1);
  const SamplePath p(17, 0, sched.n(9));
  CHECK(build_F(p, sched, 0, f).size() == 1);
  for (int j = 1; j <= 7; ++j) {
    const ArcSet Fj = build_F(p, sched, j, f);
    for (std::int64_t n = sched.n(j) + 1; n <= sched.n(j + 1); ++n) CHECK(includes(build_E(p, n, f), Fj, 1e-15));
  }
  CHECK(mu_lm_support(p, sched, 3, 3, f) == build_F(p, sched, 3, f));
  const ArcSet mu = mu_lm_support(p, sched, 2, 7, f);
  CHECK(includes(uniform_set_approx(p, sched.n(2) + 1, sched.n(8), f), mu, 1e-15));
  CHECK_THROWS_AS(build_F(p, sched, 9, f), Error);
}

TEST_CASE("miss probability of a block") {
  const GeometricSchedule sched(2.0);
  const auto f = RadiusFamily::power_law(1, 1);
  const int j = 3;
  const auto hits = run_trials(5000, 1, [&](std::int64_t t) {
    const SamplePath p(kDefaultSeed, static_cast<std::uint64_t>(t), sched.n(j + 1));
    return contains(build_F(p, sched, j, f), 0.3) ? 0.0 : 1.0;
  });
  double miss = 0;
  for (double h : hits) miss += h;
  miss /= 5000;
  const double q = 1 - block_hit_probability(sched, f, j);
  CHECK(std::fabs(miss - q) < 4 * std::sqrt(q * (1 - q) / 5000));
}

TEST_CASE("run_trials is order-preserving for any thread count") {
  auto fn = [](std::int64_t t) { return PhiloxStream(1, static_cast<std::uint64_t>(t)).raw(0); };
  CHECK(run_trials(100, 1, fn) == run_trials(100, 4, fn));
  CHECK_THROWS(run_trials(10, 3, [](std::int64_t t) -> int {
    if (t == 5) throw Error(ErrorCode::domain, "boom");
    return 0;
  }));
}

TEST_CASE("coverage experiment") {
  const std::vector<std::int64_t> cps = {1000};
  const auto rows = coverage_experiment(RadiusFamily::log_over_n(3), cps, 200, {7, 1});
  CHECK(rows[0].not_covered == 0);
  CHECK(rows[0].shepp_upper < 3e-6);
  const auto always = coverage_experiment(RadiusFamily::power_law(0.6, 0), std::vector<std::int64_t>{1, 2}, 10);
  CHECK(always[0].not_covered == 0);
  CHECK(always[0].shepp_upper == 0.0);
  CHECK_THROWS_AS(coverage_experiment(RadiusFamily::log_over_n(3), std::vector<std::int64_t>{10, 5}, 10), Error);
}

TEST_CASE("Shepp sandwich with the true arc length") {
  for (double c : {0.5, 0.7, 1.0}) {
    const auto rows = coverage_experiment(RadiusFamily::log_over_n(c), std::vector<std::int64_t>{1000, 10000}, 400);
    for (const auto& row : rows) {
      CAPTURE(c);
      CAPTURE(row.n);
      CHECK(row.wilson_hi >= row.shepp_lower_2r);
      CHECK(row.wilson_lo <= row.shepp_upper_2r);
      CHECK(row.shepp_lower_2r <= row.shepp_upper_2r);
    }
  }
}

TEST_CASE("measure rows are consistent") {
  const auto f = RadiusFamily::power_law(0.5, 1);
  const auto cps = geometric_checkpoints(16, 512);
  const auto rows = measure_experiment(f, 16, cps, 30);
  REQUIRE(rows.size() == cps.size());
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].mean_measure_U <= rows[i - 1].mean_measure_U + 1e-15);
}

TEST_CASE("Wilson interval") {
  const auto w = wilson_interval(0, 200);
  CHECK(w.lo == 0.0);
  CHECK(w.hi == doctest::Approx(0.018845).epsilon(1e-3));
  const auto h = wilson_interval(50, 100);
  CHECK(h.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(h.hi == doctest::Approx(0.5962).epsilon(1e-3));
}

TEST_CASE("ball correlation bound") {
  const double r = 0.05;
  for (double d : {0.0, 0.05, 0.1, 0.3}) {
    const auto rep = ball_correlation_check(r, 200000, 0.2, 0.2 + d);
    CAPTURE(d);
    CHECK(rep.joint_hit_ok);
    CHECK(rep.joint_miss_ok);
    CHECK(rep.joint_hit_expected == doctest::Approx(std::max(0.0, 2 * r - d)));
    if (d >= 2 * r) CHECK(rep.joint_hit_mean == 0.0);
  }
}

TEST_CASE("checkpoints") {
  CHECK(geometric_checkpoints(16, 100) == std::vector<std::int64_t>{16, 32, 64, 100});
  CHECK(geometric_checkpoints(5, 5) == std::vector<std::int64_t>{5});
}
