#pragma once

// Independent reference computations for the tests. None of these call into
// the code under test beyond plain data types, so agreement means something.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

struct Interval {
  double lo;
  double hi;
};

inline bool member(const std::vector<Interval>& ivs, double x) {
  x -= std::floor(x);
  for (const auto& iv : ivs) {
    for (double shift : {-1.0, 0.0, 1.0}) {
      if (x + shift >= iv.lo && x + shift <= iv.hi) return true;
    }
  }
  return false;
}

// Dominant eigenvalue of [[a, b], [c, d]] with positive entries by power
// iteration.
inline double power_iteration(double a, double b, double c, double d, int iters = 200) {
  double x = 1.0, y = 1.0, est = 0.0;
  for (int k = 0; k < iters; ++k) {
    const double nx = a * x + b * y;
    const double ny = c * x + d * y;
    est = (nx + ny) / (x + y);
    const double norm = nx + ny;
    x = nx / norm;
    y = ny / norm;
  }
  return est;
}

// Matrix coefficients straight from their definitions.
inline std::array<double, 2> theta_delta(double c, double theta) {
  const double big = 2.0 * c * (theta - 1.0) * (1.0 + 1.0 / (theta * theta));
  const double del = 2.0 * c * (theta - 1.0) * (1.0 / theta - 1.0 / (theta * theta));
  return {big, del};
}

// Exponent s(c, theta) evaluated naively (no log1mexp).
inline double s_naive(double c, double theta) {
  return -std::log(1.0 - std::exp(-2.0 * c * (theta - 1.0) / (theta * theta))) / std::log(theta);
}

// Schedule n_j by repeated multiplication in long double.
inline std::vector<std::int64_t> schedule(double theta, int jmax) {
  std::vector<std::int64_t> n;
  long double p = 1.0L;
  std::int64_t prev = 0;
  for (int j = 0; j <= jmax; ++j) {
    std::int64_t v = static_cast<std::int64_t>(std::floor(p * (1.0L + 1e-12L)));
    v = std::max(v, prev + 1);
    n.push_back(v);
    prev = v;
    p *= theta;
  }
  return n;
}

// K_{l,m} = prod_j (1 - (1 - 2 r_{n_{j+1}})^{n_j - n_{j-1}}) with r_n = c/n,
// with the power taken by std::pow.
inline double k_lm(double c, double theta, int l, int m) {
  const auto n = schedule(theta, m + 2);
  double k = 1.0;
  for (int j = l; j <= m; ++j) {
    const double r = c / static_cast<double>(n[static_cast<std::size_t>(j + 1)]);
    const double block = static_cast<double>(n[static_cast<std::size_t>(j)] - (j == 0 ? 0 : n[static_cast<std::size_t>(j - 1)]));
    k *= 1.0 - std::pow(1.0 - 2.0 * r, block);
  }
  return k;
}

// Potential at x of Lebesgue measure on the arcs (not normalized). Each arc
// is cut where the circle distance to x has a kink or a zero; on every piece
// the distance is linear, so the integral is taken over the distance itself
// with tanh-sinh, keeping the singularity exactly on an endpoint.
inline double potential(const std::vector<Interval>& ivs, double s, double x) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [s](double d) { return std::pow(d, -s); };
  double total = 0.0;
  for (const auto& iv : ivs) {
    const double t0 = iv.lo - x, t1 = iv.hi - x;
    std::vector<double> cuts = {t0, t1};
    for (double h = std::ceil(2 * t0); h <= std::floor(2 * t1); h += 1.0) {
      if (h / 2 > t0 && h / 2 < t1) cuts.push_back(h / 2);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      if (!(b > a)) continue;
      const double k = std::round(0.5 * (a + b));
      const double da = std::fabs(a - k), db = std::fabs(b - k);
      total += ts.integrate(f, std::min(da, db), std::max(da, db), 1e-13);
    }
  }
  return total;
}

// Energy of one arc of length L <= 1/2: both points inside the arc are at
// line distance at most 1/2, so the circle distance is the line distance.
inline double single_arc_energy(double L, double s) {
  return 2.0 * std::pow(L, 2.0 - s) / ((1.0 - s) * (2.0 - s));
}

struct McEstimate {
  double mean;
  double se;
};

// Importance-sampled Monte Carlo for the Riesz s-energy of Lebesgue measure
// on the arcs: x uniform on the set, displacement u with density
// |u|^(-s) / J_s on [-1/2, 1/2]; each sample is |A| J_s 1_A(x - u).
inline McEstimate riesz_energy_mc(const std::vector<Interval>& ivs, double s, std::int64_t samples,
                                  std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> cum;
  double total_len = 0.0;
  for (const auto& iv : ivs) {
    total_len += iv.hi - iv.lo;
    cum.push_back(total_len);
  }
  const double js = std::pow(2.0, s) / (1.0 - s);
  const double weight = total_len * js;
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double t = unif(gen) * total_len;
    const auto idx = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), t) - cum.begin());
    const auto& iv = ivs[std::min(idx, ivs.size() - 1)];
    const double x = iv.hi - (cum[std::min(idx, ivs.size() - 1)] - t);
    const double mag = 0.5 * std::pow(unif(gen), 1.0 / (1.0 - s));
    const double u = unif(gen) < 0.5 ? -mag : mag;
    hits += member(ivs, x - u) ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {weight * p, weight * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

// Integral over [a, b] by Gauss-Kronrod on pieces graded geometrically
// towards both endpoints, where the integrand has |x - e|^(1-s) cusps. Each
// piece [h, 2h] away from an endpoint is smooth on its own scale. Used to
// cross-check the Frostman mass quadrature.
template <class F>
double gk_integral(F f, double a, double b, int grading = 40) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  std::vector<double> cuts = {a, mid, b};
  double h = half;
  for (int k = 0; k < grading; ++k) {
    h *= 0.5;
    cuts.push_back(a + h);
    cuts.push_back(b - h);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) {
      total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 0);
    }
  }
  return total;
}

// Measure of a union of intervals by brute-force sorting on the line mod 1.
inline double union_measure(std::vector<Interval> ivs) {
  std::vector<Interval> split;
  for (auto iv : ivs) {
    if (iv.hi - iv.lo >= 1.0) return 1.0;
    const double shift = std::floor(iv.lo);
    iv.lo -= shift;
    iv.hi -= shift;
    if (iv.hi > 1.0) {
      split.push_back({iv.lo, 1.0});
      split.push_back({0.0, iv.hi - 1.0});
    } else {
      split.push_back(iv);
    }
  }
  std::sort(split.begin(), split.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double total = 0.0, cur_lo = -1.0, cur_hi = -1.0;
  for (const auto& iv : split) {
    if (iv.lo > cur_hi) {
      if (cur_hi > cur_lo) total += cur_hi - cur_lo;
      cur_lo = iv.lo;
      cur_hi = iv.hi;
    } else {
      cur_hi = std::max(cur_hi, iv.hi);
    }
  }
  if (cur_hi > cur_lo) total += cur_hi - cur_lo;
  return total;
}

// Known answers for Philox4x64-10, cross-checked against numpy's
// implementation (which applies the counter before bumping it).
struct PhiloxKat {
  std::array<std::uint64_t, 4> ctr;
  std::array<std::uint64_t, 2> key;
  std::array<std::uint64_t, 4> out;
};

inline const std::array<PhiloxKat, 3>& philox_kats() {
  static const std::array<PhiloxKat, 3> kats = {{
      {{1, 0, 0, 0}, {0, 0}, {0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL, 0x907d7a052fd5b4dcULL}},
      {{42, 0, 0, 0},
       {0x5EEDC0DE, 7},
       {0x9d4e8550ffeefb00ULL, 0xa5ae6a6ba32f142dULL, 0xa890c0dffc3b0baaULL, 0x4ec89b0c214d69f2ULL}},
      {{0, 1, 0, 0},
       {0xdeadbeefcafebabeULL, 0x0123456789abcdefULL},
       {0x8d04e55a54123147ULL, 0x68dcd45e138eb67bULL, 0xd5121d03e132669fULL, 0x355343b7b465fff8ULL}},
  }};
  return kats;
}

// numpy.random.Philox(key=[0x5EEDC0DE, 3]).random_raw(6)
inline constexpr std::array<std::uint64_t, 6> kNumpyStreamSeed5EEDC0DETrial3 = {
    0x98b034b8c63c7508ULL, 0x67395d4ca13a9839ULL, 0xe16dc236094752e8ULL,
    0x131cb59240118020ULL, 0x99a7953e7e050d85ULL, 0x05caebdb42942f99ULL};

}  // namespace oracle
