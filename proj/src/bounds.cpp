#include "ucover/bounds.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>

#include "ucover/errors.hpp"
#include "ucover/format.hpp"
#include "ucover/optimize.hpp"

namespace ucover {

namespace {

constexpr double kMaxExactInt = 9007199254740992.0;  // 2^53

void require_theta(double theta) {
  if (!(theta > 1.0) || !std::isfinite(theta)) throw Error(ErrorCode::domain, "theta must be a finite number > 1");
}

void require_c(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::domain, "c must be a finite number > 0");
}

BoundPoint make_point(BoundKind kind, double c, double theta, double raw, bool valid) {
  BoundPoint p;
  p.kind = kind;
  p.c = c;
  p.theta = theta;
  p.valid = valid;
  p.value = std::clamp(raw, 0.0, 1.0);
  p.clamped = p.value != raw;
  return p;
}

// log(1 - exp(-x)) for x > 0, accurate at both ends.
double log1mexp(double x) { return x < std::log(2.0) ? std::log(-std::expm1(-x)) : std::log1p(-std::exp(-x)); }

double lower_raw(double c, double theta) { return 1.0 - s_exponent(c, theta); }

}  // namespace

GeometricSchedule::GeometricSchedule(double theta) : theta_(theta) { require_theta(theta); }

std::int64_t GeometricSchedule::n(int j) const {
  if (j < -1) throw Error(ErrorCode::domain, "schedule index must be >= -1");
  std::int64_t prev = 0;
  for (int k = 0; k <= j; ++k) {
    // The small relative nudge keeps exact powers (2^j, 10^j) from flooring
    // one below because of rounding in pow.
    const double p = std::floor(std::pow(theta_, k) * (1.0 + 1e-12));
    if (!(p < kMaxExactInt)) throw Error(ErrorCode::domain, "schedule index too large");
    prev = std::max(static_cast<std::int64_t>(p), prev + 1);
  }
  return prev;
}

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::upper_weak: return "upper-weak";
    case BoundKind::upper_matrix: return "upper-matrix";
    case BoundKind::lower: return "lower";
  }
  return "?";
}

ThetaDelta theta_delta(double c, double theta) {
  require_theta(theta);
  if (!(c >= 0.0)) throw Error(ErrorCode::domain, "c must be >= 0");
  const double t2 = 1.0 / (theta * theta);
  const double base = 2.0 * c * (theta - 1.0);
  return {base * (1.0 + t2), base * (1.0 / theta - t2)};
}

double lambda(double c, double theta) {
  const auto [big_theta, delta] = theta_delta(c, theta);
  const double half = 0.5 * (1.0 + big_theta + delta);
  const double disc = half * half - delta;
  assert(disc >= 0.0);
  return half + std::sqrt(std::max(disc, 0.0));
}

BoundPoint upper_bound_matrix(double c, double theta) {
  const double raw = std::log(lambda(c, theta)) / std::log(theta);
  return make_point(BoundKind::upper_matrix, c, theta, raw, c > 0.0 && c < 0.5);
}

BoundPoint upper_bound_weak(double c, double theta) {
  require_theta(theta);
  const double raw = std::log1p(2.0 * c * (theta * theta - 1.0) / theta) / std::log(theta);
  return make_point(BoundKind::upper_weak, c, theta, raw, c > 0.0 && c < 0.5);
}

double s_exponent(double c, double theta) {
  require_c(c);
  require_theta(theta);
  return -log1mexp(2.0 * c * (theta - 1.0) / (theta * theta)) / std::log(theta);
}

double c_star(double theta) {
  require_theta(theta);
  return -0.5 * theta * theta / (theta - 1.0) * std::log1p(-1.0 / theta);
}

BoundPoint lower_bound(double c, double theta) {
  const bool valid = c > c_star(theta);
  return make_point(BoundKind::lower, c, theta, lower_raw(c, theta), valid);
}

BoundPoint optimize_upper_matrix(double c) {
  require_c(c);
  const auto best = log_grid_golden_minimize(
      [c](double t) { return std::log(lambda(c, t)) / std::log(t); }, kThetaMin, kThetaMax, kThetaGrid,
      kThetaRelTol);
  return upper_bound_matrix(c, best.x);
}

BoundPoint optimize_upper_weak(double c) {
  require_c(c);
  const auto best = log_grid_golden_minimize(
      [c](double t) { return std::log1p(2.0 * c * (t * t - 1.0) / t) / std::log(t); }, kThetaMin, kThetaMax,
      kThetaGrid, kThetaRelTol);
  return upper_bound_weak(c, best.x);
}

BoundPoint optimize_lower(double c) {
  require_c(c);
  const auto objective = [c](double t) {
    if (!(c > c_star(t))) return std::numeric_limits<double>::infinity();
    return -lower_raw(c, t);
  };
  const auto best = log_grid_golden_minimize(objective, kThetaMin, kThetaMax, kThetaGrid, kThetaRelTol);
  if (!std::isfinite(best.value)) {
    BoundPoint p;
    p.kind = BoundKind::lower;
    p.c = c;
    p.theta = std::numeric_limits<double>::quiet_NaN();
    return p;
  }
  return lower_bound(c, best.x);
}

double shepp_upper(std::int64_t n, double r) {
  const double x = static_cast<double>(n);
  const double log_v = std::log(2.0 * (x + 1.0)) + (x - 1.0) * std::log1p(-r);
  return std::clamp(std::exp(log_v), 0.0, 1.0);
}

double shepp_lower(std::int64_t n, double r) {
  const double x = static_cast<double>(n);
  const double log_p = std::log(x + 1.0) + (x - 1.0) * std::log1p(-r);
  // 1 / (2/p + 1) = p / (2 + p)
  const double v = 1.0 / (2.0 * std::exp(-log_p) + 1.0);
  return std::clamp(v, 0.0, 1.0);
}

double block_hit_probability(const GeometricSchedule& sched, const RadiusFamily& f, int j) {
  const double r = f(sched.n(j + 1));
  if (!(2.0 * r < 1.0)) throw Error(ErrorCode::degenerate_radius, "2 r_{n_{j+1}} >= 1 in block " + std::to_string(j));
  const double count = static_cast<double>(sched.n(j) - sched.n(j - 1));
  return -std::expm1(count * std::log1p(-2.0 * r));
}

double k_lm(const GeometricSchedule& sched, const RadiusFamily& f, int l, int m) {
  if (l > m) throw Error(ErrorCode::domain, "k_lm needs l <= m");
  double k = 1.0;
  for (int j = l; j <= m; ++j) k *= block_hit_probability(sched, f, j);
  return k;
}

double c_l_constant(double c, double theta, int l, double s) {
  require_c(c);
  require_theta(theta);
  const double base = -std::expm1(-2.0 * c * (theta - 1.0) / (theta * theta));
  return std::pow(c, s) * std::pow(base, l);
}

double psi_exact(const GeometricSchedule& sched, const RadiusFamily& f, int l, int m, double t, int kappa) {
  if (kappa != 1 && kappa != 2) throw Error(ErrorCode::domain, "kappa must be 1 or 2");
  double psi = 1.0;
  for (int j = l; j <= m; ++j) {
    if (t <= kappa * f(sched.n(j + 1))) psi /= block_hit_probability(sched, f, j);
  }
  return psi;
}

std::vector<BoundCurveRow> bound_curve(std::span<const double> c_grid) {
  std::vector<BoundCurveRow> rows;
  rows.reserve(c_grid.size());
  for (const double c : c_grid) rows.push_back({c, optimize_upper_weak(c), optimize_upper_matrix(c), optimize_lower(c)});
  return rows;
}

void write_bound_curve_csv(std::ostream& out, std::span<const BoundCurveRow> rows) {
  out << "c,upper_weak,theta_weak,upper_matrix,theta_matrix,lower,theta_lower,valid_flags\n";
  for (const auto& row : rows) {
    out << format_real(row.c) << ',' << format_real(row.weak.value) << ',' << format_real(row.weak.theta) << ','
        << format_real(row.matrix.value) << ',' << format_real(row.matrix.theta) << ','
        << format_real(row.lower.value) << ',' << format_real(row.lower.theta) << ','
        << (row.weak.valid ? '1' : '0') << (row.matrix.valid ? '1' : '0') << (row.lower.valid ? '1' : '0')
        << '\n';
  }
}

}  // namespace ucover
