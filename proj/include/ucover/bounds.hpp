#pragma once

// Hausdorff-dimension bounds for r_n = c/n along geometric schedules
// n_j ~ theta^j, together with the constants used by the second-moment
// argument (K_{l,m}, C_l, Psi_{l,m}) and Shepp's covering-probability bounds.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ucover/radius.hpp"

namespace ucover {

/// n_j = max(floor(theta^j), n_{j-1} + 1) with n_0 = 1 and n_{-1} = 0.
class GeometricSchedule {
 public:
  explicit GeometricSchedule(double theta);

  double theta() const { return theta_; }
  /// j >= -1; throws Error(domain) when n_j would exceed 2^53.
  std::int64_t n(int j) const;

 private:
  double theta_;
};

enum class BoundKind { upper_weak, upper_matrix, lower };
std::string_view to_string(BoundKind kind);

struct BoundPoint {
  double c = 0.0;
  double theta = 0.0;
  double value = 0.0;
  bool valid = false;
  bool clamped = false;
  BoundKind kind = BoundKind::lower;
};

struct ThetaDelta {
  double big_theta;  // 2c(theta-1)(1+theta^-2)
  double delta;      // 2c(theta-1)(theta^-1-theta^-2)
};

ThetaDelta theta_delta(double c, double theta);
/// Dominant eigenvalue of [[1+Theta, Theta], [Delta, Delta]].
double lambda(double c, double theta);

BoundPoint upper_bound_matrix(double c, double theta);
BoundPoint upper_bound_weak(double c, double theta);
BoundPoint lower_bound(double c, double theta);

/// Search domain for theta.
inline constexpr double kThetaMin = 1.0 + 1e-6;
inline constexpr double kThetaMax = 1e4;
inline constexpr int kThetaGrid = 512;
inline constexpr double kThetaRelTol = 1e-8;

BoundPoint optimize_upper_matrix(double c);
BoundPoint optimize_upper_weak(double c);
/// Maximizes the lower bound over theta with c > c_star(theta); when no such
/// theta exists in the search domain the result is invalid with value 0.
BoundPoint optimize_lower(double c);

/// -log(1 - exp(-2c(theta-1)/theta^2)) / log(theta)
double s_exponent(double c, double theta);
/// The c at which s_exponent(c, theta) = 1.
double c_star(double theta);

/// min(1, 2(n+1)(1-r)^(n-1))
double shepp_upper(std::int64_t n, double r);
/// 1 / (2/((n+1)(1-r)^(n-1)) + 1)
double shepp_lower(std::int64_t n, double r);

/// 1 - (1 - 2 r_{n_{j+1}})^(n_j - n_{j-1}): probability that a fixed point is
/// in F_j. Throws Error(degenerate_radius) when 2 r_{n_{j+1}} >= 1.
double block_hit_probability(const GeometricSchedule& sched, const RadiusFamily& f, int j);
/// Product of block_hit_probability over l..m.
double k_lm(const GeometricSchedule& sched, const RadiusFamily& f, int l, int m);
/// c^s (1 - exp(-2c(theta-1)/theta^2))^l
double c_l_constant(double c, double theta, int l, double s);
/// prod_{j=l}^{m} (1 + q_j/(1-q_j) 1{t <= kappa r_{n_{j+1}}}), q_j the miss
/// probability of block j.
double psi_exact(const GeometricSchedule& sched, const RadiusFamily& f, int l, int m, double t, int kappa = 2);

struct BoundCurveRow {
  double c = 0.0;
  BoundPoint weak;
  BoundPoint matrix;
  BoundPoint lower;
};

std::vector<BoundCurveRow> bound_curve(std::span<const double> c_grid);
/// Header `c,upper_weak,theta_weak,upper_matrix,theta_matrix,lower,theta_lower,valid_flags`;
/// valid_flags is three 0/1 digits for weak, matrix, lower.
void write_bound_curve_csv(std::ostream& out, std::span<const BoundCurveRow> rows);

}  // namespace ucover
