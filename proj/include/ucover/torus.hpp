#pragma once

// Finite unions of closed arcs on the circle T = R/Z.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ucover {

/// Gaps narrower than this are closed when normalizing.
inline constexpr double kMergeGap = 1e-15;

/// Reduce x modulo 1 into [0, 1).
double wrap(double x);

/// Circle distance, min(|x - y|, 1 - |x - y|) after reduction mod 1.
double dist(double x, double y);

/// Closed arc [start, start + length] read modulo 1. length == 1 is the whole
/// circle.
struct Arc {
  double start = 0.0;
  double length = 0.0;

  double end() const { return start + length; }
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Canonical finite union of closed arcs.
///
/// Arcs are sorted by start in [0, 1), pairwise disjoint with gaps of at least
/// kMergeGap, and of positive length. Only the last arc may run past 1 (wrap
/// around). The full circle is stored as the single arc {0, 1} with the full
/// flag set, so equal sets compare equal member-wise up to rounding.
class ArcSet {
 public:
  ArcSet() = default;

  static ArcSet full();
  /// Normalizes an arbitrary list: starts are reduced mod 1, lengths >= 1 give
  /// the full circle, non-positive lengths are dropped.
  static ArcSet from_arcs(std::vector<Arc> arcs);
  /// Closed interval [a, b] of the real line projected to T.
  static ArcSet from_interval(double a, double b);

  std::span<const Arc> arcs() const { return arcs_; }
  std::size_t size() const { return arcs_.size(); }
  bool empty() const { return arcs_.empty(); }
  bool is_full() const { return full_; }

  friend bool operator==(const ArcSet&, const ArcSet&) = default;

 private:
  friend class ArcSetBuilder;
  std::vector<Arc> arcs_;
  bool full_ = false;
};

/// Closed ball of radius r around center; full circle when 2r >= 1.
/// Throws Error(invalid_radius) for r <= 0.
ArcSet ball(double center, double r);

ArcSet unite(const ArcSet& a, const ArcSet& b);
ArcSet intersect(const ArcSet& a, const ArcSet& b);
ArcSet complement(const ArcSet& a);
/// Grow every arc by r on both sides.
ArcSet thicken(const ArcSet& a, double r);

double measure(const ArcSet& a);
bool covers_full(const ArcSet& a);
/// Closed membership.
bool contains(const ArcSet& a, double x);
/// True when every arc of `inner` lies within an arc of `outer` up to `tol`.
bool includes(const ArcSet& outer, const ArcSet& inner, double tol = 0.0);
/// Same set up to endpoint perturbations of at most tol.
bool approx_equal(const ArcSet& a, const ArcSet& b, double tol);

/// Number of grid cells [i/k, (i+1)/k) meeting the set.
std::int64_t box_count(const ArcSet& a, std::int64_t k);

/// Union of balls of common radius r around sorted centers in [0, 1); O(n).
ArcSet union_of_balls(std::span<const double> sorted_centers, double r);
/// a intersected with union_of_balls(sorted_centers, r), touching only the
/// centers near a.
ArcSet intersect_with_balls(const ArcSet& a, std::span<const double> sorted_centers, double r);
/// Same, with the centers split over several individually sorted groups.
ArcSet intersect_with_balls(const ArcSet& a, std::span<const std::span<const double>> groups, double r);

/// Double integral of dist(x, y)^(-s) over the whole circle, 2^s / (1 - s).
double riesz_total(double s);
/// Exact s-energy of Lebesgue measure restricted to a, 0 < s < 1.
double riesz_energy(const ArcSet& a, double s);
/// Riesz s-potential at x of normalized Lebesgue measure on a.
double riesz_potential(const ArcSet& a, double s, double x);

}  // namespace ucover
