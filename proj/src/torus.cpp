#include "ucover/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ucover/errors.hpp"

namespace ucover {

namespace {

// Closed interval of [0, 1]. `len` carries the exact length of the source arc
// when the interval is one untouched input arc, so measures of balls stay
// exactly 2r through set operations.
struct Interval {
  double lo;
  double hi;
  double len;
};

bool by_lo(const Interval& a, const Interval& b) { return a.lo < b.lo; }

void push_arc_pieces(std::vector<Interval>& out, double start, double length) {
  const double end = start + length;
  if (end <= 1.0) {
    out.push_back({start, end, length});
  } else {
    out.push_back({start, 1.0, 1.0 - start});
    out.push_back({0.0, end - 1.0, end - 1.0});
  }
}

std::vector<Interval> to_intervals(const ArcSet& a) {
  std::vector<Interval> out;
  if (a.is_full()) {
    out.push_back({0.0, 1.0, 1.0});
    return out;
  }
  out.reserve(a.size() + 1);
  for (const Arc& arc : a.arcs()) push_arc_pieces(out, arc.start, arc.length);
  // Only the last arc may wrap; its tail piece starts at 0.
  if (!out.empty() && out.back().lo == 0.0 && out.size() > 1) {
    std::rotate(out.begin(), out.end() - 1, out.end());
  }
  return out;
}

// Merges a list sorted by lo in place.
void merge_sorted(std::vector<Interval>& v) {
  if (v.empty()) return;
  std::size_t w = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    Interval& back = v[w];
    const Interval& cur = v[i];
    if (cur.lo - back.hi < kMergeGap) {
      if (cur.hi > back.hi) {
        back.hi = cur.hi;
        back.len = back.hi - back.lo;
      }
    } else {
      v[++w] = cur;
    }
  }
  v.resize(w + 1);
}

}  // namespace

class ArcSetBuilder {
 public:
  // `v` is sorted, merged, and confined to [0, 1].
  static ArcSet from_intervals(std::vector<Interval> v) {
    ArcSet s;
    if (v.empty()) return s;
    const Interval& first = v.front();
    const Interval& last = v.back();
    const double seam_gap = (1.0 - last.hi) + first.lo;
    if (v.size() == 1) {
      if (seam_gap < kMergeGap) return ArcSet::full();
      if (first.hi > first.lo) s.arcs_.push_back({first.lo, first.len});
      return s;
    }
    s.arcs_.reserve(v.size());
    if (seam_gap < kMergeGap) {
      for (std::size_t i = 1; i + 1 < v.size(); ++i) s.arcs_.push_back({v[i].lo, v[i].len});
      const double length = (1.0 - last.lo) + first.hi;
      if (length >= 1.0) return ArcSet::full();
      s.arcs_.push_back({last.lo, length});
    } else {
      for (const Interval& iv : v) s.arcs_.push_back({iv.lo, iv.len});
    }
    return s;
  }
};

double wrap(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y = 0.0;
  return y;
}

double dist(double x, double y) {
  const double d = std::fabs(wrap(x) - wrap(y));
  return std::min(d, 1.0 - d);
}

ArcSet ArcSet::full() {
  ArcSet s;
  s.arcs_.push_back({0.0, 1.0});
  s.full_ = true;
  return s;
}

ArcSet ArcSet::from_arcs(std::vector<Arc> arcs) {
  std::vector<Interval> v;
  v.reserve(arcs.size() + 1);
  for (const Arc& a : arcs) {
    if (!(a.length > 0.0)) continue;
    if (a.length >= 1.0) return full();
    push_arc_pieces(v, wrap(a.start), a.length);
  }
  std::sort(v.begin(), v.end(), by_lo);
  merge_sorted(v);
  return ArcSetBuilder::from_intervals(std::move(v));
}

ArcSet ArcSet::from_interval(double a, double b) { return from_arcs({Arc{a, b - a}}); }

ArcSet ball(double center, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::invalid_radius, "ball radius must be positive");
  if (2.0 * r >= 1.0) return ArcSet::full();
  return ArcSet::from_arcs({Arc{center - r, 2.0 * r}});
}

ArcSet unite(const ArcSet& a, const ArcSet& b) {
  if (a.is_full() || b.is_full()) return ArcSet::full();
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<Interval> v = to_intervals(a);
  const auto mid = static_cast<std::ptrdiff_t>(v.size());
  const std::vector<Interval> vb = to_intervals(b);
  v.insert(v.end(), vb.begin(), vb.end());
  std::inplace_merge(v.begin(), v.begin() + mid, v.end(), by_lo);
  merge_sorted(v);
  return ArcSetBuilder::from_intervals(std::move(v));
}

ArcSet intersect(const ArcSet& a, const ArcSet& b) {
  if (a.empty() || b.empty()) return {};
  if (a.is_full()) return b;
  if (b.is_full()) return a;
  const std::vector<Interval> va = to_intervals(a);
  const std::vector<Interval> vb = to_intervals(b);
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < va.size() && j < vb.size()) {
    const Interval& x = va[i];
    const Interval& y = vb[j];
    const double lo = std::max(x.lo, y.lo);
    const double hi = std::min(x.hi, y.hi);
    if (hi > lo) {
      double len = hi - lo;
      if (lo == x.lo && hi == x.hi) len = x.len;
      else if (lo == y.lo && hi == y.hi) len = y.len;
      out.push_back({lo, hi, len});
    }
    if (x.hi < y.hi) ++i;
    else ++j;
  }
  return ArcSetBuilder::from_intervals(std::move(out));
}

ArcSet complement(const ArcSet& a) {
  if (a.empty()) return ArcSet::full();
  if (a.is_full()) return {};
  const std::vector<Interval> v = to_intervals(a);
  std::vector<Interval> out;
  out.reserve(v.size() + 1);
  double prev = 0.0;
  for (const Interval& iv : v) {
    if (iv.lo > prev) out.push_back({prev, iv.lo, iv.lo - prev});
    prev = iv.hi;
  }
  if (prev < 1.0) out.push_back({prev, 1.0, 1.0 - prev});
  return ArcSetBuilder::from_intervals(std::move(out));
}

ArcSet thicken(const ArcSet& a, double r) {
  if (r < 0.0) throw Error(ErrorCode::invalid_radius, "thickening radius must be non-negative");
  if (r == 0.0 || a.empty() || a.is_full()) return a;
  std::vector<Arc> grown;
  grown.reserve(a.size());
  for (const Arc& arc : a.arcs()) grown.push_back({arc.start - r, arc.length + 2.0 * r});
  return ArcSet::from_arcs(std::move(grown));
}

double measure(const ArcSet& a) {
  if (a.is_full()) return 1.0;
  double total = 0.0;
  for (const Arc& arc : a.arcs()) total += arc.length;
  return std::min(total, 1.0);
}

bool covers_full(const ArcSet& a) { return a.is_full(); }

bool contains(const ArcSet& a, double x) {
  if (a.is_full()) return true;
  if (a.empty()) return false;
  x = wrap(x);
  const auto arcs = a.arcs();
  auto it = std::upper_bound(arcs.begin(), arcs.end(), x,
                             [](double v, const Arc& arc) { return v < arc.start; });
  if (it != arcs.begin() && x <= std::prev(it)->end()) return true;
  const Arc& last = arcs.back();
  return last.end() > 1.0 && x + 1.0 <= last.end();
}

bool includes(const ArcSet& outer, const ArcSet& inner, double tol) {
  if (inner.empty() || outer.is_full()) return true;
  const ArcSet grown = tol > 0.0 ? thicken(outer, tol) : outer;
  return intersect(inner, complement(grown)).empty();
}

bool approx_equal(const ArcSet& a, const ArcSet& b, double tol) {
  return includes(a, b, tol) && includes(b, a, tol);
}

std::int64_t box_count(const ArcSet& a, std::int64_t k) {
  if (k < 1) throw Error(ErrorCode::domain, "box_count needs k >= 1");
  if (a.empty()) return 0;
  if (a.is_full()) return k;
  const auto kd = static_cast<double>(k);
  std::int64_t count = 0;
  std::int64_t covered_to = -1;
  bool cell0 = false;
  bool touches_one = false;
  for (const Interval& iv : to_intervals(a)) {
    auto first = static_cast<std::int64_t>(std::floor(iv.lo * kd));
    auto last = static_cast<std::int64_t>(std::floor(iv.hi * kd));
    first = std::clamp<std::int64_t>(first, 0, k - 1);
    if (last >= k) {
      touches_one = true;
      last = k - 1;
    }
    if (first == 0) cell0 = true;
    const std::int64_t from = std::max(first, covered_to + 1);
    if (last >= from) count += last - from + 1;
    covered_to = std::max(covered_to, last);
  }
  if (touches_one && !cell0) ++count;
  return count;
}

ArcSet union_of_balls(std::span<const double> sorted_centers, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::invalid_radius, "ball radius must be positive");
  if (sorted_centers.empty()) return {};
  if (2.0 * r >= 1.0) return ArcSet::full();
  const double len = 2.0 * r;
  std::vector<Interval> v;
  v.reserve(sorted_centers.size() + 2);
  for (double c : sorted_centers) {
    push_arc_pieces(v, wrap(c - r), len);
  }
  std::sort(v.begin(), v.end(), by_lo);
  merge_sorted(v);
  return ArcSetBuilder::from_intervals(std::move(v));
}

ArcSet intersect_with_balls(const ArcSet& a, std::span<const std::span<const double>> groups, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::invalid_radius, "ball radius must be positive");
  bool any = false;
  for (const auto& g : groups) any = any || !g.empty();
  if (a.empty() || !any) return {};
  if (2.0 * r >= 1.0) return a;

  const double len = 2.0 * r;
  std::vector<Interval> out;
  std::vector<Interval> local;
  for (const Interval& iv : to_intervals(a)) {
    local.clear();
    // Centers whose ball can reach [iv.lo, iv.hi], including copies shifted by
    // one turn across the seam.
    for (const auto& g : groups) {
      auto lower = [&](double v) { return std::lower_bound(g.begin(), g.end(), v); };
      auto upper = [&](double v) { return std::upper_bound(g.begin(), g.end(), v); };
      for (auto it = lower(iv.lo - r), e = upper(iv.hi + r); it != e; ++it) {
        local.push_back({*it - r, *it - r + len, len});
      }
      if (iv.lo - r < 0.0) {
        for (auto it = lower(iv.lo - r + 1.0); it != g.end(); ++it) {
          local.push_back({*it - 1.0 - r, *it - 1.0 - r + len, len});
        }
      }
      if (iv.hi + r > 1.0) {
        for (auto it = g.begin(), e = upper(iv.hi + r - 1.0); it != e; ++it) {
          local.push_back({*it + 1.0 - r, *it + 1.0 - r + len, len});
        }
      }
    }
    if (local.empty()) continue;
    std::sort(local.begin(), local.end(), by_lo);
    merge_sorted(local);
    for (const Interval& b : local) {
      const double lo = std::max(iv.lo, b.lo);
      const double hi = std::min(iv.hi, b.hi);
      if (!(hi > lo)) continue;
      double l = hi - lo;
      if (lo == iv.lo && hi == iv.hi) l = iv.len;
      else if (lo == b.lo && hi == b.hi) l = b.len;
      out.push_back({lo, hi, l});
    }
  }
  return ArcSetBuilder::from_intervals(std::move(out));
}

ArcSet intersect_with_balls(const ArcSet& a, std::span<const double> sorted_centers, double r) {
  const std::span<const double> groups[] = {sorted_centers};
  return intersect_with_balls(a, std::span<const std::span<const double>>(groups), r);
}

namespace {

void check_exponent(double s) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::invalid_exponent, "Riesz exponent must lie in (0, 1)");
}

// Second antiderivative of the periodic kernel dist(u, 0)^(-s), even, with
// value and slope 0 at u = 0. Valid for |u| <= 1.
struct Kernel {
  double s;
  double inv_1s;       // 1 / (1 - s)
  double inv_1s2s;     // 1 / ((1 - s)(2 - s))
  double slope_half;   // d/du of the line part at u = 1/2

  explicit Kernel(double s_)
      : s(s_),
        inv_1s(1.0 / (1.0 - s_)),
        inv_1s2s(1.0 / ((1.0 - s_) * (2.0 - s_))),
        slope_half(std::pow(0.5, 1.0 - s_) / (1.0 - s_)) {}

  double p(double u) const { return u <= 0.0 ? 0.0 : std::pow(u, 2.0 - s) * inv_1s2s; }
  double dp(double u) const { return u <= 0.0 ? 0.0 : std::pow(u, 1.0 - s) * inv_1s; }

  double h(double u) const {
    u = std::min(std::fabs(u), 1.0);
    if (u <= 0.5) return p(u);
    return p(1.0 - u) + 2.0 * slope_half * (u - 0.5);
  }

  double dh(double u) const {
    const double sign = u < 0.0 ? -1.0 : 1.0;
    u = std::min(std::fabs(u), 1.0);
    if (u <= 0.5) return sign * dp(u);
    return sign * (2.0 * slope_half - dp(1.0 - u));
  }
};

// Pieces of at most half a turn so each pair has one consistent lift.
std::vector<Interval> riesz_pieces(const ArcSet& a) {
  std::vector<Interval> pieces;
  for (const Interval& iv : to_intervals(a)) {
    if (iv.hi - iv.lo > 0.5) {
      const double mid = 0.5 * (iv.lo + iv.hi);
      pieces.push_back({iv.lo, mid, mid - iv.lo});
      pieces.push_back({mid, iv.hi, iv.hi - mid});
    } else {
      pieces.push_back(iv);
    }
  }
  return pieces;
}

double pair_integral(const Kernel& k, const Interval& x, const Interval& y) {
  const double shift = std::round(0.5 * ((x.lo + x.hi) - (y.lo + y.hi)));
  const double c = y.lo + shift;
  const double d = y.hi + shift;
  const double a = x.lo;
  const double b = x.hi;
  return (k.h(b - c) - k.h(a - c)) - (k.h(b - d) - k.h(a - d));
}

}  // namespace

double riesz_total(double s) {
  check_exponent(s);
  return std::pow(2.0, s) / (1.0 - s);
}

double riesz_energy(const ArcSet& a, double s) {
  check_exponent(s);
  if (a.empty()) return 0.0;
  if (a.is_full()) return riesz_total(s);
  const Kernel k(s);
  const std::vector<Interval> pieces = riesz_pieces(a);
  double diagonal = 0.0;
  double cross = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    diagonal += 2.0 * k.p(pieces[i].hi - pieces[i].lo);
    for (std::size_t j = i + 1; j < pieces.size(); ++j) cross += pair_integral(k, pieces[i], pieces[j]);
  }
  return diagonal + 2.0 * cross;
}

double riesz_potential(const ArcSet& a, double s, double x) {
  check_exponent(s);
  const double mass = measure(a);
  if (!(mass > 0.0)) throw Error(ErrorCode::degenerate_measure, "Riesz potential of a null set");
  if (a.is_full()) return riesz_total(s);
  const Kernel k(s);
  x = wrap(x);
  double total = 0.0;
  for (const Interval& iv : riesz_pieces(a)) {
    const double shift = std::round(x - 0.5 * (iv.lo + iv.hi));
    total += k.dh(x - (iv.lo + shift)) - k.dh(x - (iv.hi + shift));
  }
  return total / mass;
}

}  // namespace ucover
