#pragma once

// Closed-form radius sequences r_n and the series conditions that decide
// covering, full measure, and countability of the uniform covering set.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ucover {

enum class FamilyKind {
  power_law,        // c / n^alpha
  log_over_n,       // c log n / n
  log_plus_loglog,  // (2 log n + gamma log log n) / n
  loglog_half,      // c log log n / (2n)
  loglog_plus,      // (log log n + gamma log log log n) / (2n)
};

struct RadiusFamily {
  FamilyKind kind = FamilyKind::power_law;
  double c = 1.0;
  double alpha = 1.0;
  double gamma = 0.0;

  static RadiusFamily power_law(double c, double alpha);
  static RadiusFamily log_over_n(double c);
  static RadiusFamily log_plus_loglog(double gamma);
  static RadiusFamily loglog_half(double c);
  static RadiusFamily loglog_plus(double gamma);

  /// Smallest index at which every iterated logarithm in the formula is
  /// positive; partial sums start here.
  std::int64_t n_min() const;
  /// r_n; throws Error(domain) for n < n_min().
  double operator()(std::int64_t n) const;
  /// Compact text form accepted by parse_family.
  std::string to_string() const;
};

/// Parses "pow:c=1,alpha=2.5", "logn:c=3", "logn2:gamma=1.5", "loglog:c=2",
/// "loglogplus:gamma=3". Unknown kinds raise unsupported_family, malformed
/// parameters raise parse.
RadiusFamily parse_family(std::string_view text);

double radius(const RadiusFamily& f, std::int64_t n);

/// n (1 - r_n)^n, evaluated as n exp(n log1p(-r_n)); r_n >= 1 gives 0.
double covering_term(const RadiusFamily& f, std::int64_t n);
/// Sum of covering_term over n_min..N.
double covering_series_partial(const RadiusFamily& f, std::int64_t N);
/// min of covering_term over [N/2, N], a finite-window proxy for the liminf.
double liminf_indicator(const RadiusFamily& f, std::int64_t N);

struct SheppSeries {
  double prefix_r = 0.0;  // r_{n_min} + ... + r_N
  double partial = 0.0;   // sum of exp(prefix_n) / n^2
};
SheppSeries shepp_series_partial(const RadiusFamily& f, std::int64_t N);

struct GalambosSums {
  double sum_r = 0.0;
  double sum_r_exp = 0.0;  // sum of r_n exp(-2 n r_n)
};
GalambosSums galambos_partial(const RadiusFamily& f, std::int64_t N);

/// Sum of n r_n over n_min..N.
double countable_series_partial(const RadiusFamily& f, std::int64_t N);

enum class Verdict { yes, no, unknown };
std::string_view to_string(Verdict v);

struct MonotonicityFlags {
  bool r_decreasing = false;
  bool nr_decreasing = false;
  bool nr_nondecreasing = false;
  std::int64_t from = 0;
  std::int64_t to = 0;
};

/// Checked on every integer in [from, to].
MonotonicityFlags check_monotonicity(const RadiusFamily& f, std::int64_t from, std::int64_t to);

struct SeriesDiagnostics {
  std::int64_t N = 0;
  double covering_sum = 0.0;
  double liminf = 0.0;
  double shepp_partial = 0.0;
  double galambos_sum_r = 0.0;
  double galambos_sum_r_exp = 0.0;
  double countable_sum = 0.0;
};

SeriesDiagnostics diagnose(const RadiusFamily& f, std::int64_t N);

struct RegimeVerdict {
  Verdict covers_T = Verdict::unknown;
  Verdict full_measure = Verdict::unknown;
  Verdict countable = Verdict::unknown;
  MonotonicityFlags monotonicity;
  std::vector<std::string> notes;
  std::vector<SeriesDiagnostics> diagnostics;
};

/// Analytic verdicts from the family parameters; the numeric diagnostics at
/// each N in `diagnostic_N` are attached as evidence and never change a
/// verdict.
RegimeVerdict classify(const RadiusFamily& f, std::span<const std::int64_t> diagnostic_N = {});

}  // namespace ucover
