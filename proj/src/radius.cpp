#include "ucover/radius.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "ucover/errors.hpp"

namespace ucover {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::domain, what);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

RadiusFamily RadiusFamily::power_law(double c, double alpha) {
  require(c > 0.0, "power law needs c > 0");
  require(alpha >= 0.0, "power law needs alpha >= 0");
  return {FamilyKind::power_law, c, alpha, 0.0};
}

RadiusFamily RadiusFamily::log_over_n(double c) {
  require(c > 0.0, "log n / n family needs c > 0");
  return {FamilyKind::log_over_n, c, 1.0, 0.0};
}

RadiusFamily RadiusFamily::log_plus_loglog(double gamma) {
  require(gamma >= 0.0, "gamma must be non-negative");
  return {FamilyKind::log_plus_loglog, 1.0, 1.0, gamma};
}

RadiusFamily RadiusFamily::loglog_half(double c) {
  require(c > 0.0, "log log n / 2n family needs c > 0");
  return {FamilyKind::loglog_half, c, 1.0, 0.0};
}

RadiusFamily RadiusFamily::loglog_plus(double gamma) {
  require(gamma >= 0.0, "gamma must be non-negative");
  return {FamilyKind::loglog_plus, 1.0, 1.0, gamma};
}

std::int64_t RadiusFamily::n_min() const {
  switch (kind) {
    case FamilyKind::power_law: return 1;
    case FamilyKind::log_over_n: return 2;
    case FamilyKind::log_plus_loglog:
    case FamilyKind::loglog_half: return 3;
    case FamilyKind::loglog_plus: return 16;
  }
  return 1;
}

double RadiusFamily::operator()(std::int64_t n) const {
  if (n < n_min()) throw Error(ErrorCode::domain, "radius index below n_min for " + to_string());
  const double x = static_cast<double>(n);
  switch (kind) {
    case FamilyKind::power_law: return c / std::pow(x, alpha);
    case FamilyKind::log_over_n: return c * std::log(x) / x;
    case FamilyKind::log_plus_loglog: return (2.0 * std::log(x) + gamma * std::log(std::log(x))) / x;
    case FamilyKind::loglog_half: return c * std::log(std::log(x)) / (2.0 * x);
    case FamilyKind::loglog_plus: {
      const double ll = std::log(std::log(x));
      return (ll + gamma * std::log(ll)) / (2.0 * x);
    }
  }
  return 0.0;
}

std::string RadiusFamily::to_string() const {
  switch (kind) {
    case FamilyKind::power_law: return "pow:c=" + fmt(c) + ",alpha=" + fmt(alpha);
    case FamilyKind::log_over_n: return "logn:c=" + fmt(c);
    case FamilyKind::log_plus_loglog: return "logn2:gamma=" + fmt(gamma);
    case FamilyKind::loglog_half: return "loglog:c=" + fmt(c);
    case FamilyKind::loglog_plus: return "loglogplus:gamma=" + fmt(gamma);
  }
  return "?";
}

RadiusFamily parse_family(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  std::map<std::string, double, std::less<>> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw Error(ErrorCode::parse, "expected key=value in family spec '" + std::string(text) + "'");
      }
      const std::string_view value = item.substr(eq + 1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw Error(ErrorCode::parse, "bad number '" + std::string(value) + "' in family spec");
      }
      params[std::string(item.substr(0, eq))] = v;
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }

  auto take = [&](const char* key, std::optional<double> fallback) {
    auto it = params.find(key);
    if (it == params.end()) {
      if (!fallback) throw Error(ErrorCode::parse, std::string("family spec is missing '") + key + "'");
      return *fallback;
    }
    const double v = it->second;
    params.erase(it);
    return v;
  };

  RadiusFamily f;
  if (name == "pow") {
    const double c = take("c", 1.0);
    f = RadiusFamily::power_law(c, take("alpha", std::nullopt));
  } else if (name == "logn") {
    f = RadiusFamily::log_over_n(take("c", std::nullopt));
  } else if (name == "logn2") {
    f = RadiusFamily::log_plus_loglog(take("gamma", std::nullopt));
  } else if (name == "loglog") {
    f = RadiusFamily::loglog_half(take("c", std::nullopt));
  } else if (name == "loglogplus") {
    f = RadiusFamily::loglog_plus(take("gamma", std::nullopt));
  } else {
    throw Error(ErrorCode::unsupported_family, "unsupported radius family '" + std::string(name) + "'");
  }
  if (!params.empty()) {
    throw Error(ErrorCode::parse, "unknown parameter '" + params.begin()->first + "' for family " + std::string(name));
  }
  return f;
}

double radius(const RadiusFamily& f, std::int64_t n) { return f(n); }

double covering_term(const RadiusFamily& f, std::int64_t n) {
  const double r = f(n);
  if (r >= 1.0) return 0.0;
  const double x = static_cast<double>(n);
  return x * std::exp(x * std::log1p(-r));
}

double covering_series_partial(const RadiusFamily& f, std::int64_t N) {
  long double sum = 0.0L;
  for (std::int64_t n = f.n_min(); n <= N; ++n) sum += covering_term(f, n);
  return static_cast<double>(sum);
}

double liminf_indicator(const RadiusFamily& f, std::int64_t N) {
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t n = std::max(N / 2, f.n_min()); n <= N; ++n) best = std::min(best, covering_term(f, n));
  return best;
}

SheppSeries shepp_series_partial(const RadiusFamily& f, std::int64_t N) {
  long double prefix = 0.0L;
  long double sum = 0.0L;
  for (std::int64_t n = f.n_min(); n <= N; ++n) {
    prefix += f(n);
    sum += std::exp(prefix - 2.0L * std::log(static_cast<long double>(n)));
  }
  return {static_cast<double>(prefix), static_cast<double>(sum)};
}

GalambosSums galambos_partial(const RadiusFamily& f, std::int64_t N) {
  long double sr = 0.0L;
  long double sre = 0.0L;
  for (std::int64_t n = f.n_min(); n <= N; ++n) {
    const double r = f(n);
    sr += r;
    sre += r * std::exp(-2.0 * static_cast<double>(n) * r);
  }
  return {static_cast<double>(sr), static_cast<double>(sre)};
}

double countable_series_partial(const RadiusFamily& f, std::int64_t N) {
  long double sum = 0.0L;
  for (std::int64_t n = f.n_min(); n <= N; ++n) sum += static_cast<long double>(n) * f(n);
  return static_cast<double>(sum);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    case Verdict::unknown: return "unknown";
  }
  return "unknown";
}

MonotonicityFlags check_monotonicity(const RadiusFamily& f, std::int64_t from, std::int64_t to) {
  MonotonicityFlags flags{true, true, true, std::max(from, f.n_min()), to};
  double prev_r = f(flags.from);
  double prev_nr = static_cast<double>(flags.from) * prev_r;
  for (std::int64_t n = flags.from + 1; n <= to; ++n) {
    const double r = f(n);
    const double nr = static_cast<double>(n) * r;
    if (!(r < prev_r)) flags.r_decreasing = false;
    if (!(nr < prev_nr)) flags.nr_decreasing = false;
    if (nr < prev_nr) flags.nr_nondecreasing = false;
    prev_r = r;
    prev_nr = nr;
  }
  return flags;
}

SeriesDiagnostics diagnose(const RadiusFamily& f, std::int64_t N) {
  SeriesDiagnostics d;
  d.N = N;
  d.covering_sum = covering_series_partial(f, N);
  d.liminf = liminf_indicator(f, N);
  d.shepp_partial = shepp_series_partial(f, N).partial;
  const GalambosSums g = galambos_partial(f, N);
  d.galambos_sum_r = g.sum_r;
  d.galambos_sum_r_exp = g.sum_r_exp;
  d.countable_sum = countable_series_partial(f, N);
  return d;
}

RegimeVerdict classify(const RadiusFamily& f, std::span<const std::int64_t> diagnostic_N) {
  RegimeVerdict v;
  auto& notes = v.notes;
  switch (f.kind) {
    case FamilyKind::log_over_n:
      if (f.c > 2.0) {
        v.covers_T = Verdict::yes;
      } else if (f.c < 1.0) {
        v.covers_T = Verdict::no;
        notes.push_back("liminf n(1-r_n)^n = infinity, so T is not covered almost surely");
      } else {
        notes.push_back("covering is open for 1 <= c <= 2");
        if (f.c == 1.0) notes.push_back("at c = 1 the liminf equals 1, so P(T not contained in U) >= 1/3");
      }
      v.full_measure = Verdict::yes;
      notes.push_back("sum r_n exp(-2n r_n) ~ sum c log n / n^(1+2c) converges while sum r_n diverges");
      break;
    case FamilyKind::log_plus_loglog:
      if (f.gamma > 1.0) v.covers_T = Verdict::yes;
      else notes.push_back("covering criterion sum n(1-r_n)^n diverges or is borderline for gamma <= 1");
      v.full_measure = Verdict::yes;
      break;
    case FamilyKind::loglog_half:
      v.covers_T = Verdict::no;
      notes.push_back("n(1-r_n)^n ~ n (log n)^(-c/2) is unbounded, so T is not covered almost surely");
      v.full_measure = f.c > 1.0 ? Verdict::yes : Verdict::no;
      break;
    case FamilyKind::loglog_plus:
      v.covers_T = Verdict::no;
      if (f.gamma > 2.0) {
        v.full_measure = Verdict::yes;
      } else if (f.gamma > 1.0) {
        notes.push_back(
            "r_n exp(-2n r_n) ~ 1/(2n log n (log log n)^(gamma-1)); the integral test needs gamma > 2, "
            "so 1 < gamma <= 2 is left unknown");
      } else {
        v.full_measure = Verdict::no;
      }
      break;
    case FamilyKind::power_law:
      if (f.alpha < 1.0) {
        v.covers_T = Verdict::yes;
        notes.push_back("n(1-r_n)^n <= n exp(-c n^(1-alpha)) is summable");
      } else {
        v.covers_T = Verdict::no;
        v.full_measure = Verdict::no;
        notes.push_back(
            "E lambda(E_n) = 1 - (1 - 2r_n)^n stays below 1 - exp(-2c) < 1, so by the zero-one law "
            "lambda(U) = 0 almost surely");
      }
      if (f.alpha > 2.0) v.countable = Verdict::yes;
      break;
  }

  if (v.covers_T == Verdict::yes) v.full_measure = Verdict::yes;
  if (v.countable == Verdict::yes) {
    v.full_measure = Verdict::no;
    v.covers_T = Verdict::no;
  }

  v.monotonicity = check_monotonicity(f, std::max<std::int64_t>(16, f.n_min()), 1'000'000);
  for (const std::int64_t N : diagnostic_N) v.diagnostics.push_back(diagnose(f, N));
  return v;
}

}  // namespace ucover
