#include "ucover/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ucover/bounds.hpp"
#include "ucover/errors.hpp"
#include "ucover/estimators.hpp"
#include "ucover/format.hpp"
#include "ucover/radius.hpp"
#include "ucover/simulator.hpp"

namespace ucover {

namespace {

using json = nlohmann::json;

enum class Kind { real, integer, seed, text, flag };

struct OptSpec {
  std::string name;
  Kind kind;
  json def;  // null: no default
  std::string help;
};

struct Artifact {
  std::string file;
  std::string content;
  bool primary = false;
};

using Handler = std::function<std::vector<Artifact>(const json& cfg)>;

struct Command {
  std::string path;  // "bounds", "simulate coverage", ...
  std::string help;
  std::vector<OptSpec> opts;
  Handler run;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_real(const std::string& name, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::parse, "option '" + name + "' expects a number, got '" + text + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& name, const std::string& text) {
  // Accept 1e4 style input as long as it is integral.
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc{} && ptr == text.data() + text.size()) return v;
  const double d = parse_real(name, text);
  if (d != std::floor(d) || std::fabs(d) > 9e15) {
    throw Error(ErrorCode::parse, "option '" + name + "' expects an integer, got '" + text + "'");
  }
  return static_cast<std::int64_t>(d);
}

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse, "seed must be a 64-bit unsigned integer, got '" + text + "'");
  }
}

json convert_text(const OptSpec& spec, const std::string& text) {
  switch (spec.kind) {
    case Kind::real: return parse_real(spec.name, text);
    case Kind::integer: return parse_int(spec.name, text);
    case Kind::seed: return parse_seed(text);
    case Kind::text: return text;
    case Kind::flag: return true;
  }
  return nullptr;
}

json convert_json(const OptSpec& spec, const json& v) {
  const auto bad = [&] { return Error(ErrorCode::parse, "config key '" + spec.name + "' has the wrong type"); };
  switch (spec.kind) {
    case Kind::real:
      if (!v.is_number()) throw bad();
      return v.get<double>();
    case Kind::integer:
      if (v.is_number_integer()) return v.get<std::int64_t>();
      if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>())) {
        return static_cast<std::int64_t>(v.get<double>());
      }
      throw bad();
    case Kind::seed:
      if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) return v.get<std::uint64_t>();
      if (v.is_string()) return parse_seed(v.get<std::string>());
      throw bad();
    case Kind::text:
      if (v.is_null()) return nullptr;
      if (!v.is_string()) throw bad();
      return v;
    case Kind::flag:
      if (!v.is_boolean()) throw bad();
      return v;
  }
  return nullptr;
}

std::vector<OptSpec> common_opts(const std::string& default_format) {
  return {
      {"threads", Kind::integer, 0, "Worker threads for trials (0 = hardware concurrency)"},
      {"seed", Kind::seed, kDefaultSeed, "Master seed (decimal or 0x hex)"},
      {"out-dir", Kind::text, "", "Write artifacts and meta.json here instead of standard output"},
      {"format", Kind::text, default_format, "Output format: csv or json"},
      {"timestamp", Kind::flag, false, "Record the wall-clock time in meta.json"},
  };
}

// ---------------------------------------------------------------- helpers

std::string get_text(const json& cfg, const char* key) {
  return cfg.at(key).is_null() ? std::string() : cfg.at(key).get<std::string>();
}

std::string require_text(const json& cfg, const char* key) {
  std::string s = get_text(cfg, key);
  if (s.empty()) throw Error(ErrorCode::invalid_configuration, std::string("missing required option --") + key);
  return s;
}

std::int64_t positive_int(const json& cfg, const char* key) {
  const auto v = cfg.at(key).get<std::int64_t>();
  if (v < 1) throw Error(ErrorCode::invalid_configuration, std::string("--") + key + " must be >= 1");
  return v;
}

RunOptions run_options(const json& cfg) {
  RunOptions opt;
  opt.master_seed = cfg.at("seed").get<std::uint64_t>();
  const auto threads = cfg.at("threads").get<std::int64_t>();
  if (threads < 0) throw Error(ErrorCode::invalid_configuration, "--threads must be >= 0");
  opt.threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : static_cast<unsigned>(threads);
  return opt;
}

bool want_json(const json& cfg) {
  const std::string f = get_text(cfg, "format");
  if (f != "csv" && f != "json") throw Error(ErrorCode::invalid_configuration, "--format must be csv or json");
  return f == "json";
}

std::vector<std::int64_t> parse_int_list(const std::string& name, const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_int(name, item));
  }
  if (out.empty()) throw Error(ErrorCode::parse, "option '" + name + "' needs a comma-separated list");
  return out;
}

std::vector<std::int64_t> resolve_checkpoints(const json& cfg, std::int64_t start) {
  const std::string list = get_text(cfg, "checkpoints");
  if (!list.empty()) return parse_int_list("checkpoints", list);
  const std::int64_t n = positive_int(cfg, "n");
  return geometric_checkpoints(std::min(start, n), n, cfg.at("factor").get<double>());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// JSON numbers: nlohmann prints doubles in shortest round-trip form; NaN and
// infinities are not JSON, so they become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json point_json(const BoundPoint& p) {
  return {{"kind", std::string(to_string(p.kind))}, {"c", num(p.c)},       {"theta", num(p.theta)},
          {"value", num(p.value)},                  {"valid", p.valid},    {"clamped", p.clamped}};
}

// ---------------------------------------------------------------- bounds

std::vector<double> parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw Error(ErrorCode::parse, "--c-grid expects start:stop:step");
  }
  const double lo = parse_real("c-grid", text.substr(0, a));
  const double hi = parse_real("c-grid", text.substr(a + 1, b - a - 1));
  const double step = parse_real("c-grid", text.substr(b + 1));
  if (!(step > 0.0) || !(hi >= lo) || !(lo > 0.0)) {
    throw Error(ErrorCode::invalid_configuration, "--c-grid needs 0 < start <= stop and step > 0");
  }
  std::vector<double> out;
  for (std::int64_t i = 0;; ++i) {
    // Round away the binary noise of start + i*step.
    const double v = std::stod(format_real(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12));
    if (v > hi + 1e-9 * step) break;
    out.push_back(v);
    if (out.size() > 100000) throw Error(ErrorCode::invalid_configuration, "--c-grid has too many points");
  }
  return out;
}

std::vector<Artifact> cmd_bounds(const json& cfg) {
  const std::string grid = get_text(cfg, "c-grid");
  const std::string kind = get_text(cfg, "kind");
  if (kind != "all" && kind != "lower" && kind != "upper-weak" && kind != "upper-matrix") {
    throw Error(ErrorCode::invalid_configuration, "--kind must be all, lower, upper-weak or upper-matrix");
  }
  const std::string fmt = get_text(cfg, "format");
  if (!grid.empty()) {
    const auto cs = parse_grid(grid);
    const auto rows = bound_curve(cs);
    if (fmt == "json") {
      json arr = json::array();
      for (const auto& r : rows) {
        arr.push_back({{"c", num(r.c)},
                       {"upper_weak", point_json(r.weak)},
                       {"upper_matrix", point_json(r.matrix)},
                       {"lower", point_json(r.lower)}});
      }
      return {{"bounds.json", dump(arr), true}};
    }
    if (!fmt.empty() && fmt != "csv") throw Error(ErrorCode::invalid_configuration, "--format must be csv or json");
    std::ostringstream os;
    write_bound_curve_csv(os, rows);
    return {{"bounds.csv", os.str(), true}};
  }

  if (cfg.at("c").is_null()) throw Error(ErrorCode::invalid_configuration, "bounds needs --c or --c-grid");
  const double c = cfg.at("c").get<double>();
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::domain, "c must be a finite number > 0");
  const bool fixed = !cfg.at("theta").is_null();
  const double theta = fixed ? cfg.at("theta").get<double>() : 0.0;
  if (fixed && (!(theta > 1.0) || !std::isfinite(theta))) {
    throw Error(ErrorCode::domain, "theta must be a finite number > 1");
  }
  std::vector<BoundPoint> pts;
  if (kind == "all" || kind == "upper-weak") pts.push_back(fixed ? upper_bound_weak(c, theta) : optimize_upper_weak(c));
  if (kind == "all" || kind == "upper-matrix") {
    pts.push_back(fixed ? upper_bound_matrix(c, theta) : optimize_upper_matrix(c));
  }
  if (kind == "all" || kind == "lower") pts.push_back(fixed ? lower_bound(c, theta) : optimize_lower(c));

  if (fmt == "csv") {
    std::ostringstream os;
    os << "kind,c,theta,value,valid,clamped,optimized\n";
    for (const auto& p : pts) {
      os << to_string(p.kind) << ',' << format_real(p.c) << ',' << format_real(p.theta) << ','
         << format_real(p.value) << ',' << p.valid << ',' << p.clamped << ',' << !fixed << '\n';
    }
    return {{"bounds.csv", os.str(), true}};
  }
  if (!fmt.empty() && fmt != "json") throw Error(ErrorCode::invalid_configuration, "--format must be csv or json");
  json j;
  if (pts.size() == 1) {
    j = point_json(pts.front());
    j["optimized"] = !fixed;
  } else {
    j = {{"c", num(c)}, {"optimized", !fixed}, {"points", json::array()}};
    for (const auto& p : pts) j["points"].push_back(point_json(p));
  }
  return {{"bounds.json", dump(j), true}};
}

// ---------------------------------------------------------------- conditions

std::vector<Artifact> cmd_conditions(const json& cfg) {
  const RadiusFamily f = parse_family(require_text(cfg, "family"));
  const auto Ns = parse_int_list("N", get_text(cfg, "N"));
  for (const auto N : Ns) {
    if (N < f.n_min() || N > 100'000'000) {
      throw Error(ErrorCode::invalid_configuration, "--N entries must lie in [n_min, 1e8]");
    }
  }
  const RegimeVerdict v = classify(f, Ns);
  if (want_json(cfg)) {
    json j;
    j["family"] = f.to_string();
    j["covers_T"] = std::string(to_string(v.covers_T));
    j["full_measure"] = std::string(to_string(v.full_measure));
    j["countable"] = std::string(to_string(v.countable));
    j["monotonicity"] = {{"from", v.monotonicity.from},
                         {"to", v.monotonicity.to},
                         {"r_decreasing", v.monotonicity.r_decreasing},
                         {"nr_decreasing", v.monotonicity.nr_decreasing},
                         {"nr_nondecreasing", v.monotonicity.nr_nondecreasing}};
    j["notes"] = v.notes;
    j["diagnostics"] = json::array();
    for (const auto& d : v.diagnostics) {
      j["diagnostics"].push_back({{"N", d.N},
                                  {"covering_sum", num(d.covering_sum)},
                                  {"liminf", num(d.liminf)},
                                  {"shepp_partial", num(d.shepp_partial)},
                                  {"galambos_sum_r", num(d.galambos_sum_r)},
                                  {"galambos_sum_r_exp", num(d.galambos_sum_r_exp)},
                                  {"countable_sum", num(d.countable_sum)}});
    }
    return {{"conditions.json", dump(j), true}};
  }
  std::ostringstream os;
  os << "N,covering_sum,liminf,shepp_partial,galambos_sum_r,galambos_sum_r_exp,countable_sum\n";
  for (const auto& d : v.diagnostics) {
    os << d.N << ',' << format_real(d.covering_sum) << ',' << format_real(d.liminf) << ','
       << format_real(d.shepp_partial) << ',' << format_real(d.galambos_sum_r) << ','
       << format_real(d.galambos_sum_r_exp) << ',' << format_real(d.countable_sum) << '\n';
  }
  return {{"conditions.csv", os.str(), true}};
}

// ---------------------------------------------------------------- simulate

std::vector<Artifact> cmd_coverage(const json& cfg) {
  const RadiusFamily f = parse_family(require_text(cfg, "family"));
  const RunOptions opt = run_options(cfg);
  const auto trials = positive_int(cfg, "trials");
  const auto start = std::max(f.n_min(), positive_int(cfg, "n-start"));
  const auto cps = resolve_checkpoints(cfg, start);
  const bool as_json = want_json(cfg);
  const auto rows = coverage_experiment(f, cps, trials, opt);
  if (as_json) {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"n", r.n},
                     {"trials", r.trials},
                     {"not_covered", r.not_covered},
                     {"frequency", num(r.frequency)},
                     {"wilson_lo", num(r.wilson_lo)},
                     {"wilson_hi", num(r.wilson_hi)},
                     {"shepp_lower", num(r.shepp_lower)},
                     {"shepp_upper", num(r.shepp_upper)},
                     {"shepp_lower_2r", num(r.shepp_lower_2r)},
                     {"shepp_upper_2r", num(r.shepp_upper_2r)}});
    }
    return {{"coverage.json", dump(arr), true}};
  }
  std::ostringstream os;
  os << "n,trials,not_covered,frequency,wilson_lo,wilson_hi,shepp_lower,shepp_upper,shepp_lower_2r,shepp_upper_2r\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.trials << ',' << r.not_covered << ',' << format_real(r.frequency) << ','
       << format_real(r.wilson_lo) << ',' << format_real(r.wilson_hi) << ',' << format_real(r.shepp_lower) << ','
       << format_real(r.shepp_upper) << ',' << format_real(r.shepp_lower_2r) << ',' << format_real(r.shepp_upper_2r)
       << '\n';
  }
  return {{"coverage.csv", os.str(), true}};
}

std::vector<Artifact> cmd_measure(const json& cfg) {
  const RadiusFamily f = parse_family(require_text(cfg, "family"));
  const RunOptions opt = run_options(cfg);
  const auto trials = positive_int(cfg, "trials");
  const auto p = positive_int(cfg, "p");
  const auto cps = resolve_checkpoints(cfg, p);
  const bool as_json = want_json(cfg);
  const auto rows = measure_experiment(f, p, cps, trials, opt);
  if (as_json) {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"N", r.N},
                     {"mean_measure_U", num(r.mean_measure_U)},
                     {"se_measure_U", num(r.se_measure_U)},
                     {"mean_arcs_U", num(r.mean_arcs_U)},
                     {"mean_measure_E", num(r.mean_measure_E)},
                     {"se_measure_E", num(r.se_measure_E)},
                     {"expected_measure_E", num(r.expected_measure_E)}});
    }
    return {{"measure.json", dump(arr), true}};
  }
  std::ostringstream os;
  os << "N,mean_measure_U,se_measure_U,mean_arcs_U,mean_measure_E,se_measure_E,expected_measure_E\n";
  for (const auto& r : rows) {
    os << r.N << ',' << format_real(r.mean_measure_U) << ',' << format_real(r.se_measure_U) << ','
       << format_real(r.mean_arcs_U) << ',' << format_real(r.mean_measure_E) << ',' << format_real(r.se_measure_E)
       << ',' << format_real(r.expected_measure_E) << '\n';
  }
  return {{"measure.csv", os.str(), true}};
}

std::vector<Artifact> cmd_countable(const json& cfg) {
  const RadiusFamily f = parse_family(require_text(cfg, "family"));
  const RunOptions opt = run_options(cfg);
  const auto trials = positive_int(cfg, "trials");
  const auto p = positive_int(cfg, "p");
  const auto cps = resolve_checkpoints(cfg, p);
  const bool as_json = want_json(cfg);
  const auto rows = countability_experiment(f, p, cps, trials, opt);
  if (as_json) {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"N", r.N},
                     {"mean_measure", num(r.mean_measure)},
                     {"mean_arcs", num(r.mean_arcs)},
                     {"mean_ratio", num(r.mean_ratio)},
                     {"frac_stabilized", num(r.frac_stabilized)},
                     {"frac_contains_all", num(r.frac_contains_all)},
                     {"frac_at_most_p", num(r.frac_at_most_p)},
                     {"frac_criterion", num(r.frac_criterion)}});
    }
    return {{"countable.json", dump(arr), true}};
  }
  std::ostringstream os;
  os << "N,mean_measure,mean_arcs,mean_ratio,frac_stabilized,frac_contains_all,frac_at_most_p,frac_criterion\n";
  for (const auto& r : rows) {
    os << r.N << ',' << format_real(r.mean_measure) << ',' << format_real(r.mean_arcs) << ','
       << format_real(r.mean_ratio) << ',' << format_real(r.frac_stabilized) << ','
       << format_real(r.frac_contains_all) << ',' << format_real(r.frac_at_most_p) << ','
       << format_real(r.frac_criterion) << '\n';
  }
  return {{"countable.csv", os.str(), true}};
}

// ---------------------------------------------------------------- estimators

std::vector<Artifact> cmd_cover_growth(const json& cfg) {
  const std::string variant = get_text(cfg, "variant");
  if (variant != "simple" && variant != "refined") {
    throw Error(ErrorCode::invalid_configuration, "--variant must be simple or refined");
  }
  const double c = cfg.at("c").get<double>();
  const double theta = cfg.at("theta").get<double>();
  if (!(c > 0.0)) throw Error(ErrorCode::domain, "c must be > 0");
  if (!(theta > 1.0)) throw Error(ErrorCode::domain, "theta must be > 1");
  const auto l = cfg.at("l").get<std::int64_t>();
  if (l < 0 || l > 40) throw Error(ErrorCode::invalid_configuration, "--l must lie in [0, 40]");
  const auto levels = positive_int(cfg, "levels");
  const auto trials = positive_int(cfg, "trials");
  const RunOptions opt = run_options(cfg);
  const bool as_json = want_json(cfg);
  const GeometricSchedule sched(theta);
  if (sched.n(static_cast<int>(l + levels + 1)) > 50'000'000) {
    throw Error(ErrorCode::invalid_configuration, "schedule needs more than 5e7 samples per trial");
  }

  const auto exp = cover_growth_experiment(variant == "simple" ? CoverVariant::simple : CoverVariant::refined, c,
                                           theta, static_cast<int>(l), static_cast<int>(levels), trials, opt);
  const GrowthSummary& s = exp.summary;
  json j;
  j["variant"] = variant;
  j["c"] = num(s.c);
  j["theta"] = num(s.theta);
  j["l"] = s.l;
  j["i_max"] = s.i_max;
  j["trials"] = s.trials;
  j["exponent"] = num(s.exponent);
  j["exponent_bound"] = num(s.exponent_bound);
  j["exponent_ok"] = s.exponent <= s.exponent_bound + 0.05;
  j["all_covered_ok"] = s.all_covered_ok;
  j["levels"] = json::array();
  for (const auto& lv : s.levels) {
    json e = {{"i", lv.i},
              {"n_i", lv.n_i},
              {"mean_N", num(lv.mean_N)},
              {"se_N", num(lv.se_N)},
              {"mean_Q", num(lv.mean_Q)},
              {"se_Q", num(lv.se_Q)},
              {"covered_ok", lv.covered_ok}};
    if (variant == "simple") {
      e["mean_ratio_next"] = num(lv.mean_ratio);
      e["se_ratio_next"] = num(lv.se_ratio);
      e["ratio_bound"] = num(lv.ratio_bound);
      e["ratio_ok"] = lv.ratio_ok;
    } else {
      e["predicted_N"] = num(lv.predicted_N);
      e["predicted_Q"] = num(lv.predicted_Q);
      e["matrix_ok"] = lv.matrix_ok;
    }
    j["levels"].push_back(e);
  }
  std::ostringstream os;
  write_trace_csv(os, exp.traces);
  return {{"trace.csv", os.str(), !as_json}, {"summary.json", dump(j), as_json}};
}

std::vector<Artifact> cmd_riesz(const json& cfg) {
  const double c = cfg.at("c").get<double>();
  const double theta = cfg.at("theta").get<double>();
  if (!(c > 0.0)) throw Error(ErrorCode::domain, "c must be > 0");
  if (!(theta > 1.0)) throw Error(ErrorCode::domain, "theta must be > 1");
  const auto l = cfg.at("l").get<std::int64_t>();
  const auto m = cfg.at("m").get<std::int64_t>();
  if (l < 0 || m < l || m > 40) throw Error(ErrorCode::invalid_configuration, "need 0 <= l <= m <= 40");
  const double s = cfg.at("s").get<double>();
  const auto trials = positive_int(cfg, "trials");
  const RunOptions opt = run_options(cfg);
  const bool as_json = want_json(cfg);
  const GeometricSchedule sched(theta);
  if (sched.n(static_cast<int>(m + 1)) > 50'000'000) {
    throw Error(ErrorCode::invalid_configuration, "schedule needs more than 5e7 samples per trial");
  }
  const RieszReport r = riesz_experiment(sched, c, static_cast<int>(l), static_cast<int>(m), s, trials, opt);
  json j = {{"c", num(r.c)},
            {"theta", num(r.theta)},
            {"l", r.l},
            {"m", r.m},
            {"s", num(r.s)},
            {"s_ctheta", num(r.s_ctheta)},
            {"trials", r.trials},
            {"mean_energy", num(r.mean_energy)},
            {"se_energy", num(r.se_energy)},
            {"mean_measure", num(r.mean_measure)},
            {"mean_measure_sq", num(r.mean_measure_sq)},
            {"k_lm", num(r.k_lm)},
            {"c_l", num(r.c_l)},
            {"j_s", num(r.j_s)},
            {"j_s_total", num(r.j_s_total)},
            {"offdiag_bound", num(r.offdiag_bound)},
            {"full_bound", num(r.full_bound)},
            {"ratio", num(r.ratio)},
            {"within_order", r.within_order},
            {"violation_4sigma", r.violation_4sigma}};
  std::ostringstream os;
  os << "trial,energy\n";
  for (std::size_t t = 0; t < r.energies.size(); ++t) os << t << ',' << format_real(r.energies[t]) << '\n';
  return {{"riesz.json", dump(j), as_json}, {"energies.csv", os.str(), !as_json}};
}

std::vector<Artifact> cmd_frostman(const json& cfg) {
  const double s = cfg.at("s").get<double>();
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::invalid_exponent, "--s must lie in (0, 1)");
  const auto supports = positive_int(cfg, "supports");
  const auto arcs = positive_int(cfg, "support-arcs");
  const auto probes = positive_int(cfg, "probes");
  const double max_r = cfg.at("max-radius").get<double>();
  if (!(max_r > 0.0)) throw Error(ErrorCode::invalid_configuration, "--max-radius must be > 0");
  const RunOptions opt = run_options(cfg);
  const bool as_json = want_json(cfg);

  const auto reports = run_trials(supports, opt.threads, [&](std::int64_t t) {
    PhiloxEngine rng(opt.master_seed, static_cast<std::uint64_t>(t));
    const ArcSet support = random_support(rng, static_cast<int>(arcs), max_r);
    return frostman_check(support, s, static_cast<int>(probes), rng);
  });

  json j = {{"s", num(s)}, {"supports", supports}, {"probes_per_support", probes}};
  std::int64_t violations = 0;
  bool jensen = true;
  double max_excess = -std::numeric_limits<double>::infinity();
  json per = json::array();
  std::ostringstream os;
  os << "support,probe,start,length,mass,bound,violated\n";
  for (std::size_t t = 0; t < reports.size(); ++t) {
    const auto& r = reports[t];
    violations += r.violations;
    jensen = jensen && r.jensen_ok;
    max_excess = std::max(max_excess, r.max_excess);
    per.push_back({{"support_measure", num(r.support_measure)},
                   {"energy_normalized", num(r.energy_normalized)},
                   {"total_mass", num(r.total_mass)},
                   {"jensen_bound", num(r.jensen_bound)},
                   {"jensen_ok", r.jensen_ok},
                   {"violations", r.violations},
                   {"max_excess", num(r.max_excess)}});
    for (std::size_t p = 0; p < r.probes.size(); ++p) {
      const auto& pr = r.probes[p];
      os << t << ',' << p << ',' << format_real(pr.start) << ',' << format_real(pr.length) << ','
         << format_real(pr.mass) << ',' << format_real(pr.bound) << ',' << (pr.violated ? 1 : 0) << '\n';
    }
  }
  j["violations"] = violations;
  j["max_excess"] = num(max_excess);
  j["jensen_all_ok"] = jensen;
  j["per_support"] = per;
  return {{"frostman.json", dump(j), as_json}, {"probes.csv", os.str(), !as_json}};
}

// ---------------------------------------------------------------- registry

std::vector<Command> commands() {
  std::vector<Command> cmds;
  auto add = [&](std::string path, std::string help, std::vector<OptSpec> opts, std::string fmt, Handler h) {
    auto common = common_opts(fmt);
    opts.insert(opts.end(), common.begin(), common.end());
    cmds.push_back({std::move(path), std::move(help), std::move(opts), std::move(h)});
  };
  add("bounds", "Dimension bounds for r_n = c/n, at one c or along a c grid",
      {{"c", Kind::real, nullptr, "Radius constant c"},
       {"theta", Kind::real, nullptr, "Evaluate at this theta instead of optimizing"},
       {"kind", Kind::text, "all", "all, lower, upper-weak or upper-matrix"},
       {"c-grid", Kind::text, nullptr, "start:stop:step; emits the bound-curve table"}},
      "", cmd_bounds);
  add("conditions", "Covering / measure / countability verdicts for a radius family",
      {{"family", Kind::text, nullptr, "Family spec, e.g. logn:c=3"},
       {"N", Kind::text, "1000,10000,100000,1000000", "Partial-sum cutoffs"}},
      "json", cmd_conditions);
  const std::vector<OptSpec> checkpoint_opts = {
      {"checkpoints", Kind::text, nullptr, "Explicit comma-separated checkpoints (overrides --n/--factor)"},
      {"factor", Kind::real, 2.0, "Geometric checkpoint factor"}};
  auto with = [](std::vector<OptSpec> a, const std::vector<OptSpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  add("simulate coverage", "Frequency of T not covered by E_n, with Shepp's bounds",
      with({{"family", Kind::text, nullptr, "Family spec"},
            {"n", Kind::integer, 1000, "Largest n"},
            {"n-start", Kind::integer, 16, "First checkpoint"},
            {"trials", Kind::integer, 200, "Number of trials"}},
           checkpoint_opts),
      "csv", cmd_coverage);
  add("simulate measure", "Measure of the finite approximations of the uniform covering set",
      with({{"family", Kind::text, nullptr, "Family spec"},
            {"p", Kind::integer, 16, "First index of the intersection"},
            {"n", Kind::integer, 4096, "Largest N"},
            {"trials", Kind::integer, 100, "Number of trials"}},
           checkpoint_opts),
      "csv", cmd_measure);
  add("simulate countable", "Collapse of the covering set onto omega_1..omega_p",
      with({{"family", Kind::text, "pow:c=1,alpha=3", "Family spec"},
            {"p", Kind::integer, 20, "First index of the intersection"},
            {"n", Kind::integer, 10000, "Largest N"},
            {"trials", Kind::integer, 200, "Number of trials"}},
           checkpoint_opts),
      "csv", cmd_countable);
  add("cover-growth", "Greedy cover growth along n_j = theta^j",
      {{"variant", Kind::text, "refined", "simple or refined"},
       {"c", Kind::real, 0.2, "Radius constant c"},
       {"theta", Kind::real, 2.0, "Schedule ratio"},
       {"l", Kind::integer, 3, "Base level"},
       {"levels", Kind::integer, 10, "Number of levels after the base"},
       {"trials", Kind::integer, 500, "Number of trials"}},
      "csv", cmd_cover_growth);
  add("riesz", "Riesz energy of mu_{l,m} against its expectation bound",
      {{"c", Kind::real, 2.0, "Radius constant c"},
       {"theta", Kind::real, 2.0, "Schedule ratio"},
       {"l", Kind::integer, 2, "First block"},
       {"m", Kind::integer, 6, "Last block"},
       {"s", Kind::real, 0.2, "Energy exponent"},
       {"trials", Kind::integer, 200, "Number of trials"}},
      "json", cmd_riesz);
  add("frostman", "Frostman-transform mass bound on random supports",
      {{"s", Kind::real, 0.4, "Exponent"},
       {"supports", Kind::integer, 1, "Number of random supports"},
       {"support-arcs", Kind::integer, 20, "Balls per support"},
       {"max-radius", Kind::real, 0.05, "Largest ball radius"},
       {"probes", Kind::integer, 100, "Probe arcs per support"}},
      "json", cmd_frostman);
  return cmds;
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::invalid_configuration, "cannot write " + p.string());
  f << content;
  if (!f) throw Error(ErrorCode::invalid_configuration, "cannot write " + p.string());
}

void emit_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << json{{"error", std::string(code)}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uniform random covering of the circle: bounds, simulations, estimators", "ucover"};
  app.require_subcommand(1);
  app.set_version_flag("--version", UCOVER_VERSION);

  const std::vector<Command> cmds = commands();
  struct Leaf {
    const Command* cmd;
    CLI::App* app;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> opts;
    std::string config_path;
    bool dump_config = false;
  };
  std::vector<std::unique_ptr<Leaf>> leaves;
  std::map<std::string, CLI::App*> groups;

  for (const Command& cmd : cmds) {
    auto leaf = std::make_unique<Leaf>();
    leaf->cmd = &cmd;
    const auto space = cmd.path.find(' ');
    if (space == std::string::npos) {
      leaf->app = app.add_subcommand(cmd.path, cmd.help);
    } else {
      const std::string group = cmd.path.substr(0, space);
      auto& g = groups[group];
      if (!g) {
        g = app.add_subcommand(group, "Monte Carlo experiments");
        g->require_subcommand(1);
      }
      leaf->app = g->add_subcommand(cmd.path.substr(space + 1), cmd.help);
    }
    for (const OptSpec& o : cmd.opts) {
      if (o.kind == Kind::flag) {
        leaf->opts[o.name] = leaf->app->add_flag("--" + o.name, o.help);
      } else {
        leaf->opts[o.name] = leaf->app->add_option("--" + o.name, leaf->raw[o.name], o.help);
      }
    }
    leaf->app->add_option("--config", leaf->config_path, "Flat JSON file with option values");
    leaf->app->add_flag("--dump-config", leaf->dump_config, "Print the resolved configuration and exit");
    leaves.push_back(std::move(leaf));
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << UCOVER_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what());
    return 2;
  }

  const Leaf* leaf = nullptr;
  for (const auto& l : leaves) {
    if (l->app->parsed()) leaf = l.get();
  }
  if (!leaf) {
    emit_error(err, "usage", "no command given");
    return 2;
  }

  try {
    json file = json::object();
    if (!leaf->config_path.empty()) {
      std::ifstream in(leaf->config_path);
      if (!in) throw Error(ErrorCode::parse, "cannot read config file " + leaf->config_path);
      try {
        file = json::parse(in);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::parse, std::string("config file is not valid JSON: ") + e.what());
      }
      if (!file.is_object()) throw Error(ErrorCode::parse, "config file must hold a flat JSON object");
      for (const auto& [key, value] : file.items()) {
        const bool known = std::any_of(leaf->cmd->opts.begin(), leaf->cmd->opts.end(),
                                       [&](const OptSpec& o) { return o.name == key; });
        if (!known) throw Error(ErrorCode::parse, "unknown config key '" + key + "'");
      }
    }

    json cfg = json::object();
    for (const OptSpec& o : leaf->cmd->opts) {
      if (leaf->opts.at(o.name)->count() > 0) {
        cfg[o.name] = convert_text(o, o.kind == Kind::flag ? std::string() : leaf->raw.at(o.name));
      } else if (file.contains(o.name)) {
        cfg[o.name] = convert_json(o, file[o.name]);
      } else {
        cfg[o.name] = o.def;
      }
    }

    if (leaf->dump_config) {
      out << dump(cfg);
      return 0;
    }

    const std::vector<Artifact> artifacts = leaf->cmd->run(cfg);
    const std::string out_dir = get_text(cfg, "out-dir");
    if (out_dir.empty()) {
      for (const Artifact& a : artifacts) {
        if (a.primary) out << a.content;
      }
      return 0;
    }

    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::invalid_configuration, "cannot create " + out_dir + ": " + ec.message());
    json meta = {{"tool", "ucover"},
                 {"version", UCOVER_VERSION},
                 {"command", leaf->cmd->path},
                 {"rng", "philox4x64-10"},
                 {"config", cfg},
                 {"artifacts", json::array()}};
    for (const Artifact& a : artifacts) meta["artifacts"].push_back(a.file);
    if (cfg.at("timestamp").get<bool>()) meta["timestamp"] = iso_timestamp();
    for (const Artifact& a : artifacts) write_file(dir / a.file, a.content);
    write_file(dir / "meta.json", dump(meta));
    return 0;
  } catch (const Error& e) {
    emit_error(err, to_string(e.code()), e.what());
    return e.code() == ErrorCode::parse ? 2 : 1;
  } catch (const std::exception& e) {
    emit_error(err, "internal", e.what());
    return 1;
  }
}

}  // namespace ucover
