#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ucover/bounds.hpp"
#include "ucover/cli.hpp"
#include "ucover/errors.hpp"
#include "ucover/estimators.hpp"
#include "ucover/radius.hpp"
#include "ucover/simulator.hpp"
#include "ucover/torus.hpp"

namespace py = pybind11;
using namespace ucover;

namespace {

RunOptions options(std::uint64_t seed, unsigned threads) { return {seed, threads}; }

py::dict point_dict(const BoundPoint& p) {
  py::dict d;
  d["kind"] = std::string(to_string(p.kind));
  d["c"] = p.c;
  d["theta"] = p.theta;
  d["value"] = p.value;
  d["valid"] = p.valid;
  d["clamped"] = p.clamped;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ucover, m) {
  m.doc() = "Random covering of the circle: arc sets, bounds, simulations";
  m.attr("__version__") = UCOVER_VERSION;
  m.attr("DEFAULT_SEED") = kDefaultSeed;

  static py::exception<Error> error(m, "UcoverError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object code = py::str(std::string(to_string(e.code())));
      PyErr_SetObject(error.ptr(), py::make_tuple(code, py::str(e.what())).ptr());
    }
  });

  py::class_<ArcSet>(m, "ArcSet")
      .def(py::init<>())
      .def_static("full", &ArcSet::full)
      .def_static("from_arcs",
                  [](const std::vector<std::pair<double, double>>& arcs) {
                    std::vector<Arc> v;
                    for (auto [s, l] : arcs) v.push_back({s, l});
                    return ArcSet::from_arcs(std::move(v));
                  },
                  py::arg("arcs"), "List of (start, length) pairs.")
      .def_static("from_interval", &ArcSet::from_interval)
      .def_property_readonly("arcs",
                             [](const ArcSet& a) {
                               std::vector<std::pair<double, double>> out;
                               for (const Arc& arc : a.arcs()) out.emplace_back(arc.start, arc.length);
                               return out;
                             })
      .def("__len__", &ArcSet::size)
      .def("__contains__", [](const ArcSet& a, double x) { return contains(a, x); })
      .def("__or__", &unite)
      .def("__and__", &intersect)
      .def("__invert__", &complement)
      .def("__eq__", [](const ArcSet& a, const ArcSet& b) { return a == b; })
      .def_property_readonly("measure", [](const ArcSet& a) { return measure(a); })
      .def_property_readonly("is_full", &ArcSet::is_full)
      .def("__repr__", [](const ArcSet& a) {
        std::ostringstream os;
        os << "ArcSet(" << a.size() << " arcs, measure " << measure(a) << ")";
        return os.str();
      });

  m.def("ball", &ball, py::arg("center"), py::arg("r"));
  m.def("dist", &dist);
  m.def("thicken", &thicken);
  m.def("box_count", &box_count);
  m.def("riesz_energy", &riesz_energy, py::arg("a"), py::arg("s"));
  m.def("riesz_potential", &riesz_potential, py::arg("a"), py::arg("s"), py::arg("x"));

  py::class_<RadiusFamily>(m, "RadiusFamily")
      .def_static("parse", [](const std::string& text) { return parse_family(text); })
      .def("__call__", [](const RadiusFamily& f, std::int64_t n) { return f(n); })
      .def_property_readonly("n_min", &RadiusFamily::n_min)
      .def("__str__", &RadiusFamily::to_string);

  m.def(
      "classify",
      [](const RadiusFamily& f) {
        const RegimeVerdict v = classify(f);
        py::dict d;
        d["covers_T"] = std::string(to_string(v.covers_T));
        d["full_measure"] = std::string(to_string(v.full_measure));
        d["countable"] = std::string(to_string(v.countable));
        d["notes"] = v.notes;
        return d;
      },
      py::arg("family"));

  m.def("theta_delta", [](double c, double theta) {
    const auto td = theta_delta(c, theta);
    return py::make_tuple(td.big_theta, td.delta);
  });
  m.def("lambda_", &lambda, py::arg("c"), py::arg("theta"));
  m.def("s_exponent", &s_exponent, py::arg("c"), py::arg("theta"));
  m.def("c_star", &c_star, py::arg("theta"));
  m.def("upper_bound_weak", [](double c, double t) { return point_dict(upper_bound_weak(c, t)); });
  m.def("upper_bound_matrix", [](double c, double t) { return point_dict(upper_bound_matrix(c, t)); });
  m.def("lower_bound", [](double c, double t) { return point_dict(lower_bound(c, t)); });
  m.def("optimize_upper_weak", [](double c) { return point_dict(optimize_upper_weak(c)); });
  m.def("optimize_upper_matrix", [](double c) { return point_dict(optimize_upper_matrix(c)); });
  m.def("optimize_lower", [](double c) { return point_dict(optimize_lower(c)); });
  m.def(
      "k_lm",
      [](double theta, const RadiusFamily& f, int l, int m) { return k_lm(GeometricSchedule(theta), f, l, m); },
      py::arg("theta"), py::arg("family"), py::arg("l"), py::arg("m"));

  m.def(
      "sample_path",
      [](std::uint64_t seed, std::uint64_t trial, std::int64_t N) {
        const SamplePath p(seed, trial, N);
        return std::vector<double>(p.points().begin(), p.points().end());
      },
      py::arg("seed"), py::arg("trial"), py::arg("N"));

  m.def(
      "coverage_experiment",
      [](const RadiusFamily& f, const std::vector<std::int64_t>& checkpoints, std::int64_t trials, std::uint64_t seed,
         unsigned threads) {
        std::vector<CoverageRow> result;
        {
          py::gil_scoped_release release;
          result = coverage_experiment(f, checkpoints, trials, options(seed, threads));
        }
        py::list rows;
        for (const auto& r : result) {
          py::dict d;
          d["n"] = r.n;
          d["not_covered"] = r.not_covered;
          d["frequency"] = r.frequency;
          d["shepp_lower"] = r.shepp_lower;
          d["shepp_upper"] = r.shepp_upper;
          d["shepp_lower_2r"] = r.shepp_lower_2r;
          d["shepp_upper_2r"] = r.shepp_upper_2r;
          rows.append(d);
        }
        return rows;
      },
      py::arg("family"), py::arg("checkpoints"), py::arg("trials"), py::arg("seed") = kDefaultSeed,
      py::arg("threads") = 1);

  m.def(
      "cover_growth",
      [](const std::string& variant, double c, double theta, int l, int levels, std::int64_t trials,
         std::uint64_t seed, unsigned threads) {
        if (variant != "simple" && variant != "refined") {
          throw Error(ErrorCode::parse, "variant must be simple or refined, got '" + variant + "'");
        }
        const CoverVariant v = variant == "simple" ? CoverVariant::simple : CoverVariant::refined;
        GrowthSummary s;
        {
          py::gil_scoped_release release;
          s = cover_growth_experiment(v, c, theta, l, levels, trials, options(seed, threads)).summary;
        }
        py::dict d;
        d["exponent"] = s.exponent;
        d["exponent_bound"] = s.exponent_bound;
        d["all_covered_ok"] = s.all_covered_ok;
        std::vector<double> mean_N;
        for (const auto& lv : s.levels) mean_N.push_back(lv.mean_N);
        d["mean_N"] = mean_N;
        return d;
      },
      py::arg("variant") = "refined", py::arg("c") = 0.2, py::arg("theta") = 2.0, py::arg("l") = 3,
      py::arg("levels") = 10, py::arg("trials") = 100, py::arg("seed") = kDefaultSeed, py::arg("threads") = 1);

  m.def(
      "riesz_experiment",
      [](double c, double theta, int l, int mm, double s, std::int64_t trials, std::uint64_t seed) {
        RieszReport r;
        {
          py::gil_scoped_release release;
          r = riesz_experiment(GeometricSchedule(theta), c, l, mm, s, trials, options(seed, 1));
        }
        py::dict d;
        d["mean_energy"] = r.mean_energy;
        d["se_energy"] = r.se_energy;
        d["offdiag_bound"] = r.offdiag_bound;
        d["full_bound"] = r.full_bound;
        d["within_order"] = r.within_order;
        return d;
      },
      py::arg("c") = 2.0, py::arg("theta") = 2.0, py::arg("l") = 2, py::arg("m") = 6, py::arg("s") = 0.2,
      py::arg("trials") = 200, py::arg("seed") = kDefaultSeed);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
