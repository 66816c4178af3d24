#include <sstream>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "teleqcp/chain_models.hpp"
#include "teleqcp/correlators.hpp"
#include "teleqcp/error.hpp"
#include "teleqcp/qcp_detect.hpp"
#include "teleqcp/sweep_csv.hpp"
#include "teleqcp/teleport.hpp"

namespace py = pybind11;
using namespace teleqcp;

namespace {

ModelSpec make_model(const std::string& model, double a, double b) {
  if (model == "xxz") return XxzModel{a, b};
  if (model == "xy") return XyModel{a, b};
  throw Error(ErrorCode::InvalidArgument, "model must be 'xxz' or 'xy'");
}

SweepParameter parse_parameter(const std::string& name) {
  if (name == "delta") return SweepParameter::Delta;
  if (name == "lambda") return SweepParameter::Lambda;
  if (name == "gamma") return SweepParameter::Gamma;
  throw Error(ErrorCode::InvalidArgument, "parameter must be delta, lambda or gamma");
}

XySignConvention parse_convention(const std::string& name) {
  if (name == "sin-minus") return XySignConvention::SinMinus;
  if (name == "sin-plus") return XySignConvention::SinPlus;
  throw Error(ErrorCode::InvalidArgument, "convention must be sin-minus or sin-plus");
}

py::dict report(const FidelityReport& r) {
  py::dict d;
  d["value"] = r.value;
  d["set"] = std::string(to_string(r.argmax_set));
  d["branch"] = std::string(to_string(r.branch));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Teleportation fidelity detectors for spin-chain critical points";
  py::register_exception<Error>(m, "TeleqcpError", PyExc_RuntimeError);

  py::class_<CorrelatorSet>(m, "Correlators")
      .def(py::init([](double z, double xx, double yy, double zz) {
             CorrelatorSet c;
             c.z = z;
             c.xx = xx;
             c.yy = yy;
             c.zz = zz;
             return c;
           }),
           py::arg("z"), py::arg("xx"), py::arg("yy"), py::arg("zz"))
      .def_readonly("z", &CorrelatorSet::z)
      .def_readonly("xx", &CorrelatorSet::xx)
      .def_readonly("yy", &CorrelatorSet::yy)
      .def_readonly("zz", &CorrelatorSet::zz)
      .def_readonly("kT", &CorrelatorSet::kT)
      .def_readonly("ground_multiplicity", &CorrelatorSet::ground_multiplicity)
      .def("__repr__", [](const CorrelatorSet& c) {
        std::ostringstream s;
        s << "Correlators(z=" << c.z << ", xx=" << c.xx << ", yy=" << c.yy << ", zz=" << c.zz << ")";
        return s.str();
      });

  m.def("xxz_delta1", &xxz_delta1, py::arg("h"));
  m.def("xxz_delta2", &xxz_delta2, py::arg("h"), py::arg("tol") = 1e-6);

  m.def(
      "xy_correlators",
      [](double lambda, double gamma, double kT, const std::string& convention) {
        XyIntegralOptions options;
        options.convention = parse_convention(convention);
        return xy_correlators_tl(lambda, gamma, kT, options);
      },
      py::arg("lam"), py::arg("gamma"), py::arg("kT"), py::arg("convention") = "sin-minus");

  m.def(
      "ed_correlators",
      [](const std::string& model, double a, double b, int sites, double kT) {
        py::gil_scoped_release release;
        return ed_thermal_correlators(make_model(model, a, b), sites, kT);
      },
      py::arg("model"), py::arg("a"), py::arg("b"), py::arg("sites"), py::arg("kT"),
      "a, b are (delta, h) for xxz and (lambda, gamma) for xy");

  m.def("max_mean_fidelity", [](const CorrelatorSet& c) { return report(max_mean_fidelity(c)); });
  m.def("max_avg_fidelity", [](const CorrelatorSet& c) { return report(max_avg_fidelity(c)); });

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("grid", &SweepResult::grid)
      .def_property_readonly("parameter", [](const SweepResult& r) { return std::string(to_string(r.parameter)); })
      .def_property_readonly("kts",
                             [](const SweepResult& r) {
                               std::vector<double> kts;
                               for (const auto& s : r.series) kts.push_back(s.kT);
                               return kts;
                             })
      .def("column",
           [](const SweepResult& r, std::size_t series, const std::string& name) {
             if (series >= r.series.size()) throw py::index_error("series index out of range");
             std::vector<double> out;
             for (const auto& p : r.series[series].points) {
               if (name == "z") out.push_back(p.correlators.z);
               else if (name == "xx") out.push_back(p.correlators.xx);
               else if (name == "yy") out.push_back(p.correlators.yy);
               else if (name == "zz") out.push_back(p.correlators.zz);
               else if (name == "fmax") out.push_back(p.fmax.value);
               else if (name == "favg") out.push_back(p.favg.value);
               else throw py::key_error(name);
             }
             return out;
           },
           py::arg("series"), py::arg("name"))
      .def("to_csv", [](const SweepResult& r) {
        std::ostringstream s;
        write_sweep_csv(r, s);
        return s.str();
      });

  m.def(
      "sweep",
      [](const std::string& model, const std::string& parameter, double a, double b, double lo, double hi,
         double step, const std::vector<double>& kts, const std::string& backend, int sites, int workers) {
        SweepRequest r;
        r.base = make_model(model, a, b);
        r.parameter = parse_parameter(parameter);
        r.lo = lo;
        r.hi = hi;
        r.step = step;
        r.kts = kts;
        if (backend == "ed") r.backend = BackendSpec::exact_diagonalization(sites);
        else if (backend == "xy-integral") r.backend = BackendSpec::xy_integral();
        else throw Error(ErrorCode::InvalidArgument, "backend must be ed or xy-integral");
        r.workers = workers;
        py::gil_scoped_release release;
        return sweep(r);
      },
      py::arg("model"), py::arg("parameter"), py::arg("a"), py::arg("b"), py::arg("lo"), py::arg("hi"),
      py::arg("step"), py::arg("kts"), py::arg("backend") = "xy-integral", py::arg("sites") = 12,
      py::arg("workers") = 0, "a, b fix the model as in ed_correlators; the swept one is ignored");

  m.def(
      "estimate_qcp",
      [](const SweepResult& result, double window_lo, double window_hi, int order, const std::string& fit,
         const std::string& quantity, double kt_max) {
        EstimateOptions o;
        o.window_lo = window_lo;
        o.window_hi = window_hi;
        o.order = order;
        if (fit != "linear" && fit != "quadratic") throw Error(ErrorCode::InvalidArgument, "fit must be linear or quadratic");
        if (quantity != "fmax" && quantity != "favg") throw Error(ErrorCode::InvalidArgument, "quantity must be fmax or favg");
        o.fit = fit == "quadratic" ? FitKind::Quadratic : FitKind::Linear;
        o.quantity = quantity == "favg" ? Detector::Favg : Detector::Fmax;
        o.kt_max = kt_max;
        const QcpEstimate e = estimate_qcp(result, o);
        py::dict d;
        d["value"] = e.value;
        d["stderr"] = e.intercept_stderr;
        d["r_squared"] = e.fit.r_squared;
        std::vector<std::pair<double, double>> locations;
        for (const auto& [kT, x] : e.extrema) locations.emplace_back(kT, x.location);
        d["locations"] = locations;
        return d;
      },
      py::arg("result"), py::arg("window_lo"), py::arg("window_hi"), py::arg("order") = 1,
      py::arg("fit") = "linear", py::arg("quantity") = "fmax", py::arg("kt_max") = 0.1);
}
