#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sphereflow/curvature.hpp"
#include "sphereflow/diagnostics.hpp"
#include "sphereflow/dual.hpp"
#include "sphereflow/errors.hpp"
#include "sphereflow/flow.hpp"
#include "sphereflow/hypersurface.hpp"

namespace py = pybind11;
using namespace sphereflow;

namespace {

CurvatureVector make_kappa(const std::vector<double>& k) {
  return CurvatureVector{std::span<const double>(k)};
}

FlowDirection parse_direction(const std::string& d) {
  if (d == "contracting") return FlowDirection::Contracting;
  if (d == "expanding") return FlowDirection::Expanding;
  throw std::invalid_argument(
      "direction must be \"contracting\" or \"expanding\"");
}

StopRule make_stop(const std::pair<std::string, double>& stop) {
  const auto& [kind, value] = stop;
  if (kind == "min_radius_below") return StopRule::min_radius_below(value);
  if (kind == "max_radius_above") return StopRule::max_radius_above(value);
  if (kind == "time_reached") return StopRule::time_reached(value);
  if (kind == "pinch_ratio_above") return StopRule::pinch_ratio_above(value);
  throw std::invalid_argument("unknown stop rule kind: " + kind);
}

py::dict trajectory_dict(const Trajectory& traj) {
  py::dict d;
  d["snapshots"] = traj.snapshots;
  d["tstar_lo"] = traj.tstar_lo;
  d["tstar_hi"] = traj.tstar_hi;
  d["tstar_est"] = traj.tstar_est;
  d["steps"] = traj.accepted_dt.size();
  return d;
}

py::dict record_dict(const DiagnosticsRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["tau"] = r.tau;
  d["theta"] = r.theta;
  d["u_min"] = r.u_min;
  d["u_max"] = r.u_max;
  d["pinch_ratio"] = r.pinch_ratio;
  d["tracefree"] = r.tracefree;
  d["f_sigma"] = r.f_sigma;
  d["Ftilde_min"] = r.Ftilde_min;
  d["Ftilde_max"] = r.Ftilde_max;
  d["u_rescaled_dev"] = r.u_rescaled_dev;
  d["w_min"] = r.w_min;
  d["w_max"] = r.w_max;
  d["rho_minus"] = r.rho_minus;
  d["rho_plus"] = r.rho_plus;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "contracting and expanding curvature flows of convex "
            "axisymmetric hypersurfaces in the round sphere";

  py::register_exception<ConvexityLoss>(m, "ConvexityLoss");
  py::register_exception<HemisphereExit>(m, "HemisphereExit");
  py::register_exception<IntegratorFailure>(m, "IntegratorFailure");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<AxiGrid>(m, "AxiGrid")
      .def(py::init<int, int>(), py::arg("n"), py::arg("N"))
      .def_readonly("n", &AxiGrid::n)
      .def_readonly("N", &AxiGrid::N)
      .def_readonly("h", &AxiGrid::h)
      .def("theta", &AxiGrid::theta, py::arg("j"));

  py::class_<GraphFunction>(m, "GraphFunction")
      .def(py::init<const AxiGrid&, std::vector<double>, std::string>(),
           py::arg("grid"), py::arg("u"), py::arg("center") = "x0")
      .def_property_readonly("grid", &GraphFunction::grid)
      .def_property_readonly("u", &GraphFunction::u)
      .def_property_readonly("center", &GraphFunction::center)
      .def("u_min", &GraphFunction::u_min)
      .def("u_max", &GraphFunction::u_max);

  m.def("sphere", &sphere, py::arg("grid"), py::arg("r"));
  m.def("perturbed_sphere", &perturbed_sphere, py::arg("grid"), py::arg("r"),
        py::arg("amp"), py::arg("mode"));
  m.def("write_graph_file", &write_graph_file, py::arg("g"), py::arg("path"));
  m.def("read_graph_file", &read_graph_file, py::arg("path"));

  py::class_<FunctionSpec>(m, "FunctionSpec")
      .def_static("mean", &FunctionSpec::mean)
      .def_static("sigma", &FunctionSpec::sigma, py::arg("k"))
      .def_static("quotient", &FunctionSpec::quotient, py::arg("k"))
      .def_static("inverse", &FunctionSpec::inverse, py::arg("inner"))
      .def_property_readonly("name", &FunctionSpec::name)
      .def("__repr__",
           [](const FunctionSpec& s) { return "FunctionSpec(" + s.name() + ")"; });

  m.def(
      "evaluate",
      [](const FunctionSpec& spec, const std::vector<double>& kappa) {
        EvalResult r = evaluate(spec, make_kappa(kappa));
        py::dict d;
        d["value"] = r.value;
        d["gradient"] = r.gradient;
        d["hessian"] = r.hessian;  // row-major, len(kappa)^2
        return d;
      },
      py::arg("spec"), py::arg("kappa"));

  m.def(
      "check_strict_concavity",
      [](const FunctionSpec& spec, const std::vector<double>& kappa,
         double tol) {
        ConcavityVerdict v = check_strict_concavity(spec, make_kappa(kappa), tol);
        py::dict d;
        d["eigenvalues"] = v.eigenvalues;
        d["null_multiplicity"] = v.null_multiplicity;
        d["strict"] = v.is_strictly_concave_at_point;
        return d;
      },
      py::arg("spec"), py::arg("kappa"), py::arg("tol") = 1e-8);

  m.def(
      "esym_concavity_residual",
      [](const std::vector<double>& kappa, int k, const std::vector<double>& xi) {
        return esym_concavity_residual(make_kappa(kappa), k,
                              std::span<const double>(xi));
      },
      py::arg("kappa"), py::arg("k"), py::arg("xi"));

  m.def(
      "check_classK_bound",
      [](const FunctionSpec& spec, const std::vector<double>& kappa) {
        return check_classK_bound(spec, make_kappa(kappa));
      },
      py::arg("spec"), py::arg("kappa"));

  m.def(
      "tracefree_identity",
      [](const std::vector<double>& kappa) {
        return tracefree_identity(make_kappa(kappa));
      },
      py::arg("kappa"));

  py::class_<DualPair>(m, "DualPair")
      .def_readonly("primal", &DualPair::primal)
      .def_readonly("dual", &DualPair::dual)
      .def_readonly("theta_star", &DualPair::theta_star);

  m.def("polar_dual", &polar_dual, py::arg("g"));
  m.def("check_dual_curvatures", &check_dual_curvatures, py::arg("pair"),
        py::arg("spec"));
  m.def("support_bracket", &support_bracket, py::arg("pair"));

  m.def(
      "run",
      [](const FunctionSpec& curvature, const GraphFunction& g0,
         const std::string& direction,
         const std::pair<std::string, double>& stop, double cfl, int stride) {
        FlowSpec spec{parse_direction(direction), curvature, cfl, stride,
                      make_stop(stop)};
        return trajectory_dict(run(spec, g0));
      },
      py::arg("curvature"), py::arg("g0"), py::arg("direction"),
      py::arg("stop"), py::arg("cfl") = 0.2, py::arg("stride") = 100);

  m.def(
      "dual_run",
      [](const FunctionSpec& curvature, const GraphFunction& g0,
         const std::pair<std::string, double>& stop, double cfl, int stride) {
        DualRunReport rep = dual_run(curvature, g0, make_stop(stop), cfl, stride);
        py::dict d;
        d["times"] = rep.times;
        d["distance"] = rep.distance;
        d["max_distance"] = rep.max_distance;
        d["tstar_est"] = rep.contracting.tstar_est;
        d["contracting"] = trajectory_dict(rep.contracting);
        d["expanding"] = trajectory_dict(rep.expanding);
        return d;
      },
      py::arg("curvature"), py::arg("g0"), py::arg("stop"),
      py::arg("cfl") = 0.2, py::arg("stride") = 100);

  m.def(
      "snapshot_diagnostics",
      [](const GraphFunction& g, const FunctionSpec& spec, double t,
         double tstar, const std::string& direction,
         const std::vector<double>& sigmas) {
        return record_dict(snapshot_diagnostics(g, spec, t, tstar,
                                                parse_direction(direction),
                                                sigmas));
      },
      py::arg("g"), py::arg("spec"), py::arg("t"), py::arg("tstar"),
      py::arg("direction"), py::arg("sigmas") = std::vector<double>{0.0, 0.1});

  m.def(
      "shape_operator",
      [](const GraphFunction& g, const FunctionSpec& spec) {
        GeometryFields f = shape_operator(g, spec);
        py::dict d;
        d["kappa_profile"] = f.kappa_profile;
        d["kappa_orbit"] = f.kappa_orbit;
        d["H"] = f.H;
        d["normA2"] = f.normA2;
        d["F"] = f.F;
        d["v"] = f.v;
        return d;
      },
      py::arg("g"), py::arg("spec"));

  m.def("spherical_theta", &spherical_theta, py::arg("t"), py::arg("tstar"));
  m.def("spherical_tstar", &spherical_tstar, py::arg("r0"));
  m.def("radii_estimates", &radii_estimates, py::arg("g"));
}
