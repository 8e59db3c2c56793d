#include "sphereflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "sphereflow/dual.hpp"
#include "sphereflow/errors.hpp"

namespace sphereflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDtFloor = 1e-12;
constexpr double kDtCeil = 1e-2;
constexpr long kMaxSteps = 5'000'000;

FunctionSpec speed_spec(const FlowSpec& spec) {
  return spec.direction == FlowDirection::Contracting
             ? spec.curvature
             : FunctionSpec::inverse(spec.curvature);
}

std::vector<double> rhs_from_fields(const GraphFunction& g,
                                    const GeometryFields& geo,
                                    FlowDirection dir) {
  std::vector<double> out(g.u().size());
  if (dir == FlowDirection::Contracting) {
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = -geo.F[j] * geo.v[j];
  } else {
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = geo.v[j] / geo.F[j];
  }
  return out;
}

double pinch_ratio(const GeometryFields& geo) {
  double lo = geo.kappa_profile[0], hi = geo.kappa_profile[0];
  for (std::size_t j = 0; j < geo.kappa_profile.size(); ++j) {
    lo = std::min({lo, geo.kappa_profile[j], geo.kappa_orbit[j]});
    hi = std::max({hi, geo.kappa_profile[j], geo.kappa_orbit[j]});
  }
  return hi / lo;
}

bool stop_fires(const StopRule& stop, const FlowState& s,
                const FunctionSpec& speed) {
  switch (stop.kind) {
    case StopRule::Kind::MinRadiusBelow:
      return s.g.u_min() < stop.value;
    case StopRule::Kind::MaxRadiusAbove:
      return s.g.u_max() > stop.value;
    case StopRule::Kind::TimeReached:
      return s.t >= stop.value;
    case StopRule::Kind::PinchRatioAbove:
      return pinch_ratio(shape_operator(s.g, speed)) > stop.value;
  }
  throw std::logic_error("unreachable stop kind");
}

void validate_flow_spec(const FlowSpec& spec) {
  if (!(spec.cfl > 0.0) || spec.cfl > 0.5)
    throw std::invalid_argument("cfl must lie in (0, 0.5]");
  if (spec.snapshot_stride < 1)
    throw std::invalid_argument("snapshot stride must be positive");
  if (spec.direction == FlowDirection::Contracting &&
      spec.stop.kind == StopRule::Kind::MaxRadiusAbove)
    throw std::invalid_argument("max-radius stop never fires while contracting");
  if (spec.direction == FlowDirection::Expanding &&
      spec.stop.kind == StopRule::Kind::MinRadiusBelow)
    throw std::invalid_argument("min-radius stop never fires while expanding");
}

}  // namespace

StopRule StopRule::min_radius_below(double v) {
  if (!(v > 0.0) || v >= kPi / 2.0)
    throw std::invalid_argument("min-radius threshold must lie in (0, pi/2)");
  return {Kind::MinRadiusBelow, v};
}

StopRule StopRule::max_radius_above(double v) {
  if (!(v > 0.0) || v >= kPi / 2.0)
    throw std::invalid_argument("max-radius threshold must lie in (0, pi/2)");
  return {Kind::MaxRadiusAbove, v};
}

StopRule StopRule::time_reached(double v) {
  if (!(v > 0.0)) throw std::invalid_argument("stop time must be positive");
  return {Kind::TimeReached, v};
}

StopRule StopRule::pinch_ratio_above(double v) {
  if (!(v > 1.0)) throw std::invalid_argument("pinch threshold must exceed 1");
  return {Kind::PinchRatioAbove, v};
}

std::vector<double> rhs_contracting(const GraphFunction& g,
                                    const FunctionSpec& spec) {
  return rhs_from_fields(g, shape_operator(g, spec), FlowDirection::Contracting);
}

std::vector<double> rhs_expanding(const GraphFunction& g,
                                  const FunctionSpec& speed) {
  return rhs_from_fields(g, shape_operator(g, speed), FlowDirection::Expanding);
}

StepResult step_rk4(const FlowState& s, const FlowSpec& spec, double dt) {
  const FunctionSpec fs = speed_spec(spec);
  const auto rhs = [&](const GraphFunction& g) {
    return rhs_from_fields(g, shape_operator(g, fs), spec.direction);
  };
  const auto advance = [&](const std::vector<double>& base,
                           const std::vector<double>& k, double c) {
    std::vector<double> u(base.size());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = base[j] + c * k[j];
    return GraphFunction(s.g.grid(), std::move(u), s.g.center());
  };

  try {
    const std::vector<double> k1 = rhs(s.g);
    const GraphFunction g2 = advance(s.g.u(), k1, 0.5 * dt);
    const std::vector<double> k2 = rhs(g2);
    const GraphFunction g3 = advance(s.g.u(), k2, 0.5 * dt);
    const std::vector<double> k3 = rhs(g3);
    const GraphFunction g4 = advance(s.g.u(), k3, dt);
    const std::vector<double> k4 = rhs(g4);

    std::vector<double> u(s.g.u().size());
    for (std::size_t j = 0; j < u.size(); ++j)
      u[j] = s.g.u()[j] +
             dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    GraphFunction gn(s.g.grid(), std::move(u), s.g.center());
    if (spec.direction == FlowDirection::Expanding && gn.u_max() >= kPi / 2.0)
      return {false, s, "hemisphere exit"};
    shape_operator(gn, fs);  // convexity audit of the accepted state
    return {true, FlowState{s.t + dt, std::move(gn), dt, s.step_count + 1}, ""};
  } catch (const ConvexityLoss& e) {
    return {false, s, std::string("convexity loss: ") + e.what()};
  } catch (const HemisphereExit& e) {
    return {false, s, std::string("hemisphere exit: ") + e.what()};
  } catch (const std::domain_error& e) {
    return {false, s, std::string("graph domain: ") + e.what()};
  } catch (const std::invalid_argument& e) {
    return {false, s, std::string("graph validity: ") + e.what()};
  }
}

double adaptive_dt(const FlowState& s, const FlowSpec& spec) {
  const FunctionSpec fs = speed_spec(spec);
  const GeometryFields geo = shape_operator(s.g, fs);
  const AxiGrid& grid = s.g.grid();
  double dt = kDtCeil;
  for (int j = 0; j <= grid.N; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    const double su = std::sin(s.g.u()[js]);
    double lambda = geo.lambda_F(j);
    if (spec.direction == FlowDirection::Expanding)
      lambda /= geo.F[js] * geo.F[js];  // gradient scale of the speed 1/F
    const double cap =
        spec.cfl * grid.h * grid.h * su * su / (lambda * geo.v[js]);
    dt = std::min(dt, cap);
  }
  return std::clamp(dt, kDtFloor, kDtCeil);
}

Trajectory run(const FlowSpec& spec, const GraphFunction& g0) {
  validate_flow_spec(spec);
  const FunctionSpec fs = speed_spec(spec);
  fs.validate_for_dimension(g0.grid().n);
  shape_operator(g0, fs);  // reject data outside the admissible cone up front

  Trajectory traj;
  FlowState s{0.0, g0, 0.0, 0};
  traj.snapshots.emplace_back(s.t, s.g);

  const double mono_slack = 1e-13;
  while (!stop_fires(spec.stop, s, fs)) {
    if (s.step_count >= kMaxSteps)
      throw IntegratorFailure("step budget exhausted before the stop rule fired");
    double dt = adaptive_dt(s, spec);
    StepResult res = step_rk4(s, spec, dt);
    while (!res.accepted) {
      dt *= 0.5;
      if (dt < kDtFloor)
        throw IntegratorFailure("time step underflow: " + res.reason);
      res = step_rk4(s, spec, dt);
    }
    if (spec.direction == FlowDirection::Contracting &&
        res.state.g.u_max() > s.g.u_max() + mono_slack)
      throw IntegratorFailure("outer radius grew during contraction");
    if (spec.direction == FlowDirection::Expanding &&
        res.state.g.u_min() < s.g.u_min() - mono_slack)
      throw IntegratorFailure("inner radius shrank during expansion");
    s = std::move(res.state);
    traj.accepted_dt.push_back(s.last_dt);
    if (s.step_count % spec.snapshot_stride == 0)
      traj.snapshots.emplace_back(s.t, s.g);
  }
  if (traj.snapshots.back().first != s.t) traj.snapshots.emplace_back(s.t, s.g);

  if (spec.direction == FlowDirection::Contracting) {
    traj.tstar_lo = s.t - std::log(std::cos(s.g.u_min()));
    traj.tstar_hi = s.t - std::log(std::cos(s.g.u_max()));
  } else {
    traj.tstar_lo = s.t - std::log(std::sin(s.g.u_max()));
    traj.tstar_hi = s.t - std::log(std::sin(s.g.u_min()));
  }
  traj.tstar_est = 0.5 * (traj.tstar_lo + traj.tstar_hi);
  return traj;
}

double spherical_theta(double t, double tstar) {
  if (!(t < tstar)) throw std::domain_error("time must precede the terminal time");
  return std::acos(std::exp(t - tstar));
}

double spherical_tstar(double r0) {
  if (!(r0 > 0.0) || !(r0 < kPi / 2.0))
    throw std::domain_error("initial radius must lie in (0, pi/2)");
  return -std::log(std::cos(r0));
}

DualRunReport dual_run(const FunctionSpec& curvature, const GraphFunction& g0,
                       const StopRule& stop, double cfl, int snapshot_stride) {
  FlowSpec cspec{FlowDirection::Contracting, curvature, cfl, snapshot_stride, stop};
  DualRunReport rep;
  rep.contracting = run(cspec, g0);

  const GraphFunction dual0 = polar_dual(g0).dual;
  FlowSpec espec{FlowDirection::Expanding, curvature, cfl, snapshot_stride,
                 StopRule::time_reached(1.0)};
  validate_flow_spec(espec);
  const FunctionSpec fs = FunctionSpec::inverse(curvature);

  FlowState s{0.0, dual0, 0.0, 0};
  rep.expanding.snapshots.emplace_back(s.t, s.g);
  for (std::size_t i = 0; i < rep.contracting.accepted_dt.size(); ++i) {
    const double dt = rep.contracting.accepted_dt[i];
    StepResult res = step_rk4(s, espec, dt);
    if (!res.accepted)
      throw IntegratorFailure("dual replay rejected step " + std::to_string(i) +
                              ": " + res.reason);
    s = std::move(res.state);
    rep.expanding.accepted_dt.push_back(dt);
    if (s.step_count % snapshot_stride == 0)
      rep.expanding.snapshots.emplace_back(s.t, s.g);
  }
  if (rep.expanding.snapshots.back().first != s.t)
    rep.expanding.snapshots.emplace_back(s.t, s.g);
  rep.expanding.tstar_lo = s.t - std::log(std::sin(s.g.u_max()));
  rep.expanding.tstar_hi = s.t - std::log(std::sin(s.g.u_min()));
  rep.expanding.tstar_est =
      0.5 * (rep.expanding.tstar_lo + rep.expanding.tstar_hi);

  rep.max_distance = 0.0;
  const std::size_t count = std::min(rep.contracting.snapshots.size(),
                                     rep.expanding.snapshots.size());
  for (std::size_t i = 0; i < count; ++i) {
    const auto& [tc, gc] = rep.contracting.snapshots[i];
    const auto& [te, ge] = rep.expanding.snapshots[i];
    const GraphFunction mirrored = polar_dual(gc).dual;
    double d = 0.0;
    for (std::size_t j = 0; j < mirrored.u().size(); ++j)
      d = std::max(d, std::abs(mirrored.u()[j] - ge.u()[j]));
    rep.times.push_back(tc);
    rep.distance.push_back(d);
    rep.max_distance = std::max(rep.max_distance, d);
  }
  return rep;
}

}  // namespace sphereflow
