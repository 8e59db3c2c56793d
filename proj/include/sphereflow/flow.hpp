#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sphereflow/curvature.hpp"
#include "sphereflow/hypersurface.hpp"

namespace sphereflow {

enum class FlowDirection { Contracting, Expanding };

// Termination test, evaluated after every accepted step.
struct StopRule {
  enum class Kind { MinRadiusBelow, MaxRadiusAbove, TimeReached, PinchRatioAbove };
  Kind kind;
  double value;

  static StopRule min_radius_below(double eps);
  static StopRule max_radius_above(double r);  // expanding runs, r < pi/2
  static StopRule time_reached(double t);
  static StopRule pinch_ratio_above(double q);
};

// curvature holds F.  Contracting runs move with speed -F v; expanding runs
// move with speed v / F~ where F~ = inverse(curvature).
struct FlowSpec {
  FlowDirection direction;
  FunctionSpec curvature;
  double cfl = 0.2;  // in (0, 0.5]
  int snapshot_stride = 100;
  StopRule stop;
};

struct FlowState {
  double t = 0.0;
  GraphFunction g;
  double last_dt = 0.0;
  long step_count = 0;
};

struct Trajectory {
  std::vector<std::pair<double, GraphFunction>> snapshots;
  double tstar_lo = 0.0;  // bracket of the spherical extinction time
  double tstar_hi = 0.0;
  double tstar_est = 0.0;
  std::vector<double> accepted_dt;
};

// du/dt = -F(kappa) * v, nodewise.
std::vector<double> rhs_contracting(const GraphFunction& g,
                                    const FunctionSpec& spec);

// du/dt = +v / speed_spec(kappa); callers pass speed_spec = inverse(F).
std::vector<double> rhs_expanding(const GraphFunction& g,
                                  const FunctionSpec& speed_spec);

struct StepResult {
  bool accepted = false;
  FlowState state;
  std::string reason;  // set when rejected
};

// One classical Runge–Kutta step of the method-of-lines system, with
// post-step validation (graph range, parity, convexity; hemisphere bound for
// expanding runs).  A failed stage or validation rejects the step.
StepResult step_rk4(const FlowState& s, const FlowSpec& spec, double dt);

// cfl * h^2 * min_j sin^2(u_j) / (lambda_j * v_j), where lambda_j is the max
// gradient entry of the driving speed function, clamped to [1e-12, 1e-2].
double adaptive_dt(const FlowState& s, const FlowSpec& spec);

// Integrates until the stop rule fires, halving rejected steps (failure below
// dt = 1e-12).  Snapshots land every snapshot_stride accepted steps plus the
// initial and final states.  The extinction bracket comes from the stop-time
// radii: contracting  (t - log cos u_min, t - log cos u_max), expanding via
// the dual relation (t - log sin u_max, t - log sin u_min); tstar_est is the
// midpoint.  Radial monotonicity (u_max falling / u_min rising) is audited
// across accepted steps.
Trajectory run(const FlowSpec& spec, const GraphFunction& g0);

// Shrinking-sphere reference: Theta(t) = arccos(e^(t - tstar)).
double spherical_theta(double t, double tstar);
// tstar of a sphere of initial radius r0: -log cos(r0).
double spherical_tstar(double r0);

struct DualRunReport {
  Trajectory contracting;
  Trajectory expanding;
  std::vector<double> times;
  std::vector<double> distance;  // max-norm graph distance at matched times
  double max_distance = 0.0;
};

// Runs the contracting flow from g0 under F, then replays the accepted dt
// sequence for the expanding flow started from polar_dual(g0); at each
// matched snapshot compares polar_dual(contracting state) with the expanding
// state in the max norm.
DualRunReport dual_run(const FunctionSpec& curvature, const GraphFunction& g0,
                       const StopRule& stop, double cfl = 0.2,
                       int snapshot_stride = 100);

}  // namespace sphereflow
