#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "sphereflow/curvature.hpp"
#include "sphereflow/errors.hpp"
#include "sphereflow/flow.hpp"
#include "sphereflow/hypersurface.hpp"

using namespace sphereflow;

namespace {

constexpr double kPi = std::numbers::pi;

FlowSpec contracting_spec(const FunctionSpec& f, StopRule stop) {
  return FlowSpec{FlowDirection::Contracting, f, 0.2, 100, stop};
}

FlowSpec expanding_spec(const FunctionSpec& f, StopRule stop) {
  return FlowSpec{FlowDirection::Expanding, f, 0.2, 100, stop};
}

}  // namespace

TEST_CASE("flow velocities on round spheres match the closed forms") {
  const AxiGrid grid(2, 64);
  const double r = 0.8;
  const GraphFunction g = sphere(grid, r);
  const double cot = std::cos(r) / std::sin(r);

  const std::vector<double> vc = rhs_contracting(g, FunctionSpec::sigma(2));
  for (double v : vc) CHECK(v == doctest::Approx(-cot).epsilon(1e-13));

  const std::vector<double> ve =
      rhs_expanding(g, FunctionSpec::inverse(FunctionSpec::sigma(2)));
  for (double v : ve) CHECK(v == doctest::Approx(1.0 / cot).epsilon(1e-13));
}

TEST_CASE("one integrator step reproduces the sphere solution to fifth order") {
  const AxiGrid grid(2, 64);
  const double r = 0.8, dt = 1e-3;

  const FlowSpec cs =
      contracting_spec(FunctionSpec::sigma(2), StopRule::min_radius_below(0.1));
  const StepResult rc = step_rk4(FlowState{0.0, sphere(grid, r), 0.0, 0}, cs, dt);
  REQUIRE(rc.accepted);
  const double exact_c = std::acos(std::cos(r) * std::exp(dt));
  for (double uj : rc.state.g.u())
    CHECK(uj == doctest::Approx(exact_c).epsilon(1e-13));

  const FlowSpec es =
      expanding_spec(FunctionSpec::sigma(2), StopRule::max_radius_above(1.0));
  const StepResult re = step_rk4(FlowState{0.0, sphere(grid, r), 0.0, 0}, es, dt);
  REQUIRE(re.accepted);
  const double exact_e = std::asin(std::sin(r) * std::exp(dt));
  for (double uj : re.state.g.u())
    CHECK(uj == doctest::Approx(exact_e).epsilon(1e-13));
}

TEST_CASE("the adaptive step obeys its parabolic bound on spheres") {
  const AxiGrid grid(2, 64);
  const double r = 0.8;
  const FlowState s{0.0, sphere(grid, r), 0.0, 0};

  const FlowSpec cs =
      contracting_spec(FunctionSpec::sigma(2), StopRule::min_radius_below(0.1));
  const double su = std::sin(r);
  const double expected_c = 0.2 * grid.h * grid.h * su * su / 0.5;
  CHECK(adaptive_dt(s, cs) == doctest::Approx(expected_c).epsilon(1e-12));

  const FlowSpec es =
      expanding_spec(FunctionSpec::sigma(2), StopRule::max_radius_above(1.0));
  const double cot = std::cos(r) / std::sin(r);
  const double expected_e = 0.2 * grid.h * grid.h * su * su / (0.5 / (cot * cot));
  CHECK(adaptive_dt(s, es) == doctest::Approx(expected_e).epsilon(1e-12));
}

TEST_CASE("a contracting sphere tracks the comparison solution") {
  const FlowSpec spec =
      contracting_spec(FunctionSpec::sigma(2), StopRule::min_radius_below(0.05));
  const Trajectory traj = run(spec, sphere(AxiGrid(2, 64), kPi / 3.0));
  const double tstar = std::log(2.0);
  double worst = 0.0;
  for (const auto& [t, g] : traj.snapshots) {
    const double theta = spherical_theta(t, tstar);
    for (double uj : g.u()) worst = std::max(worst, std::abs(uj - theta));
  }
  CHECK(worst < 1e-9);
  CHECK(traj.tstar_est == doctest::Approx(tstar).epsilon(1e-9));
  CHECK(traj.tstar_lo <= traj.tstar_est);
  CHECK(traj.tstar_est <= traj.tstar_hi);
  CHECK(traj.snapshots.front().first == 0.0);
  CHECK(traj.snapshots.back().second.u_min() < 0.05);
}

TEST_CASE("terminal-time bracket endpoints invert to the radial extremes") {
  const FlowSpec spec =
      contracting_spec(FunctionSpec::sigma(2), StopRule::min_radius_below(0.1));
  const Trajectory traj =
      run(spec, perturbed_sphere(AxiGrid(2, 64), kPi / 4.0, 0.05, 2));
  const auto& [t_end, g_end] = traj.snapshots.back();
  CHECK(spherical_theta(t_end, traj.tstar_lo) ==
        doctest::Approx(g_end.u_min()).epsilon(1e-12));
  CHECK(spherical_theta(t_end, traj.tstar_hi) ==
        doctest::Approx(g_end.u_max()).epsilon(1e-12));
  CHECK(traj.tstar_hi - traj.tstar_lo < 1e-3);
}

TEST_CASE("outer radius decreases while contracting, inner grows while expanding") {
  const Trajectory tc =
      run(contracting_spec(FunctionSpec::sigma(2), StopRule::min_radius_below(0.3)),
          perturbed_sphere(AxiGrid(2, 64), kPi / 4.0, 0.05, 2));
  for (std::size_t i = 1; i < tc.snapshots.size(); ++i)
    CHECK(tc.snapshots[i].second.u_max() < tc.snapshots[i - 1].second.u_max());

  const Trajectory te =
      run(expanding_spec(FunctionSpec::sigma(2), StopRule::max_radius_above(0.9)),
          perturbed_sphere(AxiGrid(2, 64), kPi / 4.0, 0.05, 2));
  for (std::size_t i = 1; i < te.snapshots.size(); ++i)
    CHECK(te.snapshots[i].second.u_min() > te.snapshots[i - 1].second.u_min());
}

TEST_CASE("flows preserve inclusions between nested initial shapes") {
  const AxiGrid grid(2, 64);
  const FlowSpec spec =
      contracting_spec(FunctionSpec::sigma(2), StopRule::time_reached(0.1));
  const Trajectory inner = run(spec, sphere(grid, 0.55));
  const Trajectory outer = run(spec, perturbed_sphere(grid, 0.7, 0.05, 2));
  const GraphFunction& gi = inner.snapshots.back().second;
  const GraphFunction& go = outer.snapshots.back().second;
  CHECK(inner.snapshots.back().first >= 0.1);
  CHECK(outer.snapshots.back().first >= 0.1);
  for (std::size_t j = 0; j < gi.u().size(); ++j) CHECK(gi.u()[j] < go.u()[j]);
}

TEST_CASE("mirrored contracting and expanding sphere runs coincide") {
  const DualRunReport rep =
      dual_run(FunctionSpec::sigma(2), sphere(AxiGrid(2, 64), 0.6),
               StopRule::min_radius_below(0.05));
  REQUIRE(!rep.times.empty());
  CHECK(rep.times.size() == rep.distance.size());
  CHECK(rep.max_distance < 1e-9);
  CHECK(rep.contracting.accepted_dt.size() == rep.expanding.accepted_dt.size());
}

TEST_CASE("stop rules fire when their thresholds are crossed") {
  const AxiGrid grid(2, 64);
  {
    const Trajectory t = run(
        expanding_spec(FunctionSpec::mean(), StopRule::max_radius_above(0.8)),
        sphere(grid, 0.5));
    CHECK(t.snapshots.back().second.u_max() > 0.8);
  }
  {
    // the initial shape already violates the pinch threshold
    const Trajectory t =
        run(contracting_spec(FunctionSpec::sigma(2),
                             StopRule::pinch_ratio_above(1.0001)),
            perturbed_sphere(grid, kPi / 4.0, 0.05, 2));
    CHECK(t.snapshots.size() == 1);
    CHECK(t.snapshots.front().first == 0.0);
  }
}

TEST_CASE("oversized steps are rejected rather than integrated") {
  const AxiGrid grid(2, 64);
  const FlowSpec spec =
      contracting_spec(FunctionSpec::sigma(2), StopRule::min_radius_below(0.1));
  const StepResult res =
      step_rk4(FlowState{0.0, sphere(grid, 0.5), 0.0, 0}, spec, 10.0);
  CHECK(!res.accepted);
  CHECK(!res.reason.empty());
}

TEST_CASE("flow configuration is validated before running") {
  const AxiGrid grid(2, 64);
  const GraphFunction g = sphere(grid, 0.5);
  CHECK_THROWS_AS(
      run(FlowSpec{FlowDirection::Contracting, FunctionSpec::sigma(2), 0.0, 100,
                   StopRule::min_radius_below(0.1)},
          g),
      std::invalid_argument);
  CHECK_THROWS_AS(
      run(FlowSpec{FlowDirection::Contracting, FunctionSpec::sigma(2), 0.2, 0,
                   StopRule::min_radius_below(0.1)},
          g),
      std::invalid_argument);
  CHECK_THROWS_AS(
      run(contracting_spec(FunctionSpec::sigma(2), StopRule::max_radius_above(0.8)),
          g),
      std::invalid_argument);
  CHECK_THROWS_AS(
      run(expanding_spec(FunctionSpec::sigma(2), StopRule::min_radius_below(0.1)),
          g),
      std::invalid_argument);
  CHECK_THROWS_AS(StopRule::max_radius_above(1.6), std::invalid_argument);
  CHECK_THROWS_AS(StopRule::min_radius_below(0.0), std::invalid_argument);
  CHECK_THROWS_AS(StopRule::time_reached(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(StopRule::pinch_ratio_above(0.9), std::invalid_argument);
  CHECK_THROWS_AS(
      run(contracting_spec(FunctionSpec::sigma(3), StopRule::min_radius_below(0.1)),
          g),
      std::invalid_argument);
}

TEST_CASE("comparison solution helpers enforce their domains") {
  CHECK(spherical_tstar(kPi / 3.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(spherical_theta(0.0, std::log(2.0)) ==
        doctest::Approx(kPi / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(spherical_theta(1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(spherical_theta(0.5, 0.5), std::domain_error);
  CHECK_THROWS_AS(spherical_tstar(0.0), std::domain_error);
  CHECK_THROWS_AS(spherical_tstar(kPi / 2.0), std::domain_error);
}

TEST_CASE("snapshots are taken at the configured stride") {
  FlowSpec spec =
      contracting_spec(FunctionSpec::sigma(2), StopRule::min_radius_below(0.45));
  spec.snapshot_stride = 50;
  const Trajectory traj = run(spec, sphere(AxiGrid(2, 64), 0.5));
  const std::size_t steps = traj.accepted_dt.size();
  std::size_t expected = 1 + steps / 50;
  if (steps % 50 != 0) ++expected;
  CHECK(traj.snapshots.size() == expected);
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i)
    CHECK(traj.snapshots[i].first > traj.snapshots[i - 1].first);
}
