#include "sphereflow/dual.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sphereflow/errors.hpp"
#include "sphereflow/interp.hpp"

namespace sphereflow {

namespace {

constexpr double kPi = std::numbers::pi;

std::string negate_center(const std::string& center) {
  if (!center.empty() && center.front() == '-') return center.substr(1);
  return "-" + center;
}

// Interpolant over [0, pi] with a few reflected knots past each pole, so that
// queries near the endpoints see the even symmetry of the field and the
// spline end conditions act far from the evaluated range.
CubicSpline reflected_interpolant(const std::vector<double>& theta,
                                  const std::vector<double>& val) {
  const std::size_t m = theta.size();
  const std::size_t ghosts = 4;
  std::vector<double> xs, ys;
  xs.reserve(m + 2 * ghosts);
  ys.reserve(m + 2 * ghosts);
  for (std::size_t g = ghosts; g >= 1; --g) {
    xs.push_back(-theta[g]);
    ys.push_back(val[g]);
  }
  xs.insert(xs.end(), theta.begin(), theta.end());
  ys.insert(ys.end(), val.begin(), val.end());
  for (std::size_t g = 1; g <= ghosts; ++g) {
    xs.push_back(2.0 * kPi - theta[m - 1 - g]);
    ys.push_back(val[m - 1 - g]);
  }
  return CubicSpline(std::move(xs), std::move(ys));
}

}  // namespace

DualPair polar_dual(const GraphFunction& g) {
  const AxiGrid& grid = g.grid();
  const int N = grid.N;
  for (int j = 0; j <= N; ++j)
    if (g.u()[static_cast<std::size_t>(j)] >= kPi / 2.0)
      throw HemisphereExit(j, g.u()[static_cast<std::size_t>(j)]);

  const EmbeddedProfile e = embed(g);
  std::vector<double> theta_star(static_cast<std::size_t>(N + 1));
  std::vector<double> u_star(static_cast<std::size_t>(N + 1));
  for (int j = 0; j <= N; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    const auto& xt = e.xt[js];
    u_star[js] = std::acos(std::clamp(-xt[0], -1.0, 1.0));
    if (j == 0)
      theta_star[js] = 0.0;  // the normal at a pole points along the axis plane
    else if (j == N)
      theta_star[js] = kPi;
    else
      theta_star[js] = std::atan2(xt[2], xt[1]);
  }
  for (int j = 0; j < N; ++j) {
    const double gap = theta_star[static_cast<std::size_t>(j) + 1] -
                       theta_star[static_cast<std::size_t>(j)];
    if (!(gap > 0.0))
      throw ConvexityLoss(j, gap, "dual-angle-monotonicity");
  }

  const CubicSpline interp = reflected_interpolant(theta_star, u_star);
  std::vector<double> dual_u(static_cast<std::size_t>(N + 1));
  dual_u[0] = u_star[0];
  dual_u[static_cast<std::size_t>(N)] = u_star[static_cast<std::size_t>(N)];
  for (int j = 1; j < N; ++j)
    dual_u[static_cast<std::size_t>(j)] = interp(grid.theta(j));

  DualPair out{g, GraphFunction(grid, std::move(dual_u), negate_center(g.center())),
               std::move(theta_star)};
  return out;
}

double check_dual_curvatures(const DualPair& pair, const FunctionSpec& spec) {
  const AxiGrid& grid = pair.primal.grid();
  const GeometryFields gp = shape_operator(pair.primal, spec);
  const GeometryFields gd = shape_operator(pair.dual, FunctionSpec::inverse(spec));

  std::vector<double> theta(static_cast<std::size_t>(grid.N + 1));
  for (int j = 0; j <= grid.N; ++j)
    theta[static_cast<std::size_t>(j)] = grid.theta(j);
  const CubicSpline ip = reflected_interpolant(theta, gd.kappa_profile);
  const CubicSpline io = reflected_interpolant(theta, gd.kappa_orbit);
  const CubicSpline iF = reflected_interpolant(theta, gd.F);

  double worst = 0.0;
  for (int j = 0; j <= grid.N; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    const double ts = pair.theta_star[js];
    worst = std::max(worst, std::abs(ip(ts) * gp.kappa_profile[js] - 1.0));
    if (grid.n > 1)
      worst = std::max(worst, std::abs(io(ts) * gp.kappa_orbit[js] - 1.0));
    worst = std::max(worst, std::abs(iF(ts) * gp.F[js] - 1.0));
  }
  return worst;
}

std::pair<double, double> support_bracket(const DualPair& pair) {
  return {pair.primal.u_max() + pair.dual.u_min() - kPi / 2.0,
          pair.primal.u_min() + pair.dual.u_max() - kPi / 2.0};
}

}  // namespace sphereflow
