#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "sphereflow/curvature.hpp"
#include "sphereflow/errors.hpp"
#include "sphereflow/hypersurface.hpp"

using namespace sphereflow;

namespace {

constexpr double kPi = std::numbers::pi;

GraphFunction bump_graph(int n, int N, double r, double amp, int mode) {
  return perturbed_sphere(AxiGrid(n, N), r, amp, mode);
}

// Profile curvature at one node, recomputed on demand for refinement studies.
double kappa_profile_at(const GraphFunction& g, int j) {
  return shape_operator(g, FunctionSpec::mean()).kappa_profile[static_cast<std::size_t>(j)];
}

double refinement_order(double coarse, double mid, double fine) {
  return std::log2(std::abs(coarse - mid) / std::abs(mid - fine));
}

}  // namespace

TEST_CASE("round spheres are umbilic to machine precision") {
  const AxiGrid grid(3, 64);
  const double r = 0.7;
  const GraphFunction g = sphere(grid, r);
  const GeometryFields geo = shape_operator(g, FunctionSpec::mean());
  const double cot = 1.1872418321266794;
  for (int j = 0; j <= grid.N; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    CHECK(geo.v[js] == 1.0);
    CHECK(geo.kappa_profile[js] == doctest::Approx(cot).epsilon(1e-13));
    CHECK(geo.kappa_orbit[js] == doctest::Approx(cot).epsilon(1e-13));
    CHECK(geo.F[js] == doctest::Approx(cot).epsilon(1e-13));
    CHECK(geo.H[js] == doctest::Approx(3.0 * cot).epsilon(1e-13));
    CHECK(geo.normA2[js] == doctest::Approx(3.0 * cot * cot).epsilon(1e-13));
    for (int i = 0; i < 3; ++i)
      CHECK(geo.F_grad[js * 3 + static_cast<std::size_t>(i)] ==
            doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  }
}

TEST_CASE("log-tangent graph transform is exact on frozen values") {
  const AxiGrid grid(2, 32);
  const GraphFunction g1 = sphere(grid, 1.0);
  for (double p : phi_from_u(g1)) CHECK(p == 0.0);
  const GraphFunction g2 = sphere(grid, kPi / 3.0);
  for (double p : phi_from_u(g2))
    CHECK(p == doctest::Approx(0.055276301607536709).epsilon(1e-14));
}

TEST_CASE("finite differences hit fourth order on even data") {
  for (int N : {64, 128}) {
    const AxiGrid grid(2, N);
    std::vector<double> f(static_cast<std::size_t>(N + 1));
    for (int j = 0; j <= N; ++j) f[static_cast<std::size_t>(j)] = std::cos(2.0 * grid.theta(j));
    const Derivs d = derivatives(grid, f);
    double e1 = 0.0, e2 = 0.0;
    for (int j = 0; j <= N; ++j) {
      const double th = grid.theta(j);
      e1 = std::max(e1, std::abs(d.d1[static_cast<std::size_t>(j)] + 2.0 * std::sin(2.0 * th)));
      e2 = std::max(e2, std::abs(d.d2[static_cast<std::size_t>(j)] + 4.0 * std::cos(2.0 * th)));
    }
    const double h4 = std::pow(grid.h, 4);
    CHECK(e1 < 40.0 * h4);
    CHECK(e2 < 80.0 * h4);
  }
}

TEST_CASE("derivative of a constant field vanishes identically") {
  const AxiGrid grid(2, 48);
  const Derivs d = derivatives(grid, std::vector<double>(49, 0.9));
  for (double v : d.d1) CHECK(std::abs(v) < 1e-13);
  for (double v : d.d2) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("profile curvature converges at high order under refinement") {
  auto at_node = [](int N, int frac_num, int frac_den) {
    const GraphFunction g = bump_graph(3, N, 0.8, 0.05, 2);
    return kappa_profile_at(g, N * frac_num / frac_den);
  };
  // interior node theta = pi/2
  const double i1 = at_node(64, 1, 2), i2 = at_node(128, 1, 2), i3 = at_node(256, 1, 2);
  CHECK(refinement_order(i1, i2, i3) > 3.5);
  // pole node theta = 0
  const double p1 = at_node(64, 0, 1), p2 = at_node(128, 0, 1), p3 = at_node(256, 0, 1);
  CHECK(refinement_order(p1, p2, p3) > 2.0);
}

TEST_CASE("graph slope field matches the metric identity") {
  const int N = 128;
  const GraphFunction g = bump_graph(2, N, 0.8, 0.05, 2);
  const GeometryFields geo = shape_operator(g, FunctionSpec::mean());
  const Derivs du = derivatives(g.grid(), g.u());
  double worst = 0.0;
  for (int j = 0; j <= N; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    const double su = std::sin(g.u()[js]);
    const double lhs = su * su * geo.v[js] * geo.v[js];
    const double rhs = du.d1[js] * du.d1[js] + su * su;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  const double h = g.grid().h;
  CHECK(worst < 5.0 * h * h * h * h);
}

TEST_CASE("speed factor exceeds one exactly where the graph has slope") {
  const int N = 64;
  const GraphFunction g = bump_graph(2, N, 0.8, 0.05, 2);
  const GeometryFields geo = shape_operator(g, FunctionSpec::mean());
  for (int j = 0; j <= N; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    CHECK(geo.v[js] >= 1.0);
    if (std::abs(geo.phi_d1[js]) > 1e-7) CHECK(geo.v[js] > 1.0);
  }
}

TEST_CASE("embedded profile satisfies the curve acceleration identity") {
  auto residual = [](int N) {
    const GraphFunction g = bump_graph(2, N, 0.8, 0.05, 2);
    const GeometryFields geo = shape_operator(g, FunctionSpec::mean());
    const EmbeddedProfile e = embed(g);
    const Derivs du = derivatives(g.grid(), g.u());
    const double h = g.grid().h;
    // projecting onto the normal removes all tangential Christoffel terms
    double worst = 0.0;
    for (int j = 2; j <= N - 2; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      double dot = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double xtt = (-e.x[js + 2][c] + 16.0 * e.x[js + 1][c] -
                            30.0 * e.x[js][c] + 16.0 * e.x[js - 1][c] -
                            e.x[js - 2][c]) /
                           (12.0 * h * h);
        dot += xtt * e.xt[js][c];
      }
      const double su = std::sin(g.u()[js]);
      const double speed2 = du.d1[js] * du.d1[js] + su * su;
      worst = std::max(worst, std::abs(dot + geo.kappa_profile[js] * speed2));
    }
    return worst;
  };
  const double r1 = residual(64), r2 = residual(128);
  CHECK(r1 < 1e-4);
  CHECK(r1 / r2 > 8.0);
}

TEST_CASE("embedding produces unit vectors with exterior orientation") {
  const int N = 64;
  const GraphFunction g = bump_graph(2, N, 0.75, 0.04, 3);
  const EmbeddedProfile e = embed(g);
  for (int j = 0; j <= N; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    double nx = 0.0, nn = 0.0, dot = 0.0, radial = 0.0;
    const double u = g.u()[js];
    const double th = g.grid().theta(j);
    const std::array<double, 3> du_dir{-std::sin(u), std::cos(u) * std::cos(th),
                                       std::cos(u) * std::sin(th)};
    for (int c = 0; c < 3; ++c) {
      nx += e.x[js][c] * e.x[js][c];
      nn += e.xt[js][c] * e.xt[js][c];
      dot += e.x[js][c] * e.xt[js][c];
      radial += du_dir[static_cast<std::size_t>(c)] * e.xt[js][c];
    }
    CHECK(std::abs(nx - 1.0) < 1e-12);
    CHECK(std::abs(nn - 1.0) < 1e-12);
    CHECK(std::abs(dot) < 1e-12);
    CHECK(radial > 0.0);
  }
}

TEST_CASE("sphere embedding matches the closed form") {
  const AxiGrid grid(2, 64);
  const double r = 0.6;
  const EmbeddedProfile e = embed(sphere(grid, r));
  for (int j = 0; j <= grid.N; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    const double th = grid.theta(j);
    CHECK(e.xt[js][0] == doctest::Approx(-std::sin(r)).epsilon(1e-12));
    CHECK(e.xt[js][1] == doctest::Approx(std::cos(r) * std::cos(th)).epsilon(1e-12));
    CHECK(e.xt[js][2] ==
          doctest::Approx(std::cos(r) * std::sin(th)).epsilon(1e-12));
  }
}

TEST_CASE("odd components at the poles are rejected") {
  const AxiGrid grid(2, 64);
  std::vector<double> u(65);
  for (int j = 0; j <= 64; ++j)
    u[static_cast<std::size_t>(j)] = 0.8 + 0.05 * std::sin(grid.theta(j));
  CHECK_THROWS_AS(GraphFunction(grid, u), std::invalid_argument);
}

TEST_CASE("graphs outside the admissible band are rejected") {
  const AxiGrid grid(2, 64);
  CHECK_THROWS_AS(sphere(grid, 0.0), std::domain_error);
  CHECK_THROWS_AS(sphere(grid, kPi / 2.0), std::domain_error);
  CHECK_THROWS_AS(sphere(grid, -0.3), std::domain_error);
  CHECK_THROWS_AS(GraphFunction(grid, std::vector<double>(65, kPi - 0.01)),
                  std::domain_error);
  CHECK_THROWS_AS(GraphFunction(grid, std::vector<double>(64, 0.5)),
                  std::invalid_argument);
}

TEST_CASE("grid construction validates its arguments") {
  CHECK_THROWS_AS(AxiGrid(0, 64), std::invalid_argument);
  CHECK_THROWS_AS(AxiGrid(9, 64), std::invalid_argument);
  CHECK_THROWS_AS(AxiGrid(2, 31), std::invalid_argument);
  CHECK_THROWS_AS(AxiGrid(2, 16), std::invalid_argument);
  const AxiGrid g(8, 32);
  CHECK(g.h == doctest::Approx(kPi / 32.0));
  CHECK(g.theta(32) == doctest::Approx(kPi));
}

TEST_CASE("non-convex perturbations are rejected with a node index") {
  const AxiGrid grid(2, 128);
  CHECK_THROWS_AS(perturbed_sphere(grid, 0.8, 0.5, 6), ConvexityLoss);
  try {
    perturbed_sphere(grid, 0.8, 0.5, 6);
  } catch (const ConvexityLoss& e) {
    CHECK(e.node >= 0);
    CHECK(e.node <= 128);
  }
  CHECK_THROWS_AS(perturbed_sphere(grid, 0.3, 0.4, 2), std::domain_error);
  CHECK_THROWS_AS(perturbed_sphere(grid, 0.8, 0.1, -1), std::invalid_argument);
}

TEST_CASE("graph serialization round-trips bitwise") {
  const GraphFunction g = bump_graph(3, 64, 0.8, 0.03, 2);
  std::ostringstream os;
  write_graph(g, os);
  const std::string text = os.str();
  CHECK(text.substr(0, text.find('\n')) == "3 64 x0");

  std::istringstream is(text);
  const GraphFunction back = read_graph(is);
  CHECK(back.grid().n == 3);
  CHECK(back.grid().N == 64);
  CHECK(back.center() == "x0");
  for (std::size_t j = 0; j < back.u().size(); ++j)
    CHECK(back.u()[j] == g.u()[j]);

  std::ostringstream os2;
  write_graph(back, os2);
  CHECK(os2.str() == text);
}

TEST_CASE("malformed graph streams raise configuration errors") {
  {
    std::istringstream is("");
    CHECK_THROWS_AS(read_graph(is), ConfigError);
  }
  {
    std::istringstream is("3 64\n");
    CHECK_THROWS_AS(read_graph(is), ConfigError);
  }
  {
    std::istringstream is("2 32 x0\n0.0 0.5\n");
    CHECK_THROWS_AS(read_graph(is), ConfigError);
  }
  {
    std::ostringstream os;
    write_graph(sphere(AxiGrid(2, 32), 0.5), os);
    std::string text = os.str();
    text.replace(text.find("0.5"), 3, "abc");
    std::istringstream is(text);
    CHECK_THROWS_AS(read_graph(is), ConfigError);
  }
}

TEST_CASE("convexity loss during curvature assembly names the node") {
  const AxiGrid grid(2, 128);
  std::vector<double> u(129);
  for (int j = 0; j <= 128; ++j)
    u[static_cast<std::size_t>(j)] = 0.9 + 0.3 * std::cos(4.0 * grid.theta(j));
  bool threw = false;
  try {
    shape_operator(GraphFunction(grid, u), FunctionSpec::mean());
  } catch (const ConvexityLoss& e) {
    threw = true;
    CHECK(e.node >= 0);
    CHECK(e.node <= 128);
    CHECK(e.kappa <= 0.0);
  }
  CHECK(threw);
}
