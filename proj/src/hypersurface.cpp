#include "sphereflow/hypersurface.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sphereflow/errors.hpp"
#include "sphereflow/numfmt.hpp"

namespace sphereflow {

namespace {

constexpr double kPi = std::numbers::pi;

// One-sided fourth-order first derivative at the left end of a uniform table.
double one_sided_d1(const std::vector<double>& f, double h) {
  return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) /
         (12.0 * h);
}

void check_pole_parity(const AxiGrid& grid, const std::vector<double>& f) {
  double scale = 0.0;
  for (double v : f) scale = std::max(scale, std::abs(v));
  // Truncation of the one-sided estimate on smooth even data sits well below
  // h^2; genuinely odd components show up at their own amplitude.
  const double tol = grid.h * grid.h * (1.0 + scale);
  const double left = one_sided_d1(f, grid.h);
  std::vector<double> rev(f.rbegin(), f.rbegin() + 5);
  const double right = -one_sided_d1(rev, grid.h);
  if (std::abs(left) > tol)
    throw std::invalid_argument(
        "pole parity violated at theta = 0 (one-sided derivative " +
        std::to_string(left) + ")");
  if (std::abs(right) > tol)
    throw std::invalid_argument(
        "pole parity violated at theta = pi (one-sided derivative " +
        std::to_string(right) + ")");
}

}  // namespace

AxiGrid::AxiGrid(int n, int N) : n(n), N(N), h(kPi / N) {
  if (n < 1 || n > kMaxDim)
    throw std::invalid_argument("hypersurface dimension out of range");
  if (N < 32 || N % 2 != 0)
    throw std::invalid_argument("grid needs an even panel count of at least 32");
}

GraphFunction::GraphFunction(const AxiGrid& grid, std::vector<double> u,
                             std::string center)
    : grid_(grid), u_(std::move(u)), center_(std::move(center)) {
  if (static_cast<int>(u_.size()) != grid_.N + 1)
    throw std::invalid_argument("graph needs N+1 node values");
  if (center_.empty() ||
      center_.find_first_of(" \t\n\r") != std::string::npos)
    throw std::invalid_argument("center label must be nonempty and unspaced");
  for (int j = 0; j <= grid_.N; ++j) {
    const double v = u_[static_cast<std::size_t>(j)];
    if (!std::isfinite(v) || v <= 0.0 || v >= kPi - kPoleGamma)
      throw std::domain_error("graph value out of (0, pi - gamma) at node " +
                              std::to_string(j));
  }
  check_pole_parity(grid_, u_);
}

double GraphFunction::u_min() const {
  return *std::min_element(u_.begin(), u_.end());
}

double GraphFunction::u_max() const {
  return *std::max_element(u_.begin(), u_.end());
}

GraphFunction sphere(const AxiGrid& grid, double r) {
  if (!(r > 0.0) || !(r < kPi / 2.0))
    throw std::domain_error("sphere radius must lie in (0, pi/2)");
  return GraphFunction(grid, std::vector<double>(static_cast<std::size_t>(grid.N + 1), r));
}

GraphFunction perturbed_sphere(const AxiGrid& grid, double r, double amp,
                               int mode) {
  if (mode < 0) throw std::invalid_argument("mode must be nonnegative");
  std::vector<double> u(static_cast<std::size_t>(grid.N + 1));
  for (int j = 0; j <= grid.N; ++j)
    u[static_cast<std::size_t>(j)] = r + amp * std::cos(mode * grid.theta(j));
  GraphFunction g(grid, std::move(u));
  shape_operator(g, FunctionSpec::mean());  // strict convexity gate
  return g;
}

std::vector<double> phi_from_u(const GraphFunction& g) {
  const double offset = std::log(std::tan(0.5));  // reference radius r2 = 1
  std::vector<double> phi(g.u().size());
  for (std::size_t j = 0; j < phi.size(); ++j)
    phi[j] = std::log(std::tan(0.5 * g.u()[j])) - offset;
  return phi;
}

Derivs derivatives(const AxiGrid& grid, const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != grid.N + 1)
    throw std::invalid_argument("field needs N+1 node values");
  check_pole_parity(grid, f);
  const int N = grid.N;
  auto at = [&](int j) {
    if (j < 0) j = -j;
    if (j > N) j = 2 * N - j;
    return f[static_cast<std::size_t>(j)];
  };
  Derivs d;
  d.d1.resize(f.size());
  d.d2.resize(f.size());
  const double i12h = 1.0 / (12.0 * grid.h);
  const double i12h2 = 1.0 / (12.0 * grid.h * grid.h);
  for (int j = 0; j <= N; ++j) {
    const double fm2 = at(j - 2), fm1 = at(j - 1), f0 = at(j), fp1 = at(j + 1),
                 fp2 = at(j + 2);
    d.d1[static_cast<std::size_t>(j)] = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) * i12h;
    d.d2[static_cast<std::size_t>(j)] =
        (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) * i12h2;
  }
  return d;
}

double GeometryFields::lambda_F(int j) const {
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    best = std::max(best, F_grad[static_cast<std::size_t>(j) * n + i]);
  return best;
}

GeometryFields shape_operator(const GraphFunction& g, const FunctionSpec& spec) {
  const AxiGrid& grid = g.grid();
  const int N = grid.N, n = grid.n;
  spec.validate_for_dimension(n);

  GeometryFields out;
  out.n = n;
  out.phi = phi_from_u(g);
  Derivs d = derivatives(grid, out.phi);
  out.phi_d1 = std::move(d.d1);
  out.phi_d2 = std::move(d.d2);
  out.v.resize(out.phi.size());
  out.kappa_profile.resize(out.phi.size());
  out.kappa_orbit.resize(out.phi.size());
  out.H.resize(out.phi.size());
  out.normA2.resize(out.phi.size());
  out.F.resize(out.phi.size());
  out.F_grad.resize(out.phi.size() * static_cast<std::size_t>(n));

  for (int j = 0; j <= N; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    const double su = std::sin(g.u()[js]), cu = std::cos(g.u()[js]);
    const double p1 = out.phi_d1[js], p2 = out.phi_d2[js];
    const double v2 = 1.0 + p1 * p1;
    const double v = std::sqrt(v2);
    out.v[js] = v;

    const double kp = (-p2 + v2 * cu) / (v2 * v * su);
    double ko;
    if (j == 0 || j == N) {
      ko = kp;  // orbit and profile directions merge at the poles
    } else {
      const double th = grid.theta(j);
      ko = (-(std::cos(th) / std::sin(th)) * p1 + cu) / (v * su);
    }
    if (!(kp > 0.0))
      throw ConvexityLoss(j, kp, "profile");
    if (!(ko > 0.0))
      throw ConvexityLoss(j, ko, "orbit");
    out.kappa_profile[js] = kp;
    out.kappa_orbit[js] = ko;
    out.H[js] = kp + (n - 1) * ko;
    out.normA2[js] = kp * kp + (n - 1) * ko * ko;

    std::array<double, kMaxDim> kvec{};
    kvec[0] = kp;
    for (int i = 1; i < n; ++i) kvec[static_cast<std::size_t>(i)] = ko;
    const CurvatureVector kv(std::span<const double>(kvec.data(),
                                                     static_cast<std::size_t>(n)));
    const ValueGrad vg = evaluate_vg(spec, kv);
    out.F[js] = vg.value;
    for (int i = 0; i < n; ++i)
      out.F_grad[js * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] =
          vg.gradient[static_cast<std::size_t>(i)];
  }
  return out;
}

EmbeddedProfile embed(const GraphFunction& g) {
  const AxiGrid& grid = g.grid();
  const Derivs d = derivatives(grid, g.u());
  EmbeddedProfile out;
  out.x.resize(g.u().size());
  out.xt.resize(g.u().size());
  for (int j = 0; j <= grid.N; ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    const double u = g.u()[js], u1 = d.d1[js];
    const double su = std::sin(u), cu = std::cos(u);
    const double ct = std::cos(grid.theta(j)), st = std::sin(grid.theta(j));
    out.x[js] = {cu, su * ct, su * st};
    const std::array<double, 3> t{-u1 * su, u1 * cu * ct - su * st,
                                  u1 * cu * st + su * ct};
    const double tn = std::sqrt(u1 * u1 + su * su);
    if (tn < 1e-14)
      throw std::runtime_error("degenerate profile tangent at node " +
                               std::to_string(j));
    // exterior normal: t x x, away from the enclosed center
    out.xt[js] = {(t[1] * out.x[js][2] - t[2] * out.x[js][1]) / tn,
                  (t[2] * out.x[js][0] - t[0] * out.x[js][2]) / tn,
                  (t[0] * out.x[js][1] - t[1] * out.x[js][0]) / tn};
  }
  return out;
}

void write_graph(const GraphFunction& g, std::ostream& os) {
  os << g.grid().n << ' ' << g.grid().N << ' ' << g.center() << '\n';
  for (int j = 0; j <= g.grid().N; ++j)
    os << fmt17(g.grid().theta(j)) << ' '
       << fmt17(g.u()[static_cast<std::size_t>(j)]) << '\n';
}

void write_graph_file(const GraphFunction& g, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  write_graph(g, os);
}

namespace {

double parse_double(const std::string& tok, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ConfigError("bad number '" + tok + "' in " + context);
  return v;
}

}  // namespace

GraphFunction read_graph(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty graph stream");
  std::istringstream header(line);
  int n = 0, N = 0;
  std::string center;
  if (!(header >> n >> N >> center))
    throw ConfigError("bad graph header: " + line);
  AxiGrid grid(n, N);
  std::vector<double> u(static_cast<std::size_t>(N + 1));
  for (int j = 0; j <= N; ++j) {
    if (!std::getline(is, line))
      throw ConfigError("graph stream ends early at node " + std::to_string(j));
    std::istringstream row(line);
    std::string t1, t2;
    if (!(row >> t1 >> t2))
      throw ConfigError("bad graph row: " + line);
    const double theta = parse_double(t1, "graph row");
    if (std::abs(theta - grid.theta(j)) > 1e-9)
      throw ConfigError("node angle mismatch at row " + std::to_string(j));
    u[static_cast<std::size_t>(j)] = parse_double(t2, "graph row");
  }
  return GraphFunction(grid, std::move(u), center);
}

GraphFunction read_graph_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open graph file: " + path);
  return read_graph(is);
}

}  // namespace sphereflow
