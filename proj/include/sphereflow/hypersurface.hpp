#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "sphereflow/curvature.hpp"

namespace sphereflow {

// Graphs must keep a margin away from the far pole of the coordinate system.
inline constexpr double kPoleGamma = 0.05;

// Uniform latitude grid for rotationally symmetric radial graphs: nodes
// theta_j = j*pi/N for j = 0..N, over an n-dimensional hypersurface.
struct AxiGrid {
  AxiGrid(int n, int N);
  int n;     // hypersurface dimension, 1..8
  int N;     // panel count, even, >= 32
  double h;  // pi / N
  double theta(int j) const { return j * h; }
};

// Radial graph u(theta) about a labeled center point, one value per node.
// Invariants: 0 < u < pi - gamma, and the one-sided derivative vanishes at
// both poles (even reflection symmetry).
class GraphFunction {
 public:
  GraphFunction(const AxiGrid& grid, std::vector<double> u,
                std::string center = "x0");

  const AxiGrid& grid() const { return grid_; }
  const std::vector<double>& u() const { return u_; }
  const std::string& center() const { return center_; }
  double u_min() const;
  double u_max() const;

 private:
  AxiGrid grid_;
  std::vector<double> u_;
  std::string center_;
};

GraphFunction sphere(const AxiGrid& grid, double r);
GraphFunction perturbed_sphere(const AxiGrid& grid, double r, double amp,
                               int mode);

// Log-tangent substitution phi = log tan(u/2) - log tan(r2/2) with the fixed
// reference radius r2 = 1; phi' = u' / sin u.
std::vector<double> phi_from_u(const GraphFunction& g);

struct Derivs {
  std::vector<double> d1, d2;
};

// Fourth-order central differences with even-reflection ghost nodes across
// both poles.  Rejects data whose one-sided pole derivative does not vanish.
Derivs derivatives(const AxiGrid& grid, const std::vector<double>& f);

// Pointwise geometry of the graph.  kappa_profile is the curvature of the
// profile direction, kappa_orbit the (n-1)-fold one of the orbit directions
// (set to kappa_profile at the poles, where the directions merge).  F and its
// gradient are evaluated at (kappa_profile, kappa_orbit, ..., kappa_orbit);
// F_grad is row-major (N+1) x n.
struct GeometryFields {
  std::vector<double> phi, phi_d1, phi_d2, v;
  std::vector<double> kappa_profile, kappa_orbit;
  std::vector<double> H, normA2;
  std::vector<double> F;
  std::vector<double> F_grad;
  int n = 0;

  double lambda_F(int j) const;  // max gradient entry at node j
};

GeometryFields shape_operator(const GraphFunction& g, const FunctionSpec& spec);

// Profile-plane embedding into the unit sphere: position x and exterior unit
// normal xt, both 3-vectors (axis component, then the orbit plane pair).
struct EmbeddedProfile {
  std::vector<std::array<double, 3>> x;
  std::vector<std::array<double, 3>> xt;
};

EmbeddedProfile embed(const GraphFunction& g);

// Plain-text serialization: header "n N center", then N+1 lines "theta u",
// 17 significant digits.
void write_graph(const GraphFunction& g, std::ostream& os);
void write_graph_file(const GraphFunction& g, const std::string& path);
GraphFunction read_graph(std::istream& is);
GraphFunction read_graph_file(const std::string& path);

}  // namespace sphereflow
