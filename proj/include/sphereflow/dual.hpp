#pragma once

#include <utility>
#include <vector>

#include "sphereflow/hypersurface.hpp"

namespace sphereflow {

// A convex graph together with its Gauss-map polar dual, written as a graph
// of the same resolution about the antipodal center.  theta_star records the
// strictly monotone image angle of each primal node.
struct DualPair {
  GraphFunction primal;
  GraphFunction dual;
  std::vector<double> theta_star;
};

// Polar dual of a strictly convex graph contained in the open hemisphere
// around its center: u*(theta*) = pi/2 - (support angle), resampled onto the
// uniform grid by a C^2 cubic spline on the reflection-extended table.
// Throws HemisphereExit if u reaches pi/2 and ConvexityLoss if the image
// angles fail to be monotone.
DualPair polar_dual(const GraphFunction& g);

// Max over nodes and principal directions of |kappa~_i * kappa_i - 1|, with
// the dual's curvatures interpolated at the image angles, plus the pointwise
// product F(primal) * F~(dual); returns the worst deviation of either check.
double check_dual_curvatures(const DualPair& p, const FunctionSpec& spec);

// Residuals of the support-angle sum rules:
//   (u_max + u*_min - pi/2,  u_min + u*_max - pi/2).
std::pair<double, double> support_bracket(const DualPair& p);

}  // namespace sphereflow
