#pragma once

#include <vector>

namespace sphereflow {

// C2 cubic spline with not-a-knot ends over strictly increasing abscissae.
// Queries outside the table clamp to the boundary values.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double xq) const;
  double derivative(double xq) const;

 private:
  int interval(double xq) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

}  // namespace sphereflow
