#pragma once

#include <stdexcept>
#include <string>

namespace sphereflow {

// Strict convexity failed at a grid node.
class ConvexityLoss : public std::runtime_error {
 public:
  ConvexityLoss(int node, double kappa, const std::string& direction)
      : std::runtime_error("convexity lost at node " + std::to_string(node) +
                           " (" + direction +
                           " curvature = " + std::to_string(kappa) + ")"),
        node(node),
        kappa(kappa),
        direction(direction) {}
  int node;
  double kappa;
  std::string direction;
};

// A graph left the open hemisphere around its center (u >= pi/2).
class HemisphereExit : public std::runtime_error {
 public:
  HemisphereExit(int node, double u)
      : std::runtime_error("graph leaves hemisphere at node " +
                           std::to_string(node) +
                           " (u = " + std::to_string(u) + ")"),
        node(node),
        u(u) {}
  int node;
  double u;
};

// Time stepper could not complete (dt underflow, step budget, replay failure).
class IntegratorFailure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed scenario configuration or unreadable input file.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sphereflow
