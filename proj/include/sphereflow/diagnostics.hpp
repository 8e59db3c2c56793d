#pragma once

#include <utility>
#include <vector>

#include "sphereflow/curvature.hpp"
#include "sphereflow/flow.hpp"
#include "sphereflow/hypersurface.hpp"

namespace sphereflow {

// Per-snapshot scalar monitors of a flow, rescaled against the shrinking
// sphere Theta(t, tstar).  f_sigma carries one entry per configured sigma
// exponent.  w_min/w_max track (pi/2 - u)/Theta and are meaningful for
// expanding runs (NaN otherwise); u_rescaled_dev is the contracting
// counterpart max|u/Theta - 1| (NaN for expanding runs).
struct DiagnosticsRecord {
  double t = 0.0;
  double tau = 0.0;
  double theta = 0.0;
  double u_min = 0.0, u_max = 0.0;
  double pinch_ratio = 0.0;
  double tracefree = 0.0;            // max_j (|A|^2 - H^2/n)
  std::vector<double> f_sigma;       // max_j F^(sigma-2) (|A|^2 - n F^2)
  double Ftilde_min = 0.0, Ftilde_max = 0.0;  // range of F * Theta
  double u_rescaled_dev = 0.0;
  double w_min = 0.0, w_max = 0.0;
  double rho_minus = 0.0, rho_plus = 0.0;     // inradius / circumradius
};

struct DecayFit {
  double rate = 0.0;       // -slope of the log-linear fit
  double intercept = 0.0;
  double rms_residual = 0.0;
  double tau_lo = 0.0, tau_hi = 0.0;
  int points = 0;
};

// (|A|^2 - H^2/n,  (1/n) sum_{i<j} (kappa_i - kappa_j)^2) — equal identically.
std::pair<double, double> tracefree_identity(const CurvatureVector& kappa);

DiagnosticsRecord snapshot_diagnostics(const GraphFunction& g,
                                       const FunctionSpec& spec, double t,
                                       double tstar, FlowDirection direction,
                                       const std::vector<double>& sigmas = {0.0,
                                                                            0.1});

// Ordinary least squares of log(value) against tau over [tau_lo, tau_hi].
// Requires at least eight positive samples inside the window.
DecayFit fit_decay(const std::vector<double>& tau,
                   const std::vector<double>& value, double tau_lo,
                   double tau_hi);

// Window covering the last 60% of the tau range restricted to values above
// 1000 machine epsilons.
std::pair<double, double> default_fit_window(const std::vector<double>& tau,
                                             const std::vector<double>& value);

// Inradius and circumradius estimates over axis-centered candidate centers,
// located by golden-section search (tolerance 1e-10 in the center parameter).
std::pair<double, double> radii_estimates(const GraphFunction& g);

}  // namespace sphereflow
