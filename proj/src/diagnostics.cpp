#include "sphereflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sphereflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Geodesic distance from the axis point at signed arc s to the node (u, theta).
double axis_distance(double s, double u, double cos_theta) {
  const double c = std::cos(s) * std::cos(u) + std::sin(s) * std::sin(u) * cos_theta;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// Golden-section minimizer over [a, b] for a unimodal objective.
template <typename F>
double golden_min(F f, double a, double b) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::pair<double, double> tracefree_identity(const CurvatureVector& kappa) {
  const int n = kappa.n();
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += kappa[i];
    sumsq += kappa[i] * kappa[i];
  }
  const double lhs = sumsq - sum * sum / n;
  double rhs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = kappa[i] - kappa[j];
      rhs += d * d;
    }
  return {lhs, rhs / n};
}

std::pair<double, double> radii_estimates(const GraphFunction& g) {
  const AxiGrid& grid = g.grid();
  std::vector<double> cos_theta(g.u().size());
  for (int j = 0; j <= grid.N; ++j)
    cos_theta[static_cast<std::size_t>(j)] = std::cos(grid.theta(j));

  const auto max_dist = [&](double s) {
    double m = 0.0;
    for (std::size_t j = 0; j < g.u().size(); ++j)
      m = std::max(m, axis_distance(s, g.u()[j], cos_theta[j]));
    return m;
  };
  const auto neg_min_dist = [&](double s) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < g.u().size(); ++j)
      m = std::min(m, axis_distance(s, g.u()[j], cos_theta[j]));
    return -m;
  };

  const double a = -g.u().back() + 1e-9;
  const double b = g.u().front() - 1e-9;
  const double s_out = golden_min(max_dist, a, b);
  const double s_in = golden_min(neg_min_dist, a, b);
  return {-neg_min_dist(s_in), max_dist(s_out)};
}

DiagnosticsRecord snapshot_diagnostics(const GraphFunction& g,
                                       const FunctionSpec& spec, double t,
                                       double tstar, FlowDirection direction,
                                       const std::vector<double>& sigmas) {
  const GeometryFields geo = shape_operator(g, spec);
  DiagnosticsRecord rec;
  rec.t = t;
  rec.theta = spherical_theta(t, tstar);
  rec.tau = -std::log(rec.theta);
  rec.u_min = g.u_min();
  rec.u_max = g.u_max();

  const int n = geo.n;
  double klo = geo.kappa_profile[0], khi = geo.kappa_profile[0];
  rec.tracefree = 0.0;
  rec.Ftilde_min = std::numeric_limits<double>::infinity();
  rec.Ftilde_max = 0.0;
  rec.f_sigma.assign(sigmas.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < g.u().size(); ++j) {
    klo = std::min(klo, geo.kappa_profile[j]);
    khi = std::max(khi, geo.kappa_profile[j]);
    if (n > 1) {
      klo = std::min(klo, geo.kappa_orbit[j]);
      khi = std::max(khi, geo.kappa_orbit[j]);
    }
    rec.tracefree =
        std::max(rec.tracefree, geo.normA2[j] - geo.H[j] * geo.H[j] / n);
    const double ft = rec.theta * geo.F[j];
    rec.Ftilde_min = std::min(rec.Ftilde_min, ft);
    rec.Ftilde_max = std::max(rec.Ftilde_max, ft);
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
      const double fs = std::pow(geo.F[j], sigmas[k] - 2.0) *
                        (geo.normA2[j] - n * geo.F[j] * geo.F[j]);
      rec.f_sigma[k] = std::max(rec.f_sigma[k], fs);
    }
  }
  rec.pinch_ratio = khi / klo;

  if (direction == FlowDirection::Contracting) {
    rec.u_rescaled_dev = 0.0;
    for (double uj : g.u())
      rec.u_rescaled_dev =
          std::max(rec.u_rescaled_dev, std::abs(uj / rec.theta - 1.0));
    rec.w_min = kNaN;
    rec.w_max = kNaN;
  } else {
    rec.u_rescaled_dev = kNaN;
    rec.w_min = std::numeric_limits<double>::infinity();
    rec.w_max = 0.0;
    for (double uj : g.u()) {
      const double w = (kPi / 2.0 - uj) / rec.theta;
      rec.w_min = std::min(rec.w_min, w);
      rec.w_max = std::max(rec.w_max, w);
    }
  }

  const auto [rin, rout] = radii_estimates(g);
  rec.rho_minus = rin;
  rec.rho_plus = rout;
  return rec;
}

DecayFit fit_decay(const std::vector<double>& tau,
                   const std::vector<double>& value, double tau_lo,
                   double tau_hi) {
  if (tau.size() != value.size())
    throw std::invalid_argument("decay fit needs matching samples");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (tau[i] >= tau_lo && tau[i] <= tau_hi && value[i] > 0.0) {
      xs.push_back(tau[i]);
      ys.push_back(std::log(value[i]));
    }
  if (xs.size() < 8)
    throw std::invalid_argument("decay fit needs at least 8 usable samples");

  const double m = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = m * sxx - sx * sx;
  if (!(std::abs(det) > 0.0))
    throw std::invalid_argument("decay fit abscissae are degenerate");
  const double slope = (m * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / m;

  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (slope * xs[i] + intercept);
    ss += r * r;
  }
  DecayFit fit;
  fit.rate = -slope;
  fit.intercept = intercept;
  fit.rms_residual = std::sqrt(ss / m);
  fit.tau_lo = xs.front();
  fit.tau_hi = xs.back();
  fit.points = static_cast<int>(xs.size());
  return fit;
}

std::pair<double, double> default_fit_window(const std::vector<double>& tau,
                                             const std::vector<double>& value) {
  if (tau.size() != value.size())
    throw std::invalid_argument("fit window needs matching samples");
  const double floor = 1e3 * std::numeric_limits<double>::epsilon();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (value[i] > floor) {
      lo = std::min(lo, tau[i]);
      hi = std::max(hi, tau[i]);
    }
  if (!(hi > lo))
    throw std::invalid_argument("no usable samples above the noise floor");
  return {hi - 0.6 * (hi - lo), hi};
}

}  // namespace sphereflow
