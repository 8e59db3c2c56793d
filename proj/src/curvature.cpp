#include "sphereflow/curvature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "sphereflow/rng.hpp"

namespace sphereflow {

namespace {

constexpr double kBinom[kMaxDim + 1][kMaxDim + 1] = {
    {1, 0, 0, 0, 0, 0, 0, 0, 0},       {1, 1, 0, 0, 0, 0, 0, 0, 0},
    {1, 2, 1, 0, 0, 0, 0, 0, 0},       {1, 3, 3, 1, 0, 0, 0, 0, 0},
    {1, 4, 6, 4, 1, 0, 0, 0, 0},       {1, 5, 10, 10, 5, 1, 0, 0, 0},
    {1, 6, 15, 20, 15, 6, 1, 0, 0},    {1, 7, 21, 35, 35, 21, 7, 1, 0},
    {1, 8, 28, 56, 70, 56, 28, 8, 1}};

// Unnormalized e_k over the entries not masked out.  The product expansion
// recurrence keeps everything in terms of sums of positive products, so no
// cancellation on the positive cone.
double esym_raw(const double* kappa, int n, int k, unsigned excluded_mask) {
  if (k < 0) return 0.0;
  std::array<double, kMaxDim + 1> e{};
  e[0] = 1.0;
  int m = 0;
  for (int i = 0; i < n; ++i) {
    if (excluded_mask & (1u << i)) continue;
    ++m;
    for (int j = std::min(k, m); j >= 1; --j) e[j] += kappa[i] * e[j - 1];
  }
  return k <= m ? e[k] : 0.0;
}

struct RawEval {
  double value = 0.0;
  std::array<double, kMaxDim> grad{};
  std::array<double, kMaxDim * kMaxDim> hess{};
};

// Value/gradient/Hessian of the non-inverted kinds.  want_hess skips the
// second-order recurrences on the stepper's hot path.
RawEval eval_base(CurvKind kind, int k, const double* kappa, int n,
                  bool want_hess) {
  RawEval out;
  auto H = [&](int ord) {
    return esym_raw(kappa, n, ord, 0u) / kBinom[n][ord];
  };
  auto Hd1 = [&](int ord, int i) {
    return esym_raw(kappa, n, ord, 1u << i) / kBinom[n][ord + 1];
  };
  auto Hd2 = [&](int ord, int i, int j) {
    return esym_raw(kappa, n, ord, (1u << i) | (1u << j)) / kBinom[n][ord + 2];
  };

  switch (kind) {
    case CurvKind::Mean: {
      out.value = esym_raw(kappa, n, 1, 0u) / n;
      for (int i = 0; i < n; ++i) out.grad[i] = 1.0 / n;
      break;
    }
    case CurvKind::Sigma: {
      const double h = H(k);
      const double a = 1.0 / k;
      out.value = std::pow(h, a);
      const double c1 = a * std::pow(h, a - 1.0);
      std::array<double, kMaxDim> hg{};
      for (int i = 0; i < n; ++i) {
        hg[i] = Hd1(k - 1, i);
        out.grad[i] = c1 * hg[i];
      }
      if (want_hess) {
        const double c2 = a * (a - 1.0) * std::pow(h, a - 2.0);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double hij = (i == j) ? 0.0 : Hd2(k - 2, i, j);
            out.hess[i * n + j] = c2 * hg[i] * hg[j] + c1 * hij;
          }
      }
      break;
    }
    case CurvKind::Quotient: {
      const double A = H(k + 1), B = H(k);
      out.value = A / B;
      std::array<double, kMaxDim> Ag{}, Bg{};
      for (int i = 0; i < n; ++i) {
        Ag[i] = Hd1(k, i);
        Bg[i] = Hd1(k - 1, i);
        out.grad[i] = Ag[i] / B - A * Bg[i] / (B * B);
      }
      if (want_hess) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double Aij = (i == j) ? 0.0 : Hd2(k - 1, i, j);
            const double Bij = (i == j) ? 0.0 : Hd2(k - 2, i, j);
            out.hess[i * n + j] = Aij / B - Ag[i] * Bg[j] / (B * B) -
                                  Ag[j] * Bg[i] / (B * B) -
                                  A * Bij / (B * B) +
                                  2.0 * A * Bg[i] * Bg[j] / (B * B * B);
          }
      }
      break;
    }
  }
  return out;
}

// Reciprocal-coordinate composition F~(k) = 1/G(1/k) by chain rule.
RawEval eval_spec_raw(const FunctionSpec& spec, const double* kappa, int n,
                      bool want_hess) {
  if (!spec.inverted()) return eval_base(spec.kind(), spec.k(), kappa, n, want_hess);

  std::array<double, kMaxDim> y{};
  for (int i = 0; i < n; ++i) y[i] = 1.0 / kappa[i];
  const RawEval g = eval_base(spec.kind(), spec.k(), y.data(), n, want_hess);

  RawEval out;
  const double G = g.value;
  out.value = 1.0 / G;
  const double iG2 = 1.0 / (G * G);
  for (int i = 0; i < n; ++i) out.grad[i] = g.grad[i] * y[i] * y[i] * iG2;
  if (want_hess) {
    const double iG3 = iG2 / G;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double yij = y[i] * y[i] * y[j] * y[j];
        double hij = 2.0 * iG3 * g.grad[i] * g.grad[j] * yij -
                     iG2 * g.hess[i * n + j] * yij;
        if (i == j) hij -= 2.0 * iG2 * g.grad[i] * y[i] * y[i] * y[i];
        out.hess[i * n + j] = hij;
      }
  }
  return out;
}

}  // namespace

CurvatureVector::CurvatureVector(std::initializer_list<double> entries) {
  n_ = static_cast<int>(entries.size());
  std::copy(entries.begin(), entries.end(), k_.begin());
  validate();
}

CurvatureVector::CurvatureVector(std::span<const double> entries) {
  n_ = static_cast<int>(entries.size());
  std::copy(entries.begin(), entries.end(), k_.begin());
  validate();
}

CurvatureVector CurvatureVector::filled(int n, double value) {
  if (n < 1 || n > kMaxDim)
    throw std::invalid_argument("curvature dimension out of range");
  CurvatureVector k;
  k.n_ = n;
  std::fill_n(k.k_.begin(), n, value);
  k.validate();
  return k;
}

void CurvatureVector::validate() const {
  if (n_ < 1 || n_ > kMaxDim)
    throw std::invalid_argument("curvature dimension out of range");
  for (int i = 0; i < n_; ++i)
    if (!(k_[static_cast<std::size_t>(i)] > 0.0) ||
        !std::isfinite(k_[static_cast<std::size_t>(i)]))
      throw std::domain_error("curvature vector must lie in the positive cone");
}

double CurvatureVector::sum() const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += k_[static_cast<std::size_t>(i)];
  return s;
}

double CurvatureVector::min() const {
  return *std::min_element(k_.begin(), k_.begin() + n_);
}

double CurvatureVector::max() const {
  return *std::max_element(k_.begin(), k_.begin() + n_);
}

FunctionSpec::FunctionSpec(CurvKind kind, int k, bool inverted)
    : kind_(kind), k_(k), inverted_(inverted) {}

FunctionSpec FunctionSpec::mean() { return {CurvKind::Mean, 1, false}; }

FunctionSpec FunctionSpec::sigma(int k) {
  if (k < 2 || k > kMaxDim)
    throw std::invalid_argument("sigma_k requires 2 <= k <= 8");
  return {CurvKind::Sigma, k, false};
}

FunctionSpec FunctionSpec::quotient(int k) {
  if (k < 1 || k > kMaxDim - 1)
    throw std::invalid_argument("quotient Q_k requires 1 <= k <= 7");
  return {CurvKind::Quotient, k, false};
}

FunctionSpec FunctionSpec::inverse(const FunctionSpec& inner) {
  return {inner.kind_, inner.k_, !inner.inverted_};
}

std::string FunctionSpec::name() const {
  std::string base;
  switch (kind_) {
    case CurvKind::Mean: base = "mean"; break;
    case CurvKind::Sigma: base = "sigma" + std::to_string(k_); break;
    case CurvKind::Quotient: base = "q" + std::to_string(k_); break;
  }
  return inverted_ ? "inv_" + base : base;
}

void FunctionSpec::validate_for_dimension(int n) const {
  if (n < 1 || n > kMaxDim)
    throw std::invalid_argument("curvature dimension out of range");
  if (kind_ == CurvKind::Sigma && k_ > n)
    throw std::invalid_argument("sigma_k requires k <= n");
  if (kind_ == CurvKind::Quotient && k_ > n - 1)
    throw std::invalid_argument("quotient Q_k requires k <= n-1");
}

double elem_sym(const CurvatureVector& kappa, int k) {
  if (k < 0 || k > kappa.n())
    throw std::invalid_argument("elem_sym order out of range");
  return esym_raw(kappa.data(), kappa.n(), k, 0u) / kBinom[kappa.n()][k];
}

double elem_sym_deleted(const CurvatureVector& kappa, int k,
                        std::span<const int> excluded) {
  if (excluded.size() > 2)
    throw std::invalid_argument("at most two indices may be excluded");
  unsigned mask = 0;
  for (int i : excluded) {
    if (i < 0 || i >= kappa.n())
      throw std::invalid_argument("excluded index out of range");
    if (mask & (1u << i))
      throw std::invalid_argument("excluded indices must be distinct");
    mask |= 1u << i;
  }
  const int remaining = kappa.n() - static_cast<int>(excluded.size());
  if (k < 0 || k > remaining)
    throw std::invalid_argument("elem_sym_deleted order out of range");
  return esym_raw(kappa.data(), kappa.n(), k, mask);
}

EvalResult evaluate(const FunctionSpec& spec, const CurvatureVector& kappa) {
  spec.validate_for_dimension(kappa.n());
  const int n = kappa.n();
  const RawEval raw = eval_spec_raw(spec, kappa.data(), n, true);
  EvalResult out;
  out.value = raw.value;
  out.gradient.assign(raw.grad.begin(), raw.grad.begin() + n);
  out.hessian.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.hessian[static_cast<std::size_t>(i) * n + j] = raw.hess[i * n + j];
  return out;
}

ValueGrad evaluate_vg(const FunctionSpec& spec, const CurvatureVector& kappa) {
  spec.validate_for_dimension(kappa.n());
  const RawEval raw = eval_spec_raw(spec, kappa.data(), kappa.n(), false);
  ValueGrad out;
  out.value = raw.value;
  out.gradient = raw.grad;
  out.n = kappa.n();
  return out;
}

std::vector<double> sym_eigenvalues(std::span<const double> m, int n) {
  if (n < 1 || n > kMaxDim || static_cast<int>(m.size()) != n * n)
    throw std::invalid_argument("bad matrix dimensions");
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = m[static_cast<std::size_t>(i) * n + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("symmetric eigensolver failed to converge");
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
  return ev;
}

ConcavityVerdict check_strict_concavity(const FunctionSpec& spec,
                                        const CurvatureVector& kappa,
                                        double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const EvalResult e = evaluate(spec, kappa);
  ConcavityVerdict v;
  v.eigenvalues = sym_eigenvalues(e.hessian, kappa.n());
  double radius = 0.0;
  for (double ev : v.eigenvalues) radius = std::max(radius, std::abs(ev));
  const double band = tol * radius;
  bool others_negative = true;
  for (double ev : v.eigenvalues) {
    if (std::abs(ev) <= band)
      ++v.null_multiplicity;
    else if (ev >= -band)
      others_negative = false;
  }
  v.is_strictly_concave_at_point = (v.null_multiplicity == 1) && others_negative;
  return v;
}

double esym_concavity_residual(const CurvatureVector& kappa, int k,
                      std::span<const double> xi) {
  const int n = kappa.n();
  if (k < 0 || k + 1 > n)
    throw std::invalid_argument("inequality order requires 1 <= k+1 <= n");
  if (static_cast<int>(xi.size()) != n)
    throw std::invalid_argument("test direction has wrong dimension");
  double norm2 = 0.0;
  for (double x : xi) norm2 += x * x;
  if (!(norm2 > 0.0))
    throw std::invalid_argument("test direction must be nonzero");

  const double* kp = kappa.data();
  const double e = esym_raw(kp, n, k + 1, 0u);
  double gxi = 0.0;
  for (int i = 0; i < n; ++i) gxi += esym_raw(kp, n, k, 1u << i) * xi[i];
  double quad = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      quad += esym_raw(kp, n, k - 1, (1u << i) | (1u << j)) * xi[i] * xi[j];
    }
  return (1.0 - 1.0 / (k + 1)) * gxi * gxi / e - quad;
}

std::vector<double> check_classK_bound(const FunctionSpec& spec,
                                       const CurvatureVector& kappa) {
  if (!spec.inverted() || spec.kind() == CurvKind::Quotient)
    throw std::invalid_argument(
        "class-(K) bound applies to inverse(mean) and inverse(sigma_k) only");
  const int n = kappa.n();
  const EvalResult e = evaluate(spec, kappa);
  std::vector<double> b(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double bij = e.gradient[static_cast<std::size_t>(i)] *
                   e.gradient[static_cast<std::size_t>(j)] / e.value;
      if (i == j) bij -= e.gradient[static_cast<std::size_t>(i)] / kappa[i];
      bij -= e.hessian[static_cast<std::size_t>(i) * n + j];
      b[static_cast<std::size_t>(i) * n + j] = bij;
    }
  return b;
}

namespace {

// Z in the diagonal frame after the pairwise rearrangement.  H below is the
// trace sum(kappa), matching the unnormalized convention of the bound.
double pinch_numerator(const FunctionSpec& spec, const CurvatureVector& kappa) {
  const ValueGrad vg = evaluate_vg(spec, kappa);
  const int n = kappa.n();
  double z = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      z += vg.gradient[static_cast<std::size_t>(i)] * kappa[i] * kappa[j] *
           (kappa[j] * kappa[j] - kappa[i] * kappa[j]);
    }
  return z;
}

double pair_spread(const CurvatureVector& kappa) {
  double s = 0.0;
  for (int i = 0; i < kappa.n(); ++i)
    for (int j = i + 1; j < kappa.n(); ++j) {
      const double d = kappa[i] - kappa[j];
      s += d * d;
    }
  return s;
}

double calibrated_eps(const FunctionSpec& spec, int n, double eps0) {
  using Key = std::tuple<int, int, bool, int, std::uint64_t>;
  static std::map<Key, double> cache;
  static std::mutex mu;
  const Key key{static_cast<int>(spec.kind()), spec.k(), spec.inverted(), n,
                std::bit_cast<std::uint64_t>(eps0)};
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  Xoshiro256pp rng(0x5eedULL ^ std::get<4>(key) ^
                   (static_cast<std::uint64_t>(std::get<0>(key)) << 32) ^
                   (static_cast<std::uint64_t>(std::get<1>(key)) << 40) ^
                   (static_cast<std::uint64_t>(n) << 48) ^
                   (std::get<2>(key) ? 1ull << 56 : 0ull));
  constexpr int kWanted = 10000;
  constexpr long kMaxAttempts = 10000000;
  int kept = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  std::array<double, kMaxDim> draw{};
  for (long attempt = 0; attempt < kMaxAttempts && kept < kWanted; ++attempt) {
    double sum = 0.0, mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      draw[static_cast<std::size_t>(i)] = rng.log_uniform(0.1, 10.0);
      sum += draw[static_cast<std::size_t>(i)];
      mn = std::min(mn, draw[static_cast<std::size_t>(i)]);
    }
    if (mn < eps0 * sum) continue;
    const CurvatureVector kv(std::span<const double>(draw.data(),
                                                     static_cast<std::size_t>(n)));
    const double spread = pair_spread(kv);
    const double h2 = sum * sum;
    if (spread <= 1e-10 * h2) continue;  // too close to umbilic for the ratio
    const double ratio = pinch_numerator(spec, kv) / (h2 * spread);
    min_ratio = std::min(min_ratio, ratio);
    ++kept;
  }
  if (kept < 100)
    throw std::runtime_error("pinching calibration could not draw enough samples");
  const double eps = 0.5 * min_ratio;

  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, eps);
  return eps;
}

}  // namespace

PinchZ check_pinch_Z(const FunctionSpec& spec, const CurvatureVector& kappa,
                     double eps0) {
  spec.validate_for_dimension(kappa.n());
  if (!(eps0 > 0.0) || eps0 > 1.0 / kappa.n())
    throw std::invalid_argument("pinching parameter must satisfy 0 < eps0 <= 1/n");
  if (kappa.min() < eps0 * kappa.sum())
    throw std::domain_error("curvature vector is outside the pinched cone");
  PinchZ out;
  out.z = pinch_numerator(spec, kappa);
  const double eps = calibrated_eps(spec, kappa.n(), eps0);
  const double h = kappa.sum();
  out.lower_bound = eps * h * h * pair_spread(kappa);
  return out;
}

EvalResult fd_oracle(const FunctionSpec& spec, const CurvatureVector& kappa,
                     double h) {
  spec.validate_for_dimension(kappa.n());
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  if (kappa.min() <= 2.0 * h)
    throw std::domain_error("finite-difference stencil leaves the positive cone");
  const int n = kappa.n();

  auto value_at = [&](std::array<double, kMaxDim> k) {
    const CurvatureVector kv(std::span<const double>(k.data(),
                                                     static_cast<std::size_t>(n)));
    return eval_spec_raw(spec, kv.data(), n, false).value;
  };
  std::array<double, kMaxDim> base{};
  for (int i = 0; i < n; ++i) base[static_cast<std::size_t>(i)] = kappa[i];

  EvalResult out;
  out.value = value_at(base);
  out.gradient.resize(static_cast<std::size_t>(n));
  out.hessian.resize(static_cast<std::size_t>(n) * n);

  // offsets and weights of the fourth-order first-derivative stencil
  constexpr int off[4] = {-2, -1, 1, 2};
  constexpr double w[4] = {1.0, -8.0, 8.0, -1.0};

  for (int i = 0; i < n; ++i) {
    auto shift = [&](int steps) {
      auto k = base;
      k[static_cast<std::size_t>(i)] += steps * h;
      return value_at(k);
    };
    out.gradient[static_cast<std::size_t>(i)] =
        (-shift(2) + 8.0 * shift(1) - 8.0 * shift(-1) + shift(-2)) / (12.0 * h);
    out.hessian[static_cast<std::size_t>(i) * n + i] =
        (-shift(2) + 16.0 * shift(1) - 30.0 * out.value + 16.0 * shift(-1) -
         shift(-2)) /
        (12.0 * h * h);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          auto k = base;
          k[static_cast<std::size_t>(i)] += off[a] * h;
          k[static_cast<std::size_t>(j)] += off[b] * h;
          acc += w[a] * w[b] * value_at(k);
        }
      const double mixed = acc / (144.0 * h * h);
      out.hessian[static_cast<std::size_t>(i) * n + j] = mixed;
      out.hessian[static_cast<std::size_t>(j) * n + i] = mixed;
    }
  return out;
}

}  // namespace sphereflow
