#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sphereflow {

inline constexpr int kMaxDim = 8;

// Point in the positive cone: n principal curvatures, all strictly positive.
class CurvatureVector {
 public:
  CurvatureVector(std::initializer_list<double> entries);
  explicit CurvatureVector(std::span<const double> entries);
  static CurvatureVector filled(int n, double value);

  int n() const { return n_; }
  double operator[](int i) const { return k_[static_cast<std::size_t>(i)]; }
  const double* data() const { return k_.data(); }

  double sum() const;
  double min() const;
  double max() const;

 private:
  CurvatureVector() = default;
  void validate() const;
  std::array<double, kMaxDim> k_{};
  int n_ = 0;
};

enum class CurvKind { Mean, Sigma, Quotient };

// Symmetric, monotone, degree-one homogeneous curvature function, normalized
// to 1 at the umbilic point.  Wrapping in inverse() evaluates the reciprocal
// function F~(k) = 1/F(1/k); a double inverse collapses back at construction.
class FunctionSpec {
 public:
  static FunctionSpec mean();              // arithmetic mean H/n
  static FunctionSpec sigma(int k);        // k-th root of normalized H_k, k >= 2
  static FunctionSpec quotient(int k);     // H_{k+1}/H_k, k >= 1
  static FunctionSpec inverse(const FunctionSpec& inner);

  CurvKind kind() const { return kind_; }
  int k() const { return k_; }
  bool inverted() const { return inverted_; }
  std::string name() const;

  // k ranges depend on the ambient dimension and are only checkable here.
  void validate_for_dimension(int n) const;

  bool operator==(const FunctionSpec&) const = default;

 private:
  FunctionSpec(CurvKind kind, int k, bool inverted);
  CurvKind kind_;
  int k_;
  bool inverted_;
};

struct EvalResult {
  double value = 0.0;
  std::vector<double> gradient;  // n entries
  std::vector<double> hessian;   // n*n, row-major, symmetric
};

// Value and gradient only; allocation-free hot path for the flow stepper.
struct ValueGrad {
  double value = 0.0;
  std::array<double, kMaxDim> gradient{};
  int n = 0;
};

struct ConcavityVerdict {
  std::vector<double> eigenvalues;  // ascending
  int null_multiplicity = 0;
  bool is_strictly_concave_at_point = false;
};

struct PinchZ {
  double z = 0.0;
  double lower_bound = 0.0;
};

// Normalized elementary symmetric mean: e_k(kappa) / C(n, k).
double elem_sym(const CurvatureVector& kappa, int k);

// Unnormalized e_k over the entries whose 0-based indices are NOT in
// `excluded` (at most two exclusions; the derivative recurrences need no more).
double elem_sym_deleted(const CurvatureVector& kappa, int k,
                        std::span<const int> excluded);

// Exact value / gradient / Hessian by chain rule through the representation.
EvalResult evaluate(const FunctionSpec& spec, const CurvatureVector& kappa);
ValueGrad evaluate_vg(const FunctionSpec& spec, const CurvatureVector& kappa);

// Eigen-decomposes the Hessian.  Eigenvalues within tol * spectral_radius of
// zero count as the null band; strict concavity at the point means null
// multiplicity exactly one (the homogeneity direction kappa) with every other
// eigenvalue strictly below -tol * spectral_radius.
ConcavityVerdict check_strict_concavity(const FunctionSpec& spec,
                                        const CurvatureVector& kappa,
                                        double tol = 1e-8);

// Residual R(xi) of the concavity inequality for the (k+1)-th elementary
// symmetric polynomial (unnormalized convention; the inequality is invariant
// under the normalization rescaling):
//   R = (1 - 1/(k+1)) e_{k+1}^{-1} (e_{k+1,i} xi^i)^2 - e_{k+1,ij} xi^i xi^j.
// Nonnegative on the positive cone; zero iff xi is parallel to kappa.
double esym_concavity_residual(const CurvatureVector& kappa, int k,
                      std::span<const double> xi);

// Hessian bound matrix for inverse specs (class-(K) functions):
//   B_ij = F^{-1} F_i F_j - F_i kappa_i^{-1} delta_ij - F_ij,
// positive semidefinite with kappa in its kernel.  Returns B row-major.
// Only Inverse(SigmaK) / Inverse(Mean) qualify; anything else is an error.
std::vector<double> check_classK_bound(const FunctionSpec& spec,
                                       const CurvatureVector& kappa);

// Z = F h^3 - |A|^2 F^ij h_ki h^k_j in the diagonal frame, rearranged to
//   Z = sum_{i != j} F_i k_i k_j (k_j^2 - k_i k_j),
// plus the calibrated pinching lower bound eps * H^2 * sum_{i<j}(k_i - k_j)^2.
// eps is half the smallest sampled ratio over a deterministic pinched sample
// set (10^4 draws, cached per spec/eps0/n).  Requires k_min >= eps0 * sum(k).
PinchZ check_pinch_Z(const FunctionSpec& spec, const CurvatureVector& kappa,
                     double eps0);

// Finite-difference oracle: gradient and Hessian from value evaluations only
// (fourth-order central stencils, spacing h).  Needs kappa_min > 2h.
EvalResult fd_oracle(const FunctionSpec& spec, const CurvatureVector& kappa,
                     double h);

// Ascending eigenvalues of a dense symmetric matrix (row-major, n <= kMaxDim).
std::vector<double> sym_eigenvalues(std::span<const double> m, int n);

}  // namespace sphereflow
