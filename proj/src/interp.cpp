#include "sphereflow/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sphereflow {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t m = x_.size();
  if (m < 4 || y_.size() != m)
    throw std::invalid_argument("spline needs matching tables, length >= 4");
  for (std::size_t i = 0; i + 1 < m; ++i)
    if (!(x_[i + 1] > x_[i]))
      throw std::invalid_argument("spline abscissae must increase");

  std::vector<double> h(m - 1), s(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    h[i] = x_[i + 1] - x_[i];
    s[i] = (y_[i + 1] - y_[i]) / h[i];
  }

  // Tridiagonal system for the interior second derivatives, with the
  // not-a-knot conditions folded into the first and last rows.
  const std::size_t k = m - 2;
  std::vector<double> a(k, 0.0), b(k, 0.0), c(k, 0.0), r(k, 0.0);
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t row = i - 1;
    a[row] = h[i - 1];
    b[row] = 2.0 * (h[i - 1] + h[i]);
    c[row] = h[i];
    r[row] = 6.0 * (s[i] - s[i - 1]);
  }
  // M0 = ((h0 + h1) M1 - h0 M2) / h1
  b[0] += a[0] * (h[0] + h[1]) / h[1];
  c[0] -= a[0] * h[0] / h[1];
  a[0] = 0.0;
  // M_{m-1} = ((h_{m-2} + h_{m-3}) M_{m-2} - h_{m-2} M_{m-3}) / h_{m-3}
  b[k - 1] += c[k - 1] * (h[m - 2] + h[m - 3]) / h[m - 3];
  a[k - 1] -= c[k - 1] * h[m - 2] / h[m - 3];
  c[k - 1] = 0.0;

  for (std::size_t i = 1; i < k; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    r[i] -= w * r[i - 1];
  }
  std::vector<double> mi(k);
  mi[k - 1] = r[k - 1] / b[k - 1];
  for (std::size_t i = k - 1; i-- > 0;)
    mi[i] = (r[i] - c[i] * mi[i + 1]) / b[i];

  m_.assign(m, 0.0);
  for (std::size_t i = 0; i < k; ++i) m_[i + 1] = mi[i];
  m_[0] = ((h[0] + h[1]) * m_[1] - h[0] * m_[2]) / h[1];
  m_[m - 1] =
      ((h[m - 2] + h[m - 3]) * m_[m - 2] - h[m - 2] * m_[m - 3]) / h[m - 3];
}

int CubicSpline::interval(double xq) const {
  if (xq <= x_.front()) return 0;
  if (xq >= x_.back()) return static_cast<int>(x_.size()) - 2;
  const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
  return static_cast<int>(it - x_.begin()) - 1;
}

double CubicSpline::operator()(double xq) const {
  const double xc = std::clamp(xq, x_.front(), x_.back());
  const std::size_t i = static_cast<std::size_t>(interval(xc));
  const double h = x_[i + 1] - x_[i];
  const double dl = x_[i + 1] - xc, dr = xc - x_[i];
  return m_[i] * dl * dl * dl / (6.0 * h) + m_[i + 1] * dr * dr * dr / (6.0 * h) +
         (y_[i] / h - m_[i] * h / 6.0) * dl +
         (y_[i + 1] / h - m_[i + 1] * h / 6.0) * dr;
}

double CubicSpline::derivative(double xq) const {
  const double xc = std::clamp(xq, x_.front(), x_.back());
  const std::size_t i = static_cast<std::size_t>(interval(xc));
  const double h = x_[i + 1] - x_[i];
  const double dl = x_[i + 1] - xc, dr = xc - x_[i];
  return -m_[i] * dl * dl / (2.0 * h) + m_[i + 1] * dr * dr / (2.0 * h) -
         (y_[i] / h - m_[i] * h / 6.0) + (y_[i + 1] / h - m_[i + 1] * h / 6.0);
}

}  // namespace sphereflow
