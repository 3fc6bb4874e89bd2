#pragma once

// Fully normalized complex spherical harmonics with the Condon-Shortley
// phase.  Y_lm(theta, phi) = Theta_lm(cos theta) e^{i m phi} / sqrt(2 pi)
// where the Theta_lm are orthonormal on [-1, 1] in dc.  Computed with the
// standard three-term recurrence, stable for the degrees used here.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace zoll {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2 pi)

// Fills out[l - m] = Theta_lm(x) for l = m..lmax; requires m >= 0.
inline void legendre_column(int lmax, int m, double x, double* out) {
  if (m < 0 || lmax < m) throw std::invalid_argument("legendre_column: need 0 <= m <= lmax");
  double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  double pmm = 1.0 / std::sqrt(2.0);  // Theta_00
  for (int k = 1; k <= m; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  out[0] = pmm;
  if (lmax == m) return;
  double pm1 = std::sqrt(2.0 * m + 3.0) * x * pmm;
  out[1] = pm1;
  for (int l = m + 2; l <= lmax; ++l) {
    double a = std::sqrt((4.0 * l * l - 1.0) / (double(l - m) * double(l + m)));
    double b = std::sqrt((2.0 * l + 1.0) * double(l - 1 - m) * double(l - 1 + m) /
                         ((2.0 * l - 3.0) * double(l - m) * double(l + m)));
    double pl = a * x * out[l - 1 - m] - b * out[l - 2 - m];
    // a * x * P_{l-1} - b * P_{l-2} with orthonormal weights
    out[l - m] = pl;
  }
}

inline double normalized_legendre(int l, int m, double x) {
  int ma = std::abs(m);
  if (ma > l) throw std::invalid_argument("normalized_legendre: |m| <= l");
  std::vector<double> col(l - ma + 1);
  legendre_column(l, ma, x, col.data());
  double v = col[l - ma];
  if (m < 0 && (ma % 2 == 1)) v = -v;  // Theta_{l,-m} = (-1)^m Theta_{l,m}
  return v;
}

inline std::complex<double> spherical_harmonic(int l, int m, double theta, double phi) {
  double t = normalized_legendre(l, m, std::cos(theta)) * kInvSqrt2Pi;
  return {t * std::cos(m * phi), t * std::sin(m * phi)};
}

}  // namespace zoll
