#pragma once

// Real potentials on the surface, given either as a polynomial in the
// ambient coordinates (x1, x2, x3) restricted to the chart immersion, or as
// a finite list of spherical-harmonic coefficients obeying the reality
// constraint c_{l,-m} = (-1)^m conj(c_{l,m}).

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "zoll/geometry.hpp"
#include "zoll/spherical.hpp"

namespace zoll {

struct MonomialTerm {
  int i = 0, j = 0, k = 0;  // powers of x1, x2, x3
  double coeff = 0.0;
};

class Potential {
 public:
  enum class Kind { Ambient, Harmonic };

  static Potential constant(double c) { return ambient({{0, 0, 0, c}}); }

  static Potential ambient(std::vector<MonomialTerm> terms) {
    Potential v;
    v.kind_ = Kind::Ambient;
    v.terms_ = std::move(terms);
    for (const auto& t : v.terms_)
      if (t.i < 0 || t.j < 0 || t.k < 0)
        throw std::invalid_argument("Potential: negative monomial power");
    return v;
  }

  // coeffs indexed by l^2 + l + m for l <= lmax, |m| <= l.
  static Potential harmonic(int lmax, std::vector<std::complex<double>> coeffs) {
    if (coeffs.size() != static_cast<std::size_t>((lmax + 1) * (lmax + 1)))
      throw std::invalid_argument("Potential: harmonic coefficient count");
    for (int l = 0; l <= lmax; ++l)
      for (int m = 0; m <= l; ++m) {
        std::complex<double> a = coeffs[l * l + l + m];
        std::complex<double> b = coeffs[l * l + l - m];
        double sign = (m % 2 == 0) ? 1.0 : -1.0;
        if (std::abs(b - sign * std::conj(a)) > 1e-12)
          throw std::invalid_argument("Potential: harmonic coefficients violate reality");
      }
    Potential v;
    v.kind_ = Kind::Harmonic;
    v.lmax_ = lmax;
    v.coeffs_ = std::move(coeffs);
    return v;
  }

  static Potential x3() { return ambient({{0, 0, 1, 1.0}}); }
  static Potential x3_squared() { return ambient({{0, 0, 2, 1.0}}); }

  double operator()(double theta, double phi) const {
    if (kind_ == Kind::Ambient) {
      Vec3 x = position_ambient(theta, phi);
      double acc = 0.0;
      for (const auto& t : terms_)
        acc += t.coeff * ipow(x.x, t.i) * ipow(x.y, t.j) * ipow(x.z, t.k);
      return acc;
    }
    // Harmonic sum; m > 0 pairs combine to 2 Re(c Y).
    double c = std::cos(theta);
    double acc = 0.0;
    std::vector<double> col(lmax_ + 1);
    for (int m = 0; m <= lmax_; ++m) {
      legendre_column(lmax_, m, c, col.data());
      std::complex<double> em{std::cos(m * phi), std::sin(m * phi)};
      for (int l = m; l <= lmax_; ++l) {
        std::complex<double> term = coeffs_[l * l + l + m] * (col[l - m] * kInvSqrt2Pi) * em;
        acc += (m == 0) ? term.real() : 2.0 * term.real();
      }
    }
    return acc;
  }

  double operator()(const PhasePoint& r) const { return (*this)(r.theta, r.phi); }

  Kind kind() const { return kind_; }

  // Syntactic check: no phi dependence.
  bool axisymmetric() const {
    if (kind_ == Kind::Ambient) {
      for (const auto& t : terms_)
        if ((t.i != 0 || t.j != 0) && t.coeff != 0.0) return false;
      return true;
    }
    for (int l = 0; l <= lmax_; ++l)
      for (int m = -l; m <= l; ++m)
        if (m != 0 && std::abs(coeffs_[l * l + l + m]) != 0.0) return false;
    return true;
  }

  // Odd under the antipodal map x -> -x.
  bool odd() const {
    if (kind_ == Kind::Ambient) {
      for (const auto& t : terms_)
        if ((t.i + t.j + t.k) % 2 == 0 && t.coeff != 0.0) return false;
      return true;
    }
    for (int l = 0; l <= lmax_; ++l)
      if (l % 2 == 0)
        for (int m = -l; m <= l; ++m)
          if (std::abs(coeffs_[l * l + l + m]) != 0.0) return false;
    return true;
  }

  int ambient_degree() const {
    if (kind_ == Kind::Ambient) {
      int d = 0;
      for (const auto& t : terms_)
        if (t.coeff != 0.0) d = std::max(d, t.i + t.j + t.k);
      return d;
    }
    return lmax_;  // Y_lm restricted to S^2 is a degree-l polynomial
  }

  const std::vector<MonomialTerm>& terms() const { return terms_; }
  int harmonic_lmax() const { return lmax_; }
  const std::vector<std::complex<double>>& harmonic_coefficients() const { return coeffs_; }

 private:
  static double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
  }

  Kind kind_ = Kind::Ambient;
  std::vector<MonomialTerm> terms_;
  int lmax_ = -1;
  std::vector<std::complex<double>> coeffs_;
};

}  // namespace zoll
