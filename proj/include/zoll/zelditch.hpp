#pragma once

// Jacobi fields along closed unit-speed geodesics and the q0 invariant.
//
// Both scalar Jacobi solutions of  f'' + K(x(t)) f = 0  are integrated along
// the geodesic over one period [0, 2 pi], with initial data (1, 0) and
// (0, 1).  The invariant is
//
//   q0 = (1/8 pi) int_0^{2pi} K dt + (1/24 pi) int_0^{2pi} KK ft^2 R dt,
//   R(t) = ft(t) int_0^t KK f^3 ds - 3 f(t) int_0^t ft KK f^2 ds,
//
// where KK(x, xi) = g*(dK, xi_perp).  Inner integrals use a cumulative
// trapezoid on the shared grid.  Meridians of a surface of revolution cross
// both poles and run on the dedicated meridian branch, where KK vanishes
// identically (p_phi = 0 kills the dphi component of xi_perp).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "zoll/geodesic.hpp"
#include "zoll/geometry.hpp"

namespace zoll {

struct JacobiSolution {
  std::vector<double> t;    // uniform grid on [0, 2 pi], n + 1 points
  std::vector<double> ft;   // solution with (f(0), f'(0)) = (1, 0)
  std::vector<double> dft;
  std::vector<double> f;    // solution with (f(0), f'(0)) = (0, 1)
  std::vector<double> df;
  std::vector<double> k;    // K(x(t))
  std::vector<double> kk;   // KK(x(t), xi(t))
};

inline double curvature_at_c(const ZollSurface& s, double c) {
  double uu = s.u(c);
  return (uu - c * s.du(c)) / (uu * uu * uu);
}

namespace detail {

inline PhasePoint to_unit_speed(const ZollSurface& s, PhasePoint r) {
  double nn = std::sqrt(covector_norm_sq(s, r));
  if (nn <= 0.0) throw std::domain_error("jacobi_solve: zero covector");
  r.p_theta /= nn;
  r.p_phi /= nn;
  return r;
}

}  // namespace detail

// Integrates the geodesic and both Jacobi solutions over [0, 2 pi] with n
// uniform samples per period (n + 1 grid points).
inline JacobiSolution jacobi_solve(const ZollSurface& s, const PhasePoint& rho0, std::size_t n = 2048,
                                   double tol = 1e-10) {
  if (n < 64) throw std::invalid_argument("jacobi_solve: n >= 64");
  PhasePoint r0 = detail::to_unit_speed(s, rho0);
  JacobiSolution js;
  js.t.resize(n + 1);
  js.ft.resize(n + 1);
  js.dft.resize(n + 1);
  js.f.resize(n + 1);
  js.df.resize(n + 1);
  js.k.resize(n + 1);
  js.kk.resize(n + 1);
  const double h = kTwoPi / static_cast<double>(n);

  if (r0.p_phi == 0.0) {
    // Meridian branch: beta parametrization, cos(theta(beta)) = cos(beta).
    detail::MeridianState m = detail::meridian_from_point(s, r0);
    auto rhs = [&](double, const ode::State<5>& y) -> ode::State<5> {
      double kcurv = curvature_at_c(s, std::cos(y[0]));
      return {m.speed / s.u(std::cos(y[0])), y[2], -kcurv * y[1], y[4], -kcurv * y[3]};
    };
    ode::State<5> y{m.beta, 1.0, 0.0, 0.0, 1.0};
    for (std::size_t kidx = 0; kidx <= n; ++kidx) {
      js.t[kidx] = h * kidx;
      js.ft[kidx] = y[1];
      js.dft[kidx] = y[2];
      js.f[kidx] = y[3];
      js.df[kidx] = y[4];
      js.k[kidx] = curvature_at_c(s, std::cos(y[0]));
      js.kk[kidx] = 0.0;
      if (kidx < n) y = ode::integrate<5>(rhs, y, 0.0, h, tol);
    }
    return js;
  }

  // Generic chart branch with the Jacobi pair riding along; on the round
  // sphere the base point may switch to a rotated chart (K is constant
  // there, so the Jacobi data is unaffected).
  detail::ChartFlow base(s, r0, tol);
  ode::State<4> jac{1.0, 0.0, 0.0, 1.0};
  auto record = [&](std::size_t kidx) {
    js.t[kidx] = h * kidx;
    js.ft[kidx] = jac[0];
    js.dft[kidx] = jac[1];
    js.f[kidx] = jac[2];
    js.df[kidx] = jac[3];
    PhasePoint cur = detail::from_state(base.y);  // current-frame chart point
    js.k[kidx] = curvature(s, cur.theta);
    js.kk[kidx] = curvature_pairing(s, cur);
  };
  record(0);
  for (std::size_t kidx = 1; kidx <= n; ++kidx) {
    // One segment of the coupled system: reuse the chart flow for the base
    // and integrate the scalar pair against the moving curvature.
    auto rhs = [&](double, const ode::State<8>& y) -> ode::State<8> {
      if (std::sin(y[0]) < 1e-12) throw ode::step_failure("jacobi_solve: chart pole");
      detail::ChartCoeffs cc = detail::chart_coeffs(s, y[0], false);
      double kcurv = curvature(s, y[0]);
      return {cc.A * y[2],
              cc.B * y[3],
              -0.5 * (cc.Ap * y[2] * y[2] + cc.Bp * y[3] * y[3]),
              0.0,
              y[5],
              -kcurv * y[4],
              y[7],
              -kcurv * y[6]};
    };
    ode::State<8> y{base.y[0], base.y[1], base.y[2], base.y[3], jac[0], jac[1], jac[2], jac[3]};
    bool rotated = false;
    auto after = [&](double, ode::State<8>& yy) {
      if (s.is_canonical()) {
        if (!detail::ChartFlow::out_of_band(yy[0])) return false;
        ode::State<4> b{yy[0], yy[1], yy[2], yy[3]};
        detail::ChartFlow::rotate_if_needed(b, base.frame);
        yy[0] = b[0];
        yy[1] = b[1];
        yy[2] = b[2];
        yy[3] = b[3];
        rotated = true;
        return true;
      }
      if (yy[0] < kPoleMargin || yy[0] > kPi - kPoleMargin)
        throw chart_error("jacobi_solve: pole margin reached on a surface of revolution");
      return false;
    };
    y = ode::integrate<8>(rhs, y, 0.0, h, tol, after);
    base.y = {y[0], y[1], y[2], y[3]};
    jac = {y[4], y[5], y[6], y[7]};
    (void)rotated;
    record(kidx);
  }
  return js;
}

inline double wronskian_defect(const JacobiSolution& js) {
  double worst = 0.0;
  for (std::size_t i = 0; i < js.t.size(); ++i)
    worst = std::max(worst, std::abs(js.ft[i] * js.df[i] - js.dft[i] * js.f[i] - 1.0));
  return worst;
}

// R(t) on the shared grid by cumulative trapezoid of the inner integrals.
inline std::vector<double> r_factor(const JacobiSolution& js) {
  const std::size_t npts = js.t.size();
  std::vector<double> r(npts, 0.0);
  double i1 = 0.0, i2 = 0.0;  // int KK f^3, int ft KK f^2
  auto g1 = [&](std::size_t i) { return js.kk[i] * js.f[i] * js.f[i] * js.f[i]; };
  auto g2 = [&](std::size_t i) { return js.ft[i] * js.kk[i] * js.f[i] * js.f[i]; };
  r[0] = 0.0;
  for (std::size_t i = 1; i < npts; ++i) {
    double dt = js.t[i] - js.t[i - 1];
    i1 += 0.5 * dt * (g1(i - 1) + g1(i));
    i2 += 0.5 * dt * (g2(i - 1) + g2(i));
    r[i] = js.ft[i] * i1 - 3.0 * js.f[i] * i2;
  }
  return r;
}

// q0 along the closed unit-speed geodesic through rho0.
inline double q0(const ZollSurface& s, const PhasePoint& rho0, std::size_t n = 2048,
                 double tol = 1e-10) {
  JacobiSolution js = jacobi_solve(s, rho0, n, tol);
  std::vector<double> r = r_factor(js);
  double ik = 0.0, iq = 0.0;
  for (std::size_t i = 1; i < js.t.size(); ++i) {
    double dt = js.t[i] - js.t[i - 1];
    ik += 0.5 * dt * (js.k[i - 1] + js.k[i]);
    double a = js.kk[i - 1] * js.ft[i - 1] * js.ft[i - 1] * r[i - 1];
    double b = js.kk[i] * js.ft[i] * js.ft[i] * r[i];
    iq += 0.5 * dt * (a + b);
  }
  return ik / (8.0 * kPi) + iq / (24.0 * kPi);
}

}  // namespace zoll
