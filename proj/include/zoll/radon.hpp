#pragma once

// Geodesic Radon transform
//
//   I_g(V)(x, xi) = (||xi|| / l) * integral_0^{l/||xi||} V(pi(phi^tau(x, xi))) dtau,
//
// its chart gradient by Richardson-extrapolated central differences, the
// Hamiltonian flow it generates (Omega = dp ^ dq, X_H = (dH/dp, -dH/dq)),
// the critical set scan, and caustic detection along invariant tori.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "zoll/geodesic.hpp"
#include "zoll/geometry.hpp"
#include "zoll/potential.hpp"

namespace zoll {

struct RadonOptions {
  std::size_t samples = 256;   // trapezoid points over one period
  double flow_tol = 1e-12;
  double grad_step = 1e-4;     // central-difference step, one Richardson level
};

// Chart-coordinate evaluator of a function on the surface.
using ChartFunction = std::function<double(double, double)>;

// Trapezoid rule on the periodic uniform sampling = plain average.
inline double radon_fn(const ZollSurface& s, const ChartFunction& v, const PhasePoint& r,
                       const RadonOptions& opt = {}) {
  Geodesic g = trajectory(s, r, opt.samples, opt.flow_tol);
  double acc = 0.0;
  for (const PhasePoint& p : g.samples) acc += v(p.theta, p.phi);
  return acc / static_cast<double>(g.samples.size());
}

inline double radon(const ZollSurface& s, const Potential& v, const PhasePoint& r,
                    const RadonOptions& opt = {}) {
  return radon_fn(s, [&v](double th, double ph) { return v(th, ph); }, r, opt);
}

struct HomogeneityWitness {
  double defect = 0.0;
  bool ok = false;
};

// |I_g(V)(x, lambda xi) - I_g(V)(x, xi)|; contract: below 1e-9.
inline HomogeneityWitness radon_is_homogeneous(const ZollSurface& s, const Potential& v,
                                               const PhasePoint& r, double lambda,
                                               const RadonOptions& opt = {}) {
  if (!(lambda > 0)) throw std::invalid_argument("radon_is_homogeneous: lambda > 0");
  PhasePoint rs = r;
  rs.p_theta *= lambda;
  rs.p_phi *= lambda;
  HomogeneityWitness w;
  w.defect = std::abs(radon(s, v, rs, opt) - radon(s, v, r, opt));
  w.ok = w.defect < 1e-9;
  return w;
}

// Chart gradient of rho -> I_g(V)(rho): central differences in the four
// chart directions with one Richardson level, (4 D(h/2) - D(h)) / 3.
inline std::array<double, 4> radon_grad_fn(const ZollSurface& s, const ChartFunction& v,
                                           const PhasePoint& r, const RadonOptions& opt = {}) {
  auto eval = [&](const PhasePoint& p) { return radon_fn(s, v, p, opt); };
  std::array<double, 4> out{};
  for (int dir = 0; dir < 4; ++dir) {
    auto shift = [&](double h) {
      PhasePoint p = r;
      switch (dir) {
        case 0: p.theta += h; break;
        case 1: p.phi += h; break;
        case 2: p.p_theta += h; break;
        default: p.p_phi += h; break;
      }
      return p;
    };
    double h = opt.grad_step;
    double d1 = (eval(shift(h)) - eval(shift(-h))) / (2.0 * h);
    double d2 = (eval(shift(h / 2)) - eval(shift(-h / 2))) / h;
    out[dir] = (4.0 * d2 - d1) / 3.0;
  }
  return out;
}

inline std::array<double, 4> radon_grad(const ZollSurface& s, const Potential& v,
                                        const PhasePoint& r, const RadonOptions& opt = {}) {
  return radon_grad_fn(s, [&v](double th, double ph) { return v(th, ph); }, r, opt);
}

struct RadonValue {
  double value = 0.0;
  std::array<double, 4> gradient{};
};

inline RadonValue radon_with_gradient(const ZollSurface& s, const Potential& v,
                                      const PhasePoint& r, const RadonOptions& opt = {}) {
  return {radon(s, v, r, opt), radon_grad(s, v, r, opt)};
}

// Hamiltonian flow of I_g(V).  The field is evaluated through radon_grad, so
// one field evaluation costs sixteen Radon quadratures.  The chart-component
// blowup near the poles is handled the same way as in the geodesic flow: on
// the round sphere the integration continues in a rotated chart (with the
// potential pulled back accordingly); on a surface of revolution a pole
// approach is a hard chart error.
inline PhasePoint effective_flow(const ZollSurface& s, const Potential& v, const PhasePoint& r0,
                                 double t, double tol = 1e-6, const RadonOptions& opt = {}) {
  require_chart_point(r0.theta);
  detail::Mat3 frame;
  ChartFunction vf = [&v, &frame](double th, double ph) {
    if (frame.is_identity()) return v(th, ph);
    Vec3 x = frame.apply_transpose(position_ambient(th, ph));
    double theta = std::acos(std::clamp(x.z, -1.0, 1.0));
    return v(theta, std::atan2(x.y, x.x));
  };
  auto rhs = [&](double, const ode::State<4>& y) -> ode::State<4> {
    std::array<double, 4> g = radon_grad_fn(s, vf, {y[0], y[1], y[2], y[3]}, opt);
    return {g[2], g[3], -g[0], -g[1]};
  };
  ode::State<4> y{r0.theta, r0.phi, r0.p_theta, r0.p_phi};
  if (s.is_canonical()) {
    detail::ChartFlow::rotate_if_needed(y, frame);
    auto after = [&](double, ode::State<4>& yy) {
      if (!detail::ChartFlow::out_of_band(yy[0])) return false;
      detail::ChartFlow::rotate_if_needed(yy, frame);
      return true;
    };
    y = ode::integrate<4>(rhs, y, 0.0, t, tol, after);
  } else {
    auto after = [&](double, ode::State<4>& yy) {
      if (yy[0] < kPoleMargin || yy[0] > kPi - kPoleMargin)
        throw chart_error("effective_flow: pole margin reached on a surface of revolution");
      return false;
    };
    y = ode::integrate<4>(rhs, y, 0.0, t, tol, after);
  }
  if (frame.is_identity()) return {y[0], y[1], y[2], y[3]};
  PhasePoint r{y[0], y[1], y[2], y[3]};
  Vec3 x = frame.apply_transpose(position_ambient(r));
  Vec3 vv = frame.apply_transpose(velocity_ambient_canonical(r));
  return chart_from_ambient_canonical(x, vv);
}

// Unit normal of the great circle through rho; canonical sphere only.
inline Vec3 geodesic_normal_chart(const ZollSurface& s, const PhasePoint& r) {
  if (!s.is_canonical())
    throw std::invalid_argument("geodesic_normal_chart: canonical sphere only");
  if (covector_norm_sq(s, r) <= 0.0)
    throw std::domain_error("geodesic_normal_chart: zero covector");
  Vec3 x = position_ambient(r);
  Vec3 v = velocity_ambient_canonical(r);
  return normalized(cross(x, v));
}

// Phase point on the great circle with unit normal n (canonical sphere):
// position at a fixed section, unit-speed covector.
inline PhasePoint phase_point_from_normal(Vec3 n) {
  n = normalized(n);
  Vec3 ref = (std::abs(n.z) < 0.9) ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  Vec3 u = normalized(cross(ref, n));
  Vec3 w = cross(n, u);
  return chart_from_ambient_canonical(u, w);
}

struct CriticalFinding {
  PhasePoint point;      // representative phase point of the critical geodesic
  double residual = 0.0; // ||radon_grad|| after refinement
  double theta0 = 0.0;   // section coordinates of the scan
  double psi = 0.0;
};

struct CriticalScanReport {
  bool degenerate = false;  // gradient vanishes identically: C(V) = M
  std::vector<CriticalFinding> findings;
};

namespace detail {

// Unit-speed phase point at section (theta0, phi = 0) with direction angle
// psi measured from the meridian direction in the orthonormal frame.
inline PhasePoint section_point(const ZollSurface& s, double theta0, double psi) {
  PhasePoint r;
  r.theta = theta0;
  r.phi = 0.0;
  r.p_theta = s.u(std::cos(theta0)) * std::cos(psi);
  r.p_phi = std::sin(theta0) * std::sin(psi);
  return r;
}

inline double grad_norm(const ZollSurface& s, const Potential& v, const PhasePoint& r,
                        const RadonOptions& opt) {
  std::array<double, 4> g = radon_grad(s, v, r, opt);
  return std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
}

}  // namespace detail

// Grid scan over the unit cotangent bundle modulo the geodesic flow,
// parametrized by the section (theta0, psi).  Local minima of ||radon_grad||
// below 10 (grid spacing)^2 are refined by coordinate descent (50 iterations,
// deterministic first-found ordering).
inline CriticalScanReport critical_scan(const ZollSurface& s, const Potential& v, int resolution,
                                        const RadonOptions& opt = {}) {
  if (resolution < 16) throw std::invalid_argument("critical_scan: resolution >= 16");
  CriticalScanReport report;
  const int nt = resolution, np = resolution;
  const double dt = kPi / (nt + 1), dp = kPi / np;
  std::vector<double> val(static_cast<std::size_t>(nt) * np);
  double vmax = 0.0;
  for (int a = 0; a < nt; ++a)
    for (int b = 0; b < np; ++b) {
      PhasePoint r = detail::section_point(s, (a + 1) * dt, b * dp + dp / 2);
      double g = detail::grad_norm(s, v, r, opt);
      val[a * np + b] = g;
      vmax = std::max(vmax, g);
    }
  if (vmax < 1e-8) {
    report.degenerate = true;  // d I_g(V) == 0 everywhere: C(V) = M
    return report;
  }
  const double spacing = std::max(dt, dp);
  const double accept = 10.0 * spacing * spacing;
  for (int a = 0; a < nt; ++a)
    for (int b = 0; b < np; ++b) {
      double g0 = val[a * np + b];
      bool is_min = true;
      for (int da = -1; da <= 1 && is_min; ++da)
        for (int db = -1; db <= 1; ++db) {
          if (da == 0 && db == 0) continue;
          int aa = a + da, bb = (b + db + np) % np;
          if (aa < 0 || aa >= nt) continue;
          if (val[aa * np + bb] < g0) {
            is_min = false;
            break;
          }
        }
      if (!is_min) continue;
      // Coordinate descent refinement in (theta0, psi).
      double t0 = (a + 1) * dt, ps = b * dp + dp / 2, step = spacing / 2;
      double best = g0;
      for (int it = 0; it < 50; ++it) {
        bool improved = false;
        for (int dir = 0; dir < 4; ++dir) {
          double tt = t0 + (dir == 0 ? step : dir == 1 ? -step : 0.0);
          double pp = ps + (dir == 2 ? step : dir == 3 ? -step : 0.0);
          if (tt < 4 * kPoleMargin || tt > kPi - 4 * kPoleMargin) continue;
          double g = detail::grad_norm(s, v, detail::section_point(s, tt, pp), opt);
          if (g < best) {
            best = g;
            t0 = tt;
            ps = pp;
            improved = true;
          }
        }
        if (!improved) step *= 0.5;
        if (step < 1e-7) break;
      }
      if (best < accept)
        report.findings.push_back({detail::section_point(s, t0, ps), best, t0, ps});
    }
  return report;
}

struct CausticScanReport {
  bool inside_crit = false;      // F == 0 along the orbit: invariant orbit of the flow
  std::vector<double> zeros;     // caustic times in [0, period)
};

// Gradient provider abstraction so tests can inject synthetic fields; the
// default uses radon_grad of the potential.
using GradientField = std::function<std::array<double, 4>(const PhasePoint&)>;

// F(s) = xi_perp( dpi X_L ) at phi^s(rho0): zero exactly at the caustic
// points of the invariant torus through rho0.  Sign changes are bracketed on
// the s-grid and bisected to 1e-8.
inline CausticScanReport caustic_scan_field(const ZollSurface& s, const GradientField& grad,
                                            const PhasePoint& r0, int sgrid,
                                            double flow_tol = 1e-10) {
  if (sgrid < 8) throw std::invalid_argument("caustic_scan: sgrid >= 8");
  double period = s.period() / std::sqrt(covector_norm_sq(s, r0));
  auto pairing = [&](const PhasePoint& r) {
    std::array<double, 4> g = grad(r);
    PhasePoint pp = perp(s, r);
    return pp.p_theta * g[2] + pp.p_phi * g[3];
  };
  auto f_of = [&](double t) { return pairing(flow(s, r0, t, flow_tol)); };
  std::vector<double> ts(sgrid + 1), fs(sgrid + 1);
  double fmax = 0.0;
  for (int k = 0; k <= sgrid; ++k) {
    ts[k] = period * k / sgrid;
    fs[k] = f_of(ts[k]);
    fmax = std::max(fmax, std::abs(fs[k]));
  }
  CausticScanReport rep;
  if (fmax < 1e-10) {
    rep.inside_crit = true;
    return rep;
  }
  for (int k = 0; k < sgrid; ++k) {
    double fa = fs[k], fb = fs[k + 1];
    if (fa == 0.0) {
      rep.zeros.push_back(ts[k]);
      continue;
    }
    if (fa * fb >= 0.0) continue;
    double a = ts[k], b = ts[k + 1];
    for (int it = 0; it < 80 && (b - a) > 1e-8; ++it) {
      double m = 0.5 * (a + b);
      double fm = f_of(m);
      if (fm == 0.0) {
        a = b = m;
        break;
      }
      if (fa * fm < 0)
        b = m;
      else {
        a = m;
        fa = fm;
      }
    }
    rep.zeros.push_back(0.5 * (a + b));
  }
  return rep;
}

inline CausticScanReport caustic_scan(const ZollSurface& s, const Potential& v,
                                      const PhasePoint& r0, int sgrid,
                                      const RadonOptions& opt = {}) {
  GradientField g = [&](const PhasePoint& r) { return radon_grad(s, v, r, opt); };
  return caustic_scan_field(s, g, r0, sgrid, opt.flow_tol);
}

}  // namespace zoll
