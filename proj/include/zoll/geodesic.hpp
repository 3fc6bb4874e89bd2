#pragma once

// Geodesic flow of p_0 = ||xi||^2 / 2 in the spherical chart.
//
// Hamilton's equations for g = u(cos theta)^2 dtheta^2 + sin^2 theta dphi^2:
//   theta' = p_theta / u^2           p_theta' = -(A' p_theta^2 + B' p_phi^2)/2
//   phi'   = p_phi / sin^2 theta     p_phi'   = 0
// with A = u^{-2}, B = sin^{-2} theta (primes on A, B are d/dtheta).
//
// Pole handling: geodesics with p_phi == 0 are meridians and run on a
// dedicated 1-d branch that crosses the poles smoothly; on the round sphere
// any trajectory entering the pole guard band is continued in a rotated
// chart and mapped back.  On a non-round surface of revolution a pole
// approach with p_phi != 0 cannot happen (Clairaut), except below the chart
// margin, which is a hard error.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "zoll/geometry.hpp"
#include "zoll/ode.hpp"

namespace zoll {

namespace detail {

struct Mat3 {
  std::array<std::array<double, 3>, 3> a{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  Vec3 apply(Vec3 v) const {
    return {a[0][0] * v.x + a[0][1] * v.y + a[0][2] * v.z,
            a[1][0] * v.x + a[1][1] * v.y + a[1][2] * v.z,
            a[2][0] * v.x + a[2][1] * v.y + a[2][2] * v.z};
  }
  Vec3 apply_transpose(Vec3 v) const {
    return {a[0][0] * v.x + a[1][0] * v.y + a[2][0] * v.z,
            a[0][1] * v.x + a[1][1] * v.y + a[2][1] * v.z,
            a[0][2] * v.x + a[1][2] * v.y + a[2][2] * v.z};
  }
  Mat3 compose_left(const Mat3& r) const {  // returns r * this
    Mat3 out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += r.a[i][k] * a[k][j];
        out.a[i][j] = s;
      }
    return out;
  }
  bool is_identity() const {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (a[i][j] != (i == j ? 1.0 : 0.0)) return false;
    return true;
  }
};

// Quarter turn about the y-axis; maps the chart poles to equator points.
inline Mat3 quarter_turn_y() {
  Mat3 m;
  m.a = {{{0, 0, 1}, {0, 1, 0}, {-1, 0, 0}}};
  return m;
}

inline constexpr double kPoleGuard = 0.05;  // radians; start of rotated-chart band

inline ode::State<4> to_state(const PhasePoint& r) {
  return {r.theta, r.phi, r.p_theta, r.p_phi};
}
inline PhasePoint from_state(const ode::State<4>& y) { return {y[0], y[1], y[2], y[3]}; }

// d/dtheta of A = u^{-2} and B = sin^{-2} theta, plus second derivatives for
// the variational equations.
struct ChartCoeffs {
  double A, B, Ap, Bp, App, Bpp;
};

inline ChartCoeffs chart_coeffs(const ZollSurface& s, double theta, bool second) {
  double st = std::sin(theta), ct = std::cos(theta), c = ct;
  double uu = s.u(c), up = s.du(c);
  double ut = -st * up;  // du/dtheta
  ChartCoeffs k{};
  k.A = 1.0 / (uu * uu);
  k.B = 1.0 / (st * st);
  k.Ap = -2.0 * ut / (uu * uu * uu);
  k.Bp = -2.0 * ct / (st * st * st);
  if (second) {
    double upp = s.d2u(c);
    double utt = -ct * up + st * st * upp;  // d^2u/dtheta^2
    k.App = 6.0 * ut * ut / (uu * uu * uu * uu) - 2.0 * utt / (uu * uu * uu);
    k.Bpp = 2.0 / (st * st) + 6.0 * ct * ct / (st * st * st * st);
  }
  return k;
}

inline ode::State<4> hamilton_rhs(const ZollSurface& s, const ode::State<4>& y) {
  if (std::sin(y[0]) < 1e-12) throw ode::step_failure("hamilton_rhs: chart pole");
  ChartCoeffs k = chart_coeffs(s, y[0], false);
  return {k.A * y[2], k.B * y[3], -0.5 * (k.Ap * y[2] * y[2] + k.Bp * y[3] * y[3]), 0.0};
}

// Meridian branch: the full meridian loop is parametrized by beta with
// cos(theta(beta)) = cos(beta), which is smooth through both poles.  Arc
// length obeys ds = u(cos beta) dbeta, so dbeta/dt = v / u(cos beta).
struct MeridianState {
  double beta;    // unwrapped loop parameter
  double phi_a;   // phi on the beta mod 2pi in (0, pi) side
  double speed;   // ||xi|| > 0
};

inline MeridianState meridian_from_point(const ZollSurface& s, const PhasePoint& r) {
  double v = std::sqrt(covector_norm_sq(s, r));
  if (r.p_theta > 0) return {r.theta, r.phi, v};
  return {kTwoPi - r.theta, r.phi - kPi, v};
}

inline PhasePoint meridian_point(const ZollSurface& s, const MeridianState& m) {
  double b = std::fmod(m.beta, kTwoPi);
  if (b < 0) b += kTwoPi;
  PhasePoint r;
  double c = std::cos(b);
  double uv = s.u(c) * m.speed;
  if (b <= kPi) {
    r.theta = b;
    r.phi = m.phi_a;
    r.p_theta = uv;
  } else {
    r.theta = kTwoPi - b;
    r.phi = m.phi_a + kPi;
    r.p_theta = -uv;
  }
  r.phi = std::fmod(r.phi, kTwoPi);
  if (r.phi < 0) r.phi += kTwoPi;
  r.p_phi = 0.0;
  return r;
}

inline MeridianState meridian_flow(const ZollSurface& s, MeridianState m, double t, double tol) {
  auto rhs = [&](double, const ode::State<1>& y) -> ode::State<1> {
    return {m.speed / s.u(std::cos(y[0]))};
  };
  ode::State<1> y{m.beta};
  y = ode::integrate<1>(rhs, y, 0.0, t, tol);
  m.beta = y[0];
  return m;
}

// Generic chart integration with optional rotated-chart continuation (round
// sphere only).  Keeps the current chart frame so that consecutive segments
// chain without re-validating intermediate samples.
struct ChartFlow {
  const ZollSurface& surface;
  double tol;
  ode::State<4> y;
  Mat3 frame;  // chart coordinates live in frame * ambient
  ode::StepStats stats;

  ChartFlow(const ZollSurface& s, const PhasePoint& r0, double tol_)
      : surface(s), tol(tol_), y(to_state(r0)) {
    if (!(tol > 0)) throw std::invalid_argument("flow: tol must be positive");
    require_chart_point(r0.theta);
    if (covector_norm_sq(s, r0) <= 0.0) throw std::domain_error("flow: zero covector");
    if (surface.is_canonical()) rotate_if_needed(y, frame);
  }

  static bool out_of_band(double theta) {
    return theta < kPoleGuard || theta > kPi - kPoleGuard;
  }

  static void rotate_if_needed(ode::State<4>& y, Mat3& frame) {
    if (!out_of_band(y[0])) return;
    PhasePoint r = from_state(y);
    Vec3 x = position_ambient(r);
    Vec3 v = velocity_ambient_canonical(r);
    Mat3 rot = quarter_turn_y();
    PhasePoint rr = chart_from_ambient_canonical(rot.apply(x), rot.apply(v));
    y = to_state(rr);
    frame = frame.compose_left(rot);
  }

  void advance(double ds) {
    if (ds == 0.0) return;
    auto rhs = [&](double, const ode::State<4>& yy) { return hamilton_rhs(surface, yy); };
    if (surface.is_canonical()) {
      auto after = [&](double, ode::State<4>& yy) {
        if (!out_of_band(yy[0])) return false;
        rotate_if_needed(yy, frame);
        return true;
      };
      y = ode::integrate<4>(rhs, y, 0.0, ds, tol, after, &stats);
    } else {
      auto after = [&](double, ode::State<4>& yy) {
        if (yy[0] < kPoleMargin || yy[0] > kPi - kPoleMargin)
          throw chart_error("flow: pole margin reached on a surface of revolution");
        return false;
      };
      y = ode::integrate<4>(rhs, y, 0.0, ds, tol, after, &stats);
    }
  }

  // Current point mapped back to the original chart.  Near the original
  // chart's poles the returned covector components are the chart limits.
  PhasePoint current() const {
    if (frame.is_identity()) return from_state(y);
    PhasePoint r = from_state(y);
    Vec3 x = frame.apply_transpose(position_ambient(r));
    Vec3 v = frame.apply_transpose(velocity_ambient_canonical(r));
    return chart_from_ambient_canonical(x, v);
  }
};

}  // namespace detail

// Time-s geodesic flow map phi^s.
inline PhasePoint flow(const ZollSurface& s, const PhasePoint& r0, double t, double tol = 1e-10) {
  if (r0.p_phi == 0.0) {
    require_chart_point(r0.theta);
    if (covector_norm_sq(s, r0) <= 0.0) throw std::domain_error("flow: zero covector");
    detail::MeridianState m = detail::meridian_from_point(s, r0);
    m = detail::meridian_flow(s, m, t, tol);
    return detail::meridian_point(s, m);
  }
  detail::ChartFlow cf(s, r0, tol);
  cf.advance(t);
  return cf.current();
}

// Sampled closed geodesic: n equispaced samples of phi^s over one period
// l / ||xi||, first sample at rho0.
struct Geodesic {
  PhasePoint initial;
  double energy = 0.0;
  double sample_spacing = 0.0;          // in flow time
  std::vector<PhasePoint> samples;
  std::size_t integrator_steps = 0;
  double tol = 0.0;
};

inline Geodesic trajectory(const ZollSurface& s, const PhasePoint& r0, std::size_t n,
                           double tol = 1e-10) {
  if (n < 16) throw std::invalid_argument("trajectory: n >= 16 required");
  require_chart_point(r0.theta);
  double nsq = covector_norm_sq(s, r0);
  if (nsq <= 0.0) throw std::domain_error("trajectory: zero covector");
  Geodesic g;
  g.initial = r0;
  g.energy = 0.5 * nsq;
  g.tol = tol;
  double period = s.period() / std::sqrt(nsq);
  g.sample_spacing = period / static_cast<double>(n);
  g.samples.reserve(n);
  g.samples.push_back(r0);
  if (r0.p_phi == 0.0) {
    detail::MeridianState m = detail::meridian_from_point(s, r0);
    for (std::size_t k = 1; k < n; ++k) {
      m = detail::meridian_flow(s, m, g.sample_spacing, tol);
      g.samples.push_back(detail::meridian_point(s, m));
    }
    return g;
  }
  detail::ChartFlow cf(s, r0, tol);
  for (std::size_t k = 1; k < n; ++k) {
    cf.advance(g.sample_spacing);
    g.samples.push_back(cf.current());
  }
  g.integrator_steps = cf.stats.accepted;
  return g;
}

// Chart distance between phi^{2pi}(rho0) and rho0 for unit-energy data; the
// azimuth difference is wrapped.
inline double closure_defect(const ZollSurface& s, const PhasePoint& r0, double tol = 1e-10) {
  double e = hamiltonian_p0(s, r0);
  if (std::abs(e - 0.5) > 1e-6)
    throw std::invalid_argument("closure_defect: unit-energy initial condition required");
  PhasePoint r1 = flow(s, r0, s.period(), tol);
  double dphi = std::remainder(r1.phi - r0.phi, kTwoPi);
  double dt = r1.theta - r0.theta;
  double dpt = r1.p_theta - r0.p_theta;
  double dpp = r1.p_phi - r0.p_phi;
  return std::sqrt(dt * dt + dphi * dphi + dpt * dpt + dpp * dpp);
}

// Derivative of the flow map applied to a tangent 4-vector, integrated with
// the base trajectory (variational equations).  Generic chart only.
inline std::array<double, 4> tangent_flow(const ZollSurface& s, const PhasePoint& r0, double t,
                                          const std::array<double, 4>& v0, double tol = 1e-10) {
  require_chart_point(r0.theta);
  if (covector_norm_sq(s, r0) <= 0.0) throw std::domain_error("tangent_flow: zero covector");
  auto rhs = [&](double, const ode::State<8>& y) -> ode::State<8> {
    if (std::sin(y[0]) < 1e-12) throw ode::step_failure("tangent_flow: chart pole");
    detail::ChartCoeffs k = detail::chart_coeffs(s, y[0], true);
    const double pt = y[2], pp = y[3];
    // Jacobian of the Hamiltonian field in chart coordinates.
    const double j00 = k.Ap * pt, j02 = k.A;
    const double j10 = k.Bp * pp, j13 = k.B;
    const double j20 = -0.5 * (k.App * pt * pt + k.Bpp * pp * pp);
    const double j22 = -k.Ap * pt, j23 = -k.Bp * pp;
    return {k.A * pt,
            k.B * pp,
            -0.5 * (k.Ap * pt * pt + k.Bp * pp * pp),
            0.0,
            j00 * y[4] + j02 * y[6],
            j10 * y[4] + j13 * y[7],
            j20 * y[4] + j22 * y[6] + j23 * y[7],
            0.0};
  };
  ode::State<8> y{r0.theta, r0.phi, r0.p_theta, r0.p_phi, v0[0], v0[1], v0[2], v0[3]};
  y = ode::integrate<8>(rhs, y, 0.0, t, tol);
  return {y[4], y[5], y[6], y[7]};
}

// Hamiltonian vector field of p_0 at a chart point (flow direction).
inline std::array<double, 4> geodesic_field(const ZollSurface& s, const PhasePoint& r) {
  auto y = detail::hamilton_rhs(s, detail::to_state(r));
  return {y[0], y[1], y[2], y[3]};
}

}  // namespace zoll
