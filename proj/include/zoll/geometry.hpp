#pragma once

// Geometry of Zoll surfaces of revolution on S^2,
//
//   g = (1 + sigma(cos theta))^2 dtheta^2 + sin^2 theta dphi^2,
//
// with sigma an odd polynomial in c = cos theta satisfying sigma(1) = 0 and
// 1 + sigma > 0.  The canonical round sphere is sigma == 0.  All operations
// work in the spherical chart (theta, phi) with covector components
// (p_theta, p_phi); the chart is singular at theta in {0, pi}, so flows that
// cross a pole switch charts (round sphere) or take the meridian branch
// (surfaces of revolution).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace zoll {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

// Chart margin in radians: operations refuse phase points closer to a pole.
inline constexpr double kPoleMargin = 1e-6;

class chart_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(Vec3 v) {
  double n = norm(v);
  if (n == 0.0) throw std::domain_error("normalized: zero vector");
  return (1.0 / n) * v;
}
// Angle between unit vectors, robust near 0 and pi.
inline double angle_between(Vec3 a, Vec3 b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

// Profile sigma as a polynomial in c = cos theta.  The odd() constructor is
// the public entry point: only odd monomials, sigma(1) = 0, and 1 + sigma > 0
// on a 2049-point Chebyshev sample of [-1, 1].
class RevolutionProfile {
 public:
  RevolutionProfile() = default;  // sigma == 0

  // coeffs[k] multiplies c^(2k+1).
  static RevolutionProfile odd(const std::vector<double>& odd_coeffs) {
    RevolutionProfile p;
    p.poly_.assign(2 * odd_coeffs.size() + 1, 0.0);
    double at_one = 0.0;
    for (std::size_t k = 0; k < odd_coeffs.size(); ++k) {
      p.poly_[2 * k + 1] = odd_coeffs[k];
      at_one += odd_coeffs[k];
    }
    if (std::abs(at_one) > 1e-12)
      throw std::invalid_argument("RevolutionProfile: sigma(1) != 0");
    p.check_positivity();
    return p;
  }

  // Unrestricted polynomial profile; skips the oddness and sigma(1) checks.
  // Exists for non-Zoll fixtures, not for production surfaces.
  static RevolutionProfile general_unchecked(std::vector<double> poly) {
    RevolutionProfile p;
    p.poly_ = std::move(poly);
    p.check_positivity();
    return p;
  }

  bool is_zero() const {
    for (double a : poly_)
      if (a != 0.0) return false;
    return true;
  }

  double sigma(double c) const {
    double v = 0.0;
    for (std::size_t i = poly_.size(); i-- > 0;) v = v * c + poly_[i];
    return v;
  }
  double dsigma(double c) const {
    double v = 0.0;
    for (std::size_t i = poly_.size(); i-- > 1;) v = v * c + i * poly_[i];
    return v;
  }
  double d2sigma(double c) const {
    double v = 0.0;
    for (std::size_t i = poly_.size(); i-- > 2;) v = v * c + i * (i - 1) * poly_[i];
    return v;
  }

  // Coefficients of the odd monomials c^(2k+1); valid for odd profiles.
  std::vector<double> odd_coefficients() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < poly_.size(); i += 2) out.push_back(poly_[i]);
    while (!out.empty() && out.back() == 0.0) out.pop_back();
    return out;
  }

 private:
  void check_positivity() const {
    // Chebyshev sample is dense near the endpoints where 1 + sigma can pinch.
    constexpr int kSamples = 2049;
    for (int j = 0; j < kSamples; ++j) {
      double c = std::cos(kPi * j / (kSamples - 1));
      if (1.0 + sigma(c) <= 0.0)
        throw std::invalid_argument("RevolutionProfile: 1 + sigma(c) <= 0");
    }
  }

  std::vector<double> poly_;  // poly_[i] multiplies c^i
};

enum class SurfaceKind { CanonicalSphere, Tannery };

class ZollSurface {
 public:
  static ZollSurface canonical_sphere() { return ZollSurface(SurfaceKind::CanonicalSphere, {}); }
  static ZollSurface tannery(RevolutionProfile profile) {
    if (profile.is_zero()) return canonical_sphere();
    return ZollSurface(SurfaceKind::Tannery, std::move(profile));
  }

  SurfaceKind kind() const { return kind_; }
  bool is_canonical() const { return kind_ == SurfaceKind::CanonicalSphere; }
  const RevolutionProfile& profile() const { return profile_; }
  double period() const { return kTwoPi; }  // common length of closed geodesics

  // Radial factor u(c) = 1 + sigma(c) and its c-derivatives.
  double u(double c) const { return 1.0 + profile_.sigma(c); }
  double du(double c) const { return profile_.dsigma(c); }
  double d2u(double c) const { return profile_.d2sigma(c); }

 private:
  ZollSurface(SurfaceKind k, RevolutionProfile p) : kind_(k), profile_(std::move(p)) {}
  friend ZollSurface make_surface_unchecked(std::vector<double>);

  SurfaceKind kind_;
  RevolutionProfile profile_;
};

// Non-Zoll fixture: arbitrary polynomial profile, treated as a Tannery-type
// chart metric by all pointwise operations and flows.
inline ZollSurface make_surface_unchecked(std::vector<double> poly) {
  return ZollSurface(SurfaceKind::Tannery, RevolutionProfile::general_unchecked(std::move(poly)));
}

// Point of the punctured cotangent bundle in the spherical chart.  Flow
// entry points validate the chart margin and ||xi|| > 0; sampled outputs of
// pole-crossing trajectories may carry theta in the closed interval [0, pi].
struct PhasePoint {
  double theta = 0.0;
  double phi = 0.0;
  double p_theta = 0.0;
  double p_phi = 0.0;
};

struct InverseMetric {
  double gtt = 0.0;  // g^{theta theta}
  double gpp = 0.0;  // g^{phi phi}
};

inline void require_chart_point(double theta) {
  if (!(theta > kPoleMargin && theta < kPi - kPoleMargin))
    throw chart_error("theta within pole margin of the spherical chart");
}

// g^{theta theta} = (1 + sigma)^{-2}, g^{phi phi} = 1 / sin^2 theta.
inline InverseMetric metric_inverse(const ZollSurface& s, double theta) {
  require_chart_point(theta);
  double st = std::sin(theta);
  double uu = s.u(std::cos(theta));
  return {1.0 / (uu * uu), 1.0 / (st * st)};
}

// Sectional curvature K = (1 + sigma - c sigma') / (1 + sigma)^3, c = cos theta.
inline double curvature(const ZollSurface& s, double theta) {
  double c = std::cos(theta);
  double uu = s.u(c);
  return (uu - c * s.du(c)) / (uu * uu * uu);
}

// dK/dc, exact from the polynomial profile.
inline double curvature_dc(const ZollSurface& s, double c) {
  double uu = s.u(c);
  double up = s.du(c);
  double upp = s.d2u(c);
  double num = -c * upp * uu - 3.0 * up * (uu - c * up);
  return num / (uu * uu * uu * uu);
}

// dK/dtheta at the chart point.
inline double curvature_dtheta(const ZollSurface& s, double theta) {
  return -std::sin(theta) * curvature_dc(s, std::cos(theta));
}

inline double covector_norm_sq(const ZollSurface& s, const PhasePoint& r) {
  InverseMetric gi = metric_inverse(s, r.theta);
  return gi.gtt * r.p_theta * r.p_theta + gi.gpp * r.p_phi * r.p_phi;
}

// p_0(x, xi) = ||xi||^2 / 2.
inline double hamiltonian_p0(const ZollSurface& s, const PhasePoint& r) {
  return 0.5 * covector_norm_sq(s, r);
}

// Fiber rotation by +pi/2: {xi, xi_perp} is a direct orthogonal pair for the
// chart area form (1 + sigma) sin theta dtheta ^ dphi, with equal norms.
// In the orthonormal coframe e1 = (1+sigma) dtheta, e2 = sin theta dphi the
// rotation sends (a, b) to (-b, a).
inline PhasePoint perp(const ZollSurface& s, const PhasePoint& r) {
  require_chart_point(r.theta);
  if (covector_norm_sq(s, r) <= 0.0) throw std::domain_error("perp: zero covector");
  double st = std::sin(r.theta);
  double uu = s.u(std::cos(r.theta));
  double a = r.p_theta / uu;  // e1 component
  double b = r.p_phi / st;    // e2 component
  PhasePoint out = r;
  out.p_theta = -b * uu;
  out.p_phi = a * st;
  return out;
}

// Curvature pairing  g*(dK, xi_perp);  dK has only a dtheta component.
inline double curvature_pairing(const ZollSurface& s, const PhasePoint& r) {
  PhasePoint pp = perp(s, r);
  InverseMetric gi = metric_inverse(s, r.theta);
  return gi.gtt * curvature_dtheta(s, r.theta) * pp.p_theta;
}

// ---- ambient helpers (the chart immersion into R^3) ----

inline Vec3 position_ambient(double theta, double phi) {
  double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}
inline Vec3 position_ambient(const PhasePoint& r) { return position_ambient(r.theta, r.phi); }

// Velocity xi^sharp in ambient coordinates; round sphere only (the Tannery
// chart is not an isometric embedding).
inline Vec3 velocity_ambient_canonical(const PhasePoint& r) {
  double st = std::sin(r.theta), ct = std::cos(r.theta);
  double cp = std::cos(r.phi), sp = std::sin(r.phi);
  Vec3 e_theta{ct * cp, ct * sp, -st};       // d(position)/dtheta
  Vec3 e_phi{-st * sp, st * cp, 0.0};        // d(position)/dphi
  double td = r.p_theta;                     // theta-dot = g^{tt} p_theta, g^{tt} = 1
  double pd = r.p_phi / (st * st);           // phi-dot
  return td * e_theta + pd * e_phi;
}

// Chart point from an ambient position and tangent velocity; round sphere only.
inline PhasePoint chart_from_ambient_canonical(Vec3 x, Vec3 v) {
  PhasePoint r;
  r.theta = std::acos(std::clamp(x.z, -1.0, 1.0));
  r.phi = std::atan2(x.y, x.x);
  if (r.phi < 0) r.phi += kTwoPi;
  double st = std::sin(r.theta), ct = std::cos(r.theta);
  double cp = std::cos(r.phi), sp = std::sin(r.phi);
  Vec3 e_theta{ct * cp, ct * sp, -st};
  Vec3 e_phi{-st * sp, st * cp, 0.0};
  r.p_theta = dot(v, e_theta);  // lower the index with the round metric
  r.p_phi = dot(v, e_phi);
  return r;
}

}  // namespace zoll
