#pragma once

// Time evolution under P_eps(hbar) at scaled times, geodesic-localized
// initial states, position-density diagnostics, transport experiments
// against the effective flow, and the quantum Loschmidt echo.
//
// The propagator is the full eigendecomposition (exact unitary on the
// truncated basis), shared across sample times and both echo branches.
// Initial states are rotated highest-weight states: Y_l^l is proportional
// to (x1 + i x2)^l, so the state concentrated on the great circle with unit
// normal n is proportional to ((x . u) + i (x . w))^l for any orthonormal
// frame (u, w, n).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "zoll/radon.hpp"
#include "zoll/spectral.hpp"

namespace zoll {

enum class TimeScaleLaw {
  EpsInvSq,        // tau = eps^{-2}   (critical transport scale)
  HbarOverEpsSq,   // tau = hbar / eps^2  (echo scale)
  ScaledEpsInvSq,  // tau = scale * eps^{-2}
  User,            // tau given directly
};

struct EvolutionPlan {
  int l = 0;
  double hbar = 0.0;
  double eps = 0.0;
  TimeScaleLaw law = TimeScaleLaw::EpsInvSq;
  double user_tau = 0.0;  // scale for ScaledEpsInvSq, value for User
  std::vector<double> times;  // scaled times t
  int lmax = 0;

  double tau() const {
    switch (law) {
      case TimeScaleLaw::EpsInvSq: return 1.0 / (eps * eps);
      case TimeScaleLaw::HbarOverEpsSq: return hbar / (eps * eps);
      case TimeScaleLaw::ScaledEpsInvSq: return user_tau / (eps * eps);
      default: return user_tau;
    }
  }

  void validate() const {
    if (l < 1 || !(hbar > 0) || !(eps >= 0)) throw std::invalid_argument("EvolutionPlan: bad parameters");
    if (lmax < 2 * l) throw std::invalid_argument("EvolutionPlan: lmax >= 2 l required for truncation safety");
    if (eps == 0 && law != TimeScaleLaw::User)
      throw std::invalid_argument("EvolutionPlan: eps = 0 needs an explicit time scale");
  }
};

inline double hbar_for_cluster(int l) { return 1.0 / std::sqrt(l * (l + 1.0)); }

inline std::vector<double> uniform_times(double t1, int count) {
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = t1 * i / (count - 1);
  return t;
}

// Transport defaults: hbar tied to the cluster, eps = hbar^{1/2},
// tau = eps^{-2}, 33 samples on [0, 1], lmax = 2 l + 10.
inline EvolutionPlan make_transport_plan(int l, int samples = 33) {
  EvolutionPlan p;
  p.l = l;
  p.hbar = hbar_for_cluster(l);
  p.eps = std::sqrt(p.hbar);
  p.law = TimeScaleLaw::EpsInvSq;
  p.times = uniform_times(1.0, samples);
  p.lmax = 2 * l + 10;
  p.validate();
  return p;
}

// Echo defaults: eps = hbar^x with x > 1/2 (the echo regime needs
// eps << sqrt(hbar)), tau = hbar / eps^2, samples on [0, 2 pi].
inline EvolutionPlan make_echo_plan(int l, double eps_exponent = 0.7, int samples = 65) {
  if (!(eps_exponent > 0.5))
    throw std::invalid_argument("make_echo_plan: echo regime requires eps exponent > 1/2");
  EvolutionPlan p;
  p.l = l;
  p.hbar = hbar_for_cluster(l);
  p.eps = std::pow(p.hbar, eps_exponent);
  p.law = TimeScaleLaw::HbarOverEpsSq;
  p.times = uniform_times(kTwoPi, samples);
  p.lmax = 2 * l + 10;
  p.validate();
  return p;
}

// ---- initial states ----

// Highest-weight state of cluster l rotated so its concentration circle has
// unit normal n; exact within the l-shell, normalized after analysis.
inline HarmonicState geodesic_state(const HarmonicBasis& b, Vec3 n, int l) {
  if (l > b.lmax) throw std::invalid_argument("geodesic_state: l <= lmax");
  n = normalized(n);
  Vec3 ref = (std::abs(n.z) < 0.9) ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  Vec3 u = normalized(cross(ref, n));
  Vec3 w = cross(n, u);
  Grid g;
  g.ntheta = b.ntheta;
  g.nphi = b.nphi;
  g.v.resize(static_cast<std::size_t>(b.ntheta) * b.nphi);
  for (int j = 0; j < b.ntheta; ++j) {
    double theta = std::acos(b.nodes_c[j]);
    for (int a = 0; a < b.nphi; ++a) {
      Vec3 x = position_ambient(theta, b.phis[a]);
      cplx z{dot(x, u), dot(x, w)};
      cplx p = 1.0;
      for (int k = 0; k < l; ++k) p *= z;
      g.at(j, a) = p;
    }
  }
  HarmonicState s = analyze(b, g);
  // The analysis of the degree-l polynomial is exact on shell l; discard the
  // rounding dust elsewhere before normalizing.
  for (int ll = 0; ll <= b.lmax; ++ll)
    if (ll != l)
      for (int m = -ll; m <= ll; ++m) s.c[b.flat_index(ll, m)] = 0.0;
  s.normalize();
  return s;
}

// Rotation of a state by resampling: synthesize, pull back through the
// rotation, analyze.  rot is a proper rotation matrix acting on ambient
// coordinates (rows major).
inline HarmonicState rotate_state(const HarmonicBasis& b, const HarmonicState& s,
                                  const std::array<std::array<double, 3>, 3>& rot) {
  // (R f)(x) = f(R^{-1} x); evaluate the truncated series at the pulled-back
  // nodes by direct summation.
  Grid g;
  g.ntheta = b.ntheta;
  g.nphi = b.nphi;
  g.v.resize(static_cast<std::size_t>(b.ntheta) * b.nphi);
  for (int j = 0; j < b.ntheta; ++j) {
    double theta = std::acos(b.nodes_c[j]);
    for (int a = 0; a < b.nphi; ++a) {
      Vec3 x = position_ambient(theta, b.phis[a]);
      // R^{-1} = R^T for rotations.
      Vec3 y{rot[0][0] * x.x + rot[1][0] * x.y + rot[2][0] * x.z,
             rot[0][1] * x.x + rot[1][1] * x.y + rot[2][1] * x.z,
             rot[0][2] * x.x + rot[1][2] * x.y + rot[2][2] * x.z};
      double ty = std::acos(std::clamp(y.z, -1.0, 1.0));
      double py = std::atan2(y.y, y.x);
      cplx acc = 0;
      std::vector<double> col(b.lmax + 1);
      for (int m = -b.lmax; m <= b.lmax; ++m) {
        int ma = std::abs(m);
        legendre_column(b.lmax, ma, std::cos(ty), col.data());
        cplx em{std::cos(m * py), std::sin(m * py)};
        double sign = (m < 0 && ma % 2 == 1) ? -1.0 : 1.0;
        for (int l = ma; l <= b.lmax; ++l) {
          const cplx& cc = s.c[b.flat_index(l, m)];
          if (cc != cplx{}) acc += cc * (sign * col[l - ma] * kInvSqrt2Pi) * em;
        }
      }
      g.at(j, a) = acc;
    }
  }
  return analyze(b, g);
}

// ---- propagation ----

// e^{-i T H / hbar} via a dense eigendecomposition.
inline HarmonicState propagate(const Eigensystem& es, double hbar, const HarmonicState& s,
                               double t_physical) {
  const int n = static_cast<int>(s.c.size());
  if (es.vectors.size() != n) throw std::invalid_argument("propagate: size mismatch");
  std::vector<cplx> y(n);
  for (int j = 0; j < n; ++j) {  // y = U* c
    cplx acc = 0;
    for (int i = 0; i < n; ++i) acc += std::conj(es.vectors(i, j)) * s.c[i];
    y[j] = acc;
  }
  for (int j = 0; j < n; ++j) {
    double ang = -t_physical * es.values[j] / hbar;
    y[j] *= cplx{std::cos(ang), std::sin(ang)};
  }
  HarmonicState out;
  out.c.assign(n, cplx{});
  for (int i = 0; i < n; ++i) {
    cplx acc = 0;
    for (int j = 0; j < n; ++j) acc += es.vectors(i, j) * y[j];
    out.c[i] = acc;
  }
  return out;
}

// Same propagator through the per-m blocks of an axisymmetric Hamiltonian.
inline HarmonicState propagate_blocks(const HarmonicBasis& b, const AxisymEigensystem& es,
                                      double hbar, const HarmonicState& s, double t_physical) {
  HarmonicState out;
  out.c.assign(s.c.size(), cplx{});
  for (int m = -b.lmax; m <= b.lmax; ++m) {
    const Eigensystem& em = es.at(m);
    const int dim = b.lmax + 1 - std::abs(m);
    std::vector<cplx> x(dim);
    for (int r = 0; r < dim; ++r) x[r] = s.c[b.flat_index(std::abs(m) + r, m)];
    std::vector<cplx> y(dim, cplx{});
    for (int j = 0; j < dim; ++j) {
      cplx acc = 0;
      for (int i = 0; i < dim; ++i) acc += std::conj(em.vectors(i, j)) * x[i];
      double ang = -t_physical * em.values[j] / hbar;
      y[j] = acc * cplx{std::cos(ang), std::sin(ang)};
    }
    for (int r = 0; r < dim; ++r) {
      cplx acc = 0;
      for (int j = 0; j < dim; ++j) acc += em.vectors(r, j) * y[j];
      out.c[b.flat_index(std::abs(m) + r, m)] = acc;
    }
  }
  return out;
}

// ---- position-space diagnostics ----

struct DensityGrid {
  int ntheta = 0, nphi = 0;
  std::vector<double> v;

  double at(int j, int a) const { return v[static_cast<std::size_t>(j) * nphi + a]; }
};

inline DensityGrid position_density(const HarmonicBasis& b, const HarmonicState& s) {
  Grid g = synthesize(b, s);
  DensityGrid d;
  d.ntheta = g.ntheta;
  d.nphi = g.nphi;
  d.v.resize(g.v.size());
  for (std::size_t i = 0; i < g.v.size(); ++i) d.v[i] = std::norm(g.v[i]);
  return d;
}

inline double density_integral(const HarmonicBasis& b, const DensityGrid& d) {
  const double dphi = kTwoPi / b.nphi;
  double acc = 0;
  for (int j = 0; j < b.ntheta; ++j) {
    double row = 0;
    for (int a = 0; a < b.nphi; ++a) row += d.at(j, a);
    acc += b.weights[j] * row;
  }
  return acc * dphi;
}

// Mass of the position density within angular half-width w of the great
// circle with unit normal n: the set { |x . n| <= sin w }.  Integrated in
// the frame aligned with n (Gauss-Legendre along the axis coordinate,
// uniform azimuth), which is exact for bandlimited states; the indicator
// never meets a quadrature node.
inline double tube_mass(const HarmonicBasis& b, const HarmonicState& s, Vec3 n, double w) {
  if (!(w > 0 && w < kPi / 2)) throw std::invalid_argument("tube_mass: w in (0, pi/2)");
  n = normalized(n);
  Vec3 ref = (std::abs(n.z) < 0.9) ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  Vec3 e1 = normalized(cross(ref, n));
  Vec3 e2 = cross(n, e1);
  const double cap = std::sin(w);
  const int ng = b.lmax + 1;          // the azimuth-averaged density has z-degree <= 2 lmax
  const int nphi = 2 * b.lmax + 2;
  QuadratureRule q = gauss_legendre(ng);
  std::vector<double> work(b.lmax + 1);
  double acc = 0;
  for (int i = 0; i < ng; ++i) {
    double z = cap * q.nodes[i];
    double r = std::sqrt(1.0 - z * z);
    double row = 0;
    for (int a = 0; a < nphi; ++a) {
      double ang = kTwoPi * a / nphi;
      Vec3 x = (r * std::cos(ang)) * e1 + (r * std::sin(ang)) * e2 + z * n;
      double theta = std::acos(std::clamp(x.z, -1.0, 1.0));
      double phi = std::atan2(x.y, x.x);
      row += std::norm(evaluate_state(b, s, theta, phi, work.data()));
    }
    acc += cap * q.weights[i] * row * (kTwoPi / nphi);
  }
  return acc;
}

// Smallest-eigenvector direction of the second-moment matrix of the density;
// empty when no circle dominates (isotropic moments).  Sign fixed by the
// upper-hemisphere convention.
inline std::optional<Vec3> circle_fit(const HarmonicBasis& b, const DensityGrid& d) {
  const double dphi = kTwoPi / b.nphi;
  double mom[3][3] = {};
  double total = 0;
  for (int j = 0; j < b.ntheta; ++j) {
    double theta = std::acos(b.nodes_c[j]);
    for (int a = 0; a < b.nphi; ++a) {
      double wgt = b.weights[j] * dphi * d.at(j, a);
      Vec3 x = position_ambient(theta, b.phis[a]);
      double xv[3] = {x.x, x.y, x.z};
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) mom[p][q] += wgt * xv[p] * xv[q];
      total += wgt;
    }
  }
  if (total <= 0) return std::nullopt;
  CMatrix m3(3);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) m3(p, q) = mom[p][q] / total;
  Eigensystem es = hermitian_eig(m3);
  if (es.values[0] > 0.8 * es.values[1]) return std::nullopt;  // isotropic: no dominant circle
  Vec3 n{es.vectors(0, 0).real(), es.vectors(1, 0).real(), es.vectors(2, 0).real()};
  n = normalized(n);
  if (n.z < 0 || (n.z == 0 && (n.x < 0 || (n.x == 0 && n.y < 0)))) n = -1.0 * n;
  return n;
}

// ---- experiments ----

struct TransportSample {
  double t = 0.0;             // scaled time
  Vec3 fitted{};              // circle_fit normal of the evolved density
  Vec3 predicted{};           // normal of phi_V^t(Gamma_0) from the effective flow
  double angle_error = 0.0;   // radians, modulo the normal's sign
  double mass_moving = 0.0;   // tube mass around the predicted circle
  double mass_initial = 0.0;  // tube mass around the fixed initial circle
  double truncation_weight = 0.0;  // weight of the top two l-shells
};

struct TransportReport {
  EvolutionPlan plan;
  Vec3 n0{};
  double tube_halfwidth = 0.35;
  double initial_halfwidth = 0.35;  // width used for the fixed-circle mass
  std::vector<TransportSample> samples;

  double mean_initial_mass() const {
    double acc = 0;
    for (const auto& s : samples) acc += s.mass_initial;
    return samples.empty() ? 0.0 : acc / samples.size();
  }
  double max_angle_error() const {
    double w = 0;
    for (const auto& s : samples) w = std::max(w, s.angle_error);
    return w;
  }
  double min_moving_mass() const {
    double w = 1;
    for (const auto& s : samples) w = std::min(w, s.mass_moving);
    return w;
  }
};

// Evolves the geodesic state with normal n0 under P_eps(hbar) and compares
// the fitted concentration circle with the effective-flow prediction at each
// scaled time.  Round sphere only (the quantum side lives on S^2).
inline TransportReport transport_experiment(const EvolutionPlan& plan, const Potential& v, Vec3 n0,
                                            double tube_halfwidth = 0.35,
                                            double initial_halfwidth = 0.0,
                                            const RadonOptions& radon_opt = {}) {
  plan.validate();
  if (plan.law != TimeScaleLaw::EpsInvSq && plan.law != TimeScaleLaw::ScaledEpsInvSq)
    throw std::invalid_argument("transport_experiment: plan must use the eps^{-2} scale");
  if (initial_halfwidth <= 0.0) initial_halfwidth = tube_halfwidth;
  ZollSurface sphere = ZollSurface::canonical_sphere();
  HarmonicBasis basis = HarmonicBasis::build(plan.lmax);
  n0 = normalized(n0);
  HarmonicState s0 = geodesic_state(basis, n0, plan.l);
  AxisymEigensystem es = eig_blocks(hamiltonian_blocks(basis, plan.hbar, plan.eps, v));
  const double tau = plan.tau();

  TransportReport rep;
  rep.plan = plan;
  rep.n0 = n0;
  rep.tube_halfwidth = tube_halfwidth;
  rep.initial_halfwidth = initial_halfwidth;
  PhasePoint rho = phase_point_from_normal(n0);
  double t_prev = 0.0;
  for (double t : plan.times) {
    if (t != t_prev) {
      rho = effective_flow(sphere, v, rho, t - t_prev, 1e-8, radon_opt);
      t_prev = t;
    }
    Vec3 n_pred = geodesic_normal_chart(sphere, rho);
    HarmonicState st = propagate_blocks(basis, es, plan.hbar, s0, t * tau);
    DensityGrid d = position_density(basis, st);
    TransportSample sample;
    sample.t = t;
    sample.predicted = n_pred;
    std::optional<Vec3> fit = circle_fit(basis, d);
    sample.fitted = fit.value_or(Vec3{0, 0, 0});
    if (fit) {
      double a1 = angle_between(*fit, n_pred);
      double a2 = angle_between(-1.0 * (*fit), n_pred);
      sample.angle_error = std::min(a1, a2);
    } else {
      sample.angle_error = kPi;  // no dominant circle found
    }
    sample.mass_moving = tube_mass(basis, st, n_pred, tube_halfwidth);
    sample.mass_initial = tube_mass(basis, st, n0, initial_halfwidth);
    double top = 0;
    for (int l = plan.lmax - 1; l <= plan.lmax; ++l)
      for (int m = -l; m <= l; ++m) top += std::norm(st.c[basis.flat_index(l, m)]);
    sample.truncation_weight = top;
    if (sample.truncation_weight > 1e-8)
      throw std::runtime_error("transport_experiment: truncation leakage exceeds 1e-8");
    rep.samples.push_back(sample);
  }
  return rep;
}

struct EchoSeries {
  EvolutionPlan plan;
  std::vector<double> t;   // scaled times
  std::vector<cplx> f;     // F_hbar(t tau)

  double max_abs() const {
    double w = 0;
    for (const cplx& z : f) w = std::max(w, std::abs(z));
    return w;
  }
};

// F(t) = < e^{-i t tau P_eps / hbar} u , e^{-i t tau P_0 / hbar} u >, inner
// product conjugate-linear in the first slot.  The free branch is diagonal.
inline EchoSeries loschmidt(const EvolutionPlan& plan, const Potential& v,
                            const HarmonicState& u) {
  plan.validate();
  HarmonicBasis basis = HarmonicBasis::build(plan.lmax);
  if (u.c.size() != static_cast<std::size_t>(basis.size()))
    throw std::invalid_argument("loschmidt: state size does not match plan lmax");
  const double tau = plan.tau();
  // At eps = 0 the two branches coincide and the free phases cancel exactly.
  std::optional<AxisymEigensystem> es;
  if (plan.eps > 0) es = eig_blocks(hamiltonian_blocks(basis, plan.hbar, plan.eps, v));

  EchoSeries series;
  series.plan = plan;
  for (double t : plan.times) {
    double tp = t * tau;
    cplx acc = 0;
    if (!es) {
      for (const cplx& z : u.c) acc += std::norm(z);
    } else {
      HarmonicState ve = propagate_blocks(basis, *es, plan.hbar, u, tp);
      for (int l = 0; l <= basis.lmax; ++l) {
        double ang = -tp * 0.5 * plan.hbar * l * (l + 1.0);  // e^{-i tp hbar l(l+1)/2}
        cplx phase{std::cos(ang), std::sin(ang)};
        for (int m = -l; m <= l; ++m) {
          int i = basis.flat_index(l, m);
          acc += std::conj(ve.c[i]) * (phase * u.c[i]);
        }
      }
    }
    series.t.push_back(t);
    series.f.push_back(acc);
  }
  return series;
}

// Equal superposition of two geodesic states (normalized); the standard echo
// initial datum with two distinct Radon values.
inline HarmonicState two_circle_superposition(const HarmonicBasis& b, Vec3 n1, Vec3 n2, int l) {
  HarmonicState a = geodesic_state(b, n1, l);
  HarmonicState c = geodesic_state(b, n2, l);
  HarmonicState out;
  out.c.resize(a.c.size());
  for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] = a.c[i] + c.c[i];
  out.normalize();
  return out;
}

}  // namespace zoll
