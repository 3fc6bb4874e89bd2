#pragma once

// Structural invariant suite: every module invariant that is cheap enough
// to run on each `verify` invocation, with one named result per check.
// Deterministic for a fixed seed.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "zoll/evolve.hpp"
#include "zoll/quadrature.hpp"
#include "zoll/radon.hpp"
#include "zoll/zelditch.hpp"

namespace zoll {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;   // the defect / statistic
  double bound = 0.0;      // the tolerance it was held to
};

namespace detail {

inline PhasePoint random_unit_point(const ZollSurface& s, std::mt19937_64& rng,
                                    double theta_lo = 0.25, double theta_hi = kPi - 0.25) {
  std::uniform_real_distribution<double> uth(theta_lo, theta_hi), uph(0.0, kTwoPi),
      ups(0.0, kTwoPi);
  double th = uth(rng), ph = uph(rng), ps = ups(rng);
  PhasePoint r;
  r.theta = th;
  r.phi = ph;
  r.p_theta = s.u(std::cos(th)) * std::cos(ps);
  r.p_phi = std::sin(th) * std::sin(ps);
  return r;
}

}  // namespace detail

using CheckObserver = std::function<void(const CheckResult&)>;

inline std::vector<CheckResult> run_verify_suite(std::uint64_t seed = 1,
                                                 const CheckObserver& observe = {}) {
  std::vector<CheckResult> out;
  auto push = [&](const std::string& name, double measured, double bound) {
    out.push_back({name, measured <= bound, measured, bound});
    if (observe) observe(out.back());
  };
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);

  ZollSurface sphere = ZollSurface::canonical_sphere();
  ZollSurface tannery = ZollSurface::tannery(RevolutionProfile::odd({0.3, -0.3}));
  ZollSurface tannery2 = ZollSurface::tannery(RevolutionProfile::odd({0.1, -0.3, 0.2}));

  {  // round-sphere curvature on a 1000-point grid
    double worst = 0;
    for (int i = 1; i < 1000; ++i)
      worst = std::max(worst, std::abs(curvature(sphere, kPi * i / 1000.0) - 1.0));
    push("geometry.round_curvature_unity", worst, 1e-14);
  }
  {  // metric positivity and K(pi/2) = 1 on admissible profiles
    double worst = 0;
    for (const ZollSurface* s : {&tannery, &tannery2}) {
      for (int i = 1; i < 500; ++i) {
        InverseMetric gi = metric_inverse(*s, kPi * i / 500.0);
        if (gi.gtt <= 0 || gi.gpp <= 0) worst = 1.0;
      }
      worst = std::max(worst, std::abs(curvature(*s, kPi / 2) - 1.0));
    }
    push("geometry.positivity_and_equator_curvature", worst, 1e-14);
  }
  {  // perp is an isometric quarter rotation (1e4 random points)
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
      const ZollSurface& s = (i % 2) ? tannery : sphere;
      PhasePoint r = detail::random_unit_point(s, rng);
      PhasePoint q = perp(s, r);
      InverseMetric gi = metric_inverse(s, r.theta);
      double ip = gi.gtt * r.p_theta * q.p_theta + gi.gpp * r.p_phi * q.p_phi;
      double nr = covector_norm_sq(s, r), nq = covector_norm_sq(s, q);
      worst = std::max({worst, std::abs(ip), std::abs(nr - nq)});
    }
    push("geometry.perp_isometric_quarter_rotation", worst, 1e-12);
  }
  {  // Gauss-Bonnet on every admissible profile in play
    double worst = 0;
    QuadratureRule q = gauss_legendre(400);
    for (const ZollSurface* s : {&sphere, &tannery, &tannery2}) {
      double acc = 0;
      for (int i = 0; i < 400; ++i)
        acc += q.weights[i] * curvature_at_c(*s, q.nodes[i]) * s->u(q.nodes[i]);
      worst = std::max(worst, std::abs(kTwoPi * acc - 4.0 * kPi));
    }
    push("geometry.gauss_bonnet_4pi", worst, 1e-8);
  }
  {  // flow group law within 2 tol
    double tol = 1e-10, worst = 0;
    for (int i = 0; i < 5; ++i) {
      const ZollSurface& s = (i % 2) ? tannery : sphere;
      PhasePoint r = detail::random_unit_point(s, rng);
      PhasePoint a = flow(s, flow(s, r, 1.3, tol), 2.1, tol);
      PhasePoint b = flow(s, r, 3.4, tol);
      worst = std::max({worst, std::abs(a.theta - b.theta),
                        std::abs(std::remainder(a.phi - b.phi, kTwoPi)),
                        std::abs(a.p_theta - b.p_theta), std::abs(a.p_phi - b.p_phi)});
    }
    push("geodesic.flow_group_law", worst, 2e-10);  // 2 tol
  }
  {  // energy and Clairaut conservation over [-4 pi, 4 pi]
    double tol = 1e-10, worst = 0;
    for (double t : {-4.0 * kPi, -1.7, 2.9, 4.0 * kPi}) {
      PhasePoint r = detail::random_unit_point(tannery, rng);
      PhasePoint f = flow(tannery, r, t, tol);
      worst = std::max(worst, std::abs(hamiltonian_p0(tannery, f) - hamiltonian_p0(tannery, r)) /
                                  (1.0 + std::abs(t)));
      worst = std::max(worst, std::abs(f.p_phi - r.p_phi) / (1.0 + std::abs(t)));
    }
    push("geodesic.energy_and_clairaut_conservation", worst, 1e-10 * 20);
  }
  {  // Zoll closure on all surfaces
    double worst_round = 0, worst_tan = 0;
    for (int i = 0; i < 20; ++i) {
      worst_round = std::max(worst_round,
                             closure_defect(sphere, detail::random_unit_point(sphere, rng)));
      worst_tan = std::max(worst_tan,
                           closure_defect(tannery, detail::random_unit_point(tannery, rng)));
      worst_tan = std::max(worst_tan,
                           closure_defect(tannery2, detail::random_unit_point(tannery2, rng)));
    }
    push("geodesic.zoll_closure_round", worst_round, 1e-9);
    push("geodesic.zoll_closure_tannery", worst_tan, 1e-6);
  }

  Potential vx3sq = Potential::x3_squared();
  {  // Radon flow invariance
    double worst = 0;
    for (double ssh : {0.3, 1.7, kPi}) {
      PhasePoint r = detail::random_unit_point(sphere, rng);
      worst = std::max(worst, std::abs(radon(sphere, vx3sq, flow(sphere, r, ssh, 1e-12)) -
                                       radon(sphere, vx3sq, r)));
    }
    push("radon.flow_invariance", worst, 1e-9);
  }
  {  // zero-homogeneity
    double worst = 0;
    for (double lam : {0.5, 2.0, 10.0}) {
      PhasePoint r = detail::random_unit_point(tannery, rng);
      worst = std::max(worst, radon_is_homogeneous(tannery, vx3sq, r, lam).defect);
    }
    push("radon.zero_homogeneity", worst, 1e-9);
  }
  {  // both directions of {p0, I_g(V)} = 0 and commuting flows
    PhasePoint r = detail::random_unit_point(sphere, rng);
    double j0 = radon(sphere, vx3sq, r);
    double e0 = hamiltonian_p0(sphere, r);
    PhasePoint rv = effective_flow(sphere, vx3sq, r, 0.4, 1e-8);
    double worst_cons = std::max(std::abs(radon(sphere, vx3sq, flow(sphere, r, 1.1, 1e-12)) - j0),
                                 std::abs(hamiltonian_p0(sphere, rv) - e0));
    push("radon.poisson_commutation_p0", worst_cons, 1e-7);
    PhasePoint a = flow(sphere, rv, 0.9, 1e-10);
    PhasePoint b = effective_flow(sphere, vx3sq, flow(sphere, r, 0.9, 1e-10), 0.4, 1e-8);
    double worst_comm = std::max({std::abs(a.theta - b.theta),
                                  std::abs(std::remainder(a.phi - b.phi, kTwoPi)),
                                  std::abs(a.p_theta - b.p_theta), std::abs(a.p_phi - b.p_phi)});
    push("radon.flows_commute", worst_comm, 1e-7);  // 10 x the effective-flow tolerance
  }
  {  // averaging idempotence: mean of I_g(V) along the orbit equals I_g(V)
    PhasePoint r = detail::random_unit_point(sphere, rng);
    double j0 = radon(sphere, vx3sq, r);
    double acc = 0;
    const int m = 32;
    for (int k = 0; k < m; ++k)
      acc += radon(sphere, vx3sq, flow(sphere, r, kTwoPi * k / m, 1e-12));
    push("radon.averaging_idempotent", std::abs(acc / m - j0), 1e-9);
  }

  {  // Wronskian of the Jacobi pair
    double worst = wronskian_defect(jacobi_solve(sphere, {1.0, 0.3, 0.6, 0.5}, 512));
    worst = std::max(worst, wronskian_defect(jacobi_solve(tannery, {1.2, 0.0, 0.4, 0.7}, 512)));
    worst = std::max(worst,
                     wronskian_defect(jacobi_solve(tannery, {kPi / 2, 0.1, -tannery.u(0.0), 0.0}, 512)));
    push("zelditch.wronskian_unity", worst, 1e-8);
  }
  {  // q0 constant along the orbit and under xi -> -xi
    PhasePoint r{1.1, 0.4, 0.5 * tannery.u(std::cos(1.1)), 0.8};
    double q = q0(tannery, r, 1024);
    double worst = 0;
    for (double ssh : {0.7, 2.1})
      worst = std::max(worst, std::abs(q0(tannery, flow(tannery, r, ssh, 1e-11), 1024) - q));
    push("zelditch.q0_orbit_constancy", worst, 1e-6);
    PhasePoint rr = r;
    rr.p_theta = -rr.p_theta;
    rr.p_phi = -rr.p_phi;
    push("zelditch.q0_reversal_invariance", std::abs(q0(tannery, rr, 1024) - q), 1e-5);
  }
  {  // q0 separates the equator from the meridian (non-constancy witness),
     // each side checked against its independent oracle
    PhasePoint eq{kPi / 2, 0.0, 0.0, 1.0};
    PhasePoint mer{kPi / 2, 0.25, -tannery.u(0.0), 0.0};
    double qe = q0(tannery, eq), qm = q0(tannery, mer);
    double a = 0.3;
    double oracle_eq = 0.25 - a * a / 4.0;
    double oracle_mer = chebyshev_gauss_integral(
                            [&](double c) {
                              double u = tannery.u(c), up = tannery.du(c);
                              return (u - c * up) / (u * u);
                            },
                            4001) /
                        (4.0 * kPi);
    double worst = std::max(std::abs(qe - oracle_eq), std::abs(qm - oracle_mer));
    push("zelditch.q0_matches_both_oracles", worst, 1e-5);
    push("zelditch.q0_nonconstant_witness", (std::abs(qe - qm) > 1e-3) ? 0.0 : 1.0, 0.5);
  }

  {  // discrete orthonormality (Gram = identity)
    HarmonicBasis b = HarmonicBasis::build(16);
    double worst = 0;
    for (int l = 0; l <= 16; ++l)
      for (int m = -l; m <= l; ++m) {
        HarmonicState e;
        e.c.assign(b.size(), cplx{});
        e.c[b.flat_index(l, m)] = 1.0;
        HarmonicState r = analyze(b, synthesize(b, e));
        for (int i = 0; i < b.size(); ++i) {
          double expect = (i == b.flat_index(l, m)) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(r.c[i] - expect));
        }
      }
    push("spectral.gram_identity", worst, 1e-12);
  }
  {  // Parseval and round-trip on random states
    HarmonicBasis b = HarmonicBasis::build(24);
    std::normal_distribution<double> gauss;
    double worst_rt = 0, worst_par = 0;
    for (int rep = 0; rep < 3; ++rep) {
      HarmonicState s;
      s.c.resize(b.size());
      for (auto& z : s.c) z = cplx(gauss(rng), gauss(rng));
      s.normalize();
      Grid g = synthesize(b, s);
      HarmonicState r = analyze(b, g);
      for (int i = 0; i < b.size(); ++i) worst_rt = std::max(worst_rt, std::abs(r.c[i] - s.c[i]));
      DensityGrid d;
      d.ntheta = g.ntheta;
      d.nphi = g.nphi;
      d.v.resize(g.v.size());
      for (std::size_t i = 0; i < g.v.size(); ++i) d.v[i] = std::norm(g.v[i]);
      worst_par = std::max(worst_par, std::abs(density_integral(b, d) - 1.0));
    }
    push("spectral.transform_roundtrip", worst_rt, 1e-11);
    push("spectral.parseval", worst_par, 1e-11);
  }
  {  // Hermiticity, averaging commutation/idempotence, contraction bounds
    HarmonicBasis b = HarmonicBasis::build(14);
    OperatorMatrix vm = potential_matrix(b, vx3sq);
    OperatorMatrix h = hamiltonian_matrix(b, 0.2, 0.3, vx3sq);
    double worst_h = std::max(vm.m.hermiticity_defect(), h.m.hermiticity_defect());
    push("spectral.hermiticity", worst_h, 1e-12);
    OperatorMatrix avg = quantum_average(b, vm);
    OperatorMatrix h0 = hamiltonian_matrix(b, 0.2, 0.0, vx3sq);
    double comm = (avg.m * h0.m - h0.m * avg.m).frobenius();
    OperatorMatrix avg2 = quantum_average(b, avg);
    push("spectral.average_commutes_with_free_hamiltonian", comm, 1e-13);
    push("spectral.average_idempotent", (avg2.m - avg.m).frobenius(), 0.0);
    double worst_band = 0;
    for (int l : {4, 9, 14}) {
      std::vector<double> bv = band_invariants(b, vx3sq, l);
      worst_band = std::max(worst_band, std::max(0.0 - bv.front(), bv.back() - 1.0));
    }
    push("spectral.band_contraction_bounds", worst_band, 1e-9);
  }
  {  // eigensolver residual and unitarity on a seeded random Hermitian
    const int n = 40;
    CMatrix m(n);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        cplx z = (i == j) ? cplx(gauss(rng), 0.0) : cplx(gauss(rng), gauss(rng));
        m(i, j) = z;
        m(j, i) = std::conj(z);
      }
    Eigensystem es = hermitian_eig(m);
    double hnorm = m.frobenius();
    double worst = 0;
    for (int j = 0; j < n; ++j) {
      std::vector<cplx> x(n);
      for (int i = 0; i < n; ++i) x[i] = es.vectors(i, j);
      std::vector<cplx> y = m.apply(x);
      double r = 0;
      for (int i = 0; i < n; ++i) r += std::norm(y[i] - es.values[j] * x[i]);
      worst = std::max(worst, std::sqrt(r) / hnorm);
    }
    double unit = (es.vectors.adjoint() * es.vectors - CMatrix::identity(n)).frobenius();
    push("spectral.eigensolver_residual", worst, 1e-9);
    push("spectral.eigenvector_unitarity", unit, 1e-9);
  }

  {  // propagation unitarity, echo bounds, truncation safety at l = 12
    EvolutionPlan plan = make_echo_plan(12, 0.7, 9);
    HarmonicBasis b = HarmonicBasis::build(plan.lmax);
    HarmonicState u = two_circle_superposition(b, Vec3{0, 0, 1}, Vec3{1, 0, 0}, plan.l);
    AxisymEigensystem es = eig_blocks(hamiltonian_blocks(b, plan.hbar, plan.eps, vx3sq));
    double worst_norm = 0, worst_trunc = 0;
    for (double t : plan.times) {
      HarmonicState st = propagate_blocks(b, es, plan.hbar, u, t * plan.tau());
      worst_norm = std::max(worst_norm, std::abs(st.norm() - 1.0));
      double top = 0;
      for (int l = plan.lmax - 1; l <= plan.lmax; ++l)
        for (int m = -l; m <= l; ++m) top += std::norm(st.c[b.flat_index(l, m)]);
      worst_trunc = std::max(worst_trunc, top);
    }
    push("evolve.propagation_unitarity", worst_norm, 1e-9);
    push("evolve.truncation_safety", worst_trunc, 1e-8);
    EchoSeries series = loschmidt(plan, vx3sq, u);
    double worst_f = std::abs(series.f.front() - cplx{1.0, 0.0});
    for (const cplx& z : series.f) worst_f = std::max(worst_f, std::abs(z) - 1.0);
    push("evolve.echo_bounds", worst_f, 1e-9);
  }
  {  // densities: normalization and the uniform-density tube area fraction
    HarmonicBasis b = HarmonicBasis::build(12);
    HarmonicState s;
    s.c.assign(b.size(), cplx{});
    s.c[b.flat_index(0, 0)] = 1.0;
    DensityGrid d = position_density(b, s);
    push("evolve.density_normalization", std::abs(density_integral(b, d) - 1.0), 1e-9);
    double half = tube_mass(b, s, Vec3{0, 0, 1}, kPi / 6.0);  // band area = half the sphere
    push("evolve.uniform_tube_area_fraction", std::abs(half - 0.5), 1e-6);
  }
  return out;
}

}  // namespace zoll
