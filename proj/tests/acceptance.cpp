// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code.  Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "zoll/evolve.hpp"
#include "zoll/quadrature.hpp"
#include "zoll/radon.hpp"
#include "zoll/verify.hpp"
#include "zoll/zelditch.hpp"

using namespace zoll;
using clk = std::chrono::steady_clock;

namespace {

struct Criterion {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

PhasePoint random_unit(const ZollSurface& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uth(0.2, kPi - 0.2), uph(0.0, kTwoPi), ups(0.0, kTwoPi);
  double th = uth(rng), ps = ups(rng);
  PhasePoint r;
  r.theta = th;
  r.phi = uph(rng);
  r.p_theta = s.u(std::cos(th)) * std::cos(ps);
  r.p_phi = std::sin(th) * std::sin(ps);
  return r;
}

// 1. q0 closed forms: round sphere 1/4 within 1e-8; for sigma = a c (1 - c^2)
//    the equator value 1/4 - 3 a^3 / 4 and the meridian value 1/4, each
//    within 1e-4, for a in {0.1, 0.3}.
Criterion criterion_q0() {
  Criterion c;
  ZollSurface sphere = ZollSurface::canonical_sphere();
  double qr = q0(sphere, {kPi / 2, 0.0, 0.0, 1.0});
  c.require(std::abs(qr - 0.25) < 1e-8, "round sphere q0 = " + fmt(qr));
  for (double a : {0.1, 0.3}) {
    ZollSurface tan = ZollSurface::tannery(RevolutionProfile::odd({a, -a}));
    double qe = q0(tan, {kPi / 2, 0.0, 0.0, 1.0});
    double expect_eq = 0.25 - 0.75 * a * a * a;
    c.require(std::abs(qe - expect_eq) < 1e-4,
              "equator a=" + fmt(a) + ": q0 = " + fmt(qe) + " vs " + fmt(expect_eq));
    double qm = q0(tan, {kPi / 2, 0.0, -tan.u(0.0), 0.0});
    c.require(std::abs(qm - 0.25) < 1e-4, "meridian a=" + fmt(a) + ": q0 = " + fmt(qm) + " vs 0.25");
  }
  return c;
}

// 2. Zoll closure below 1e-6 for 100 random unit initial conditions on the
//    round sphere and two Tannery profiles.
Criterion criterion_closure() {
  Criterion c;
  std::mt19937_64 rng(101);
  ZollSurface surfaces[3] = {ZollSurface::canonical_sphere(),
                             ZollSurface::tannery(RevolutionProfile::odd({0.3, -0.3})),
                             ZollSurface::tannery(RevolutionProfile::odd({0.1, -0.3, 0.2}))};
  const char* names[3] = {"round", "tannery a=0.3", "tannery multi"};
  for (int s = 0; s < 3; ++s) {
    double worst = 0;
    for (int i = 0; i < 100; ++i)
      worst = std::max(worst, closure_defect(surfaces[s], random_unit(surfaces[s], rng)));
    c.require(worst < 1e-6, std::string(names[s]) + " worst defect " + fmt(worst));
    if (c.pass && s == 2) c.note("worst defect " + fmt(worst));
  }
  return c;
}

// 3. Radon suite: constants 1e-12, odd potentials 1e-10, homogeneity and
//    flow invariance 1e-9, and the x3^2 closed form 1e-10 at 50 geodesics.
Criterion criterion_radon() {
  Criterion c;
  std::mt19937_64 rng(102);
  ZollSurface sphere = ZollSurface::canonical_sphere();
  {
    double worst = 0;
    for (int i = 0; i < 10; ++i)
      worst = std::max(worst,
                       std::abs(radon(sphere, Potential::constant(1.7), random_unit(sphere, rng)) - 1.7));
    c.require(worst < 1e-12, "constant average defect " + fmt(worst));
  }
  {
    Potential odd = Potential::ambient({{0, 0, 1, 1.0}, {1, 0, 0, -0.4}, {1, 1, 1, 0.8}});
    double worst = 0;
    for (int i = 0; i < 10; ++i)
      worst = std::max(worst, std::abs(radon(sphere, odd, random_unit(sphere, rng))));
    c.require(worst < 1e-10, "odd average " + fmt(worst));
  }
  {
    Potential v = Potential::x3_squared();
    double worst = 0;
    for (double lam : {0.5, 2.0, 10.0})
      worst = std::max(worst, radon_is_homogeneous(sphere, v, random_unit(sphere, rng), lam).defect);
    c.require(worst < 1e-9, "homogeneity defect " + fmt(worst));
    double worst_inv = 0;
    PhasePoint r = random_unit(sphere, rng);
    double base = radon(sphere, v, r);
    for (double s : {0.3, 1.7, kPi})
      worst_inv = std::max(worst_inv, std::abs(radon(sphere, v, flow(sphere, r, s, 1e-12)) - base));
    c.require(worst_inv < 1e-9, "flow invariance defect " + fmt(worst_inv));
    double worst_val = 0;
    for (int i = 0; i < 50; ++i) {
      PhasePoint p = random_unit(sphere, rng);
      Vec3 n = geodesic_normal_chart(sphere, p);
      worst_val = std::max(worst_val,
                           std::abs(radon(sphere, v, p) - 0.5 * (1.0 - n.z * n.z)));
    }
    c.require(worst_val < 1e-10, "x3^2 closed-form defect " + fmt(worst_val));
    if (c.pass) c.note("x3^2 defect " + fmt(worst_val));
  }
  return c;
}

// 4. Quantum averaging at L_max = 60: block projection commutes with the
//    free Hamiltonian to rounding, is idempotent, and kills x3 entirely.
Criterion criterion_averaging() {
  Criterion c;
  HarmonicBasis b = HarmonicBasis::build(60);
  AxisymmetricOperator vsq = potential_blocks(b, Potential::x3_squared());
  AxisymmetricOperator avg = average_blocks(vsq);
  AxisymmetricOperator avg2 = average_blocks(avg);
  AxisymmetricOperator h0 = hamiltonian_blocks(b, hbar_for_cluster(60), 0.0, Potential::x3_squared());
  AxisymmetricOperator x3avg = average_blocks(potential_blocks(b, Potential::x3()));
  double worst_comm = 0, worst_idem = 0, worst_x3 = 0, scale = 0;
  for (int m = -b.lmax; m <= b.lmax; ++m) {
    const CMatrix& a = avg.block(m);
    const CMatrix& h = h0.block(m);
    worst_comm = std::max(worst_comm, (a * h - h * a).frobenius());
    scale = std::max(scale, a.frobenius() * h.frobenius());
    worst_idem = std::max(worst_idem, (avg2.block(m) - a).frobenius());
    worst_x3 = std::max(worst_x3, x3avg.block(m).frobenius());
  }
  c.require(worst_comm <= 1e-14 * std::max(1.0, scale), "commutator " + fmt(worst_comm));
  c.require(worst_idem == 0.0, "idempotence defect " + fmt(worst_idem));
  c.require(worst_x3 < 1e-14, "averaged x3 norm " + fmt(worst_x3));
  if (c.pass)
    c.note("commutator " + fmt(worst_comm) + ", averaged x3 " + fmt(worst_x3));
  return c;
}

// 5. Weinstein/Radon consistency at l = 40: the band sits inside
//    [0, 1/2] + 3/(2l) and its empirical distribution is within KS 0.1 of
//    the pushforward of the uniform normal measure under (1 - n3^2)/2.
Criterion criterion_band() {
  Criterion c;
  const int l = 40;
  HarmonicBasis b = HarmonicBasis::build(l + 2);
  std::vector<double> bv = band_invariants(b, Potential::x3_squared(), l);
  double margin = 3.0 / (2.0 * l);
  c.require(bv.front() >= 0.0 - margin && bv.back() <= 0.5 + margin,
            "band range [" + fmt(bv.front()) + ", " + fmt(bv.back()) + "]");
  double ks = 0;
  const int n = static_cast<int>(bv.size());
  for (int i = 0; i < n; ++i) {
    double j = std::min(0.5, std::max(0.0, bv[i]));
    double f = 1.0 - std::sqrt(std::max(0.0, 1.0 - 2.0 * j));
    ks = std::max(ks, std::abs((i + 1.0) / n - f));
    ks = std::max(ks, std::abs(static_cast<double>(i) / n - f));
  }
  c.require(ks < 0.1, "KS distance " + fmt(ks));
  if (c.pass) c.note("KS " + fmt(ks) + ", range [" + fmt(bv.front()) + ", " + fmt(bv.back()) + "]");
  return c;
}

// 6. Level spacing: with hbar_l, eps = hbar^{1/2}, V = x3^2 and the window
//    [0.4, 0.6], the ratio s0 / (hbar eps^2) does not grow across
//    l in {20, 30, 40}.
Criterion criterion_gaps() {
  Criterion c;
  double prev = -1;
  std::string seq;
  for (int l : {20, 30, 40}) {
    double hb = hbar_for_cluster(l);
    double eps = std::sqrt(hb);
    HarmonicBasis b = HarmonicBasis::build(l + 20);
    AxisymEigensystem es = eig_blocks(hamiltonian_blocks(b, hb, eps, Potential::x3_squared()));
    double s0 = min_gap(all_eigenvalues(es), 0.5, 0.1, 1e-12);
    c.require(s0 != kNoGap, "window holds distinct eigenvalues");
    double ratio = s0 / (hb * eps * eps);
    seq += (seq.empty() ? "" : ", ") + fmt(ratio);
    if (prev >= 0) c.require(ratio <= prev * 1.1, "ratio grew: " + seq);
    prev = ratio;
  }
  c.note("ratios " + seq);
  return c;
}

struct TransportData {
  std::vector<int> ls{20, 30, 40};
  std::vector<TransportReport> reports;
};

TransportData run_transport_suite() {
  TransportData td;
  Vec3 n0 = normalized(Vec3{std::sqrt(3.0) / 2, 0.0, 0.5});  // n3 = 1/2
  for (int l : td.ls) {
    double wl = 0.35 * std::sqrt(20.0 / l);  // l-adapted width for criterion 8
    td.reports.push_back(
        transport_experiment(make_transport_plan(l, 33), Potential::x3_squared(), n0, 0.35, wl));
  }
  return td;
}

// 7. Critical-time transport: at l = 40 the fitted normal tracks the
//    effective-flow prediction within 0.1 rad on t in [0, 1] with moving
//    tube mass >= 0.7 at every sample; the angular error decreases from
//    l = 20 to l = 40.
Criterion criterion_transport(const TransportData& td) {
  Criterion c;
  const TransportReport& r40 = td.reports.back();
  c.require(r40.max_angle_error() < 0.1, "l=40 max error " + fmt(r40.max_angle_error()));
  c.require(r40.min_moving_mass() >= 0.7, "l=40 min moving mass " + fmt(r40.min_moving_mass()));
  double e20 = td.reports[0].max_angle_error();
  double e30 = td.reports[1].max_angle_error();
  double e40 = r40.max_angle_error();
  c.require(e30 < e20 && e40 < e30,
            "errors " + fmt(e20) + ", " + fmt(e30) + ", " + fmt(e40) + " not decreasing");
  if (c.pass)
    c.note("errors " + fmt(e20) + " > " + fmt(e30) + " > " + fmt(e40) + ", min mass " +
           fmt(r40.min_moving_mass()));
  return c;
}

// 8. Non-concentration trend: the time-averaged mass in the fixed initial
//    tube (half-width scaled as 0.35 sqrt(20/l), tracking the curve as the
//    states sharpen) decreases monotonically across l in {20, 30, 40}.
Criterion criterion_nonconcentration(const TransportData& td) {
  Criterion c;
  std::vector<double> means;
  std::string seq;
  for (const TransportReport& r : td.reports) {
    means.push_back(r.mean_initial_mass());
    seq += (seq.empty() ? "" : ", ") + fmt(means.back());
  }
  c.require(means[1] < means[0] && means[2] < means[1], "means " + seq + " not decreasing");
  c.note("scaled-width means " + seq);
  return c;
}

// 9. Loschmidt echo: eps = 0 gives F = 1 exactly; constant V gives the
//    exact global phase; the two-circle superposition at l = 40,
//    eps = hbar^{0.7}, tau = hbar/eps^2 stays within 0.1 of |cos(t/2 * dJ)|
//    with dJ = 1/2 on t in [0, 2 pi].
Criterion criterion_echo() {
  Criterion c;
  {
    EvolutionPlan p = make_echo_plan(12, 0.7, 17);
    p.eps = 0.0;
    p.law = TimeScaleLaw::User;
    p.user_tau = 25.0;
    HarmonicBasis b = HarmonicBasis::build(p.lmax);
    HarmonicState u = geodesic_state(b, Vec3{0, 0, 1}, p.l);
    EchoSeries es = loschmidt(p, Potential::x3_squared(), u);
    double worst = 0;
    for (const cplx& f : es.f) worst = std::max(worst, std::abs(f - cplx{1.0, 0.0}));
    c.require(worst < 1e-12, "free echo defect " + fmt(worst));
  }
  {
    EvolutionPlan p = make_echo_plan(12, 0.7, 17);
    HarmonicBasis b = HarmonicBasis::build(p.lmax);
    HarmonicState u = geodesic_state(b, Vec3{0, 0, 1}, p.l);
    EchoSeries es = loschmidt(p, Potential::constant(0.6), u);
    double worst = 0;
    for (std::size_t i = 0; i < es.t.size(); ++i)
      worst = std::max(worst,
                       std::abs(es.f[i] - cplx{std::cos(0.6 * es.t[i]), std::sin(0.6 * es.t[i])}));
    c.require(worst < 1e-12, "constant-V echo defect " + fmt(worst));
  }
  {
    EvolutionPlan p = make_echo_plan(40, 0.7, 65);
    HarmonicBasis b = HarmonicBasis::build(p.lmax);
    HarmonicState u = two_circle_superposition(b, Vec3{0, 0, 1}, Vec3{1, 0, 0}, p.l);
    EchoSeries es = loschmidt(p, Potential::x3_squared(), u);
    double worst = 0;
    for (std::size_t i = 0; i < es.t.size(); ++i)
      worst = std::max(worst, std::abs(std::abs(es.f[i]) - std::abs(std::cos(0.25 * es.t[i]))));
    c.require(worst < 0.1, "superposition deviation " + fmt(worst));
    if (c.pass) c.note("superposition deviation " + fmt(worst));
  }
  return c;
}

// 10. Structural invariants: the full verify suite passes.
Criterion criterion_verify() {
  Criterion c;
  std::vector<CheckResult> results = run_verify_suite(1);
  int failed = 0;
  for (const CheckResult& r : results)
    if (!r.pass) {
      ++failed;
      c.require(false, r.name + " measured " + fmt(r.measured) + " bound " + fmt(r.bound));
    }
  if (failed == 0) c.note(std::to_string(results.size()) + " invariants pass");
  return c;
}

}  // namespace

int main() {
  int failures = 0;
  int total = 0;
  auto timed = [&](const char* name, auto&& fn) {
    auto t0 = clk::now();
    Criterion c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(clk::now() - t0).count();
    std::printf("%s criterion %s [%.1fs]%s%s\n", c.pass ? "PASS" : "FAIL", name, secs,
                c.detail.empty() ? "" : ": ", c.detail.c_str());
    std::fflush(stdout);
    ++total;
    if (!c.pass) ++failures;
  };

  timed("1 q0 closed forms", criterion_q0);
  timed("2 zoll closure", criterion_closure);
  timed("3 radon suite", criterion_radon);
  timed("4 quantum averaging", criterion_averaging);
  timed("5 band consistency", criterion_band);
  timed("6 level spacing", criterion_gaps);
  TransportData td;
  timed("7 critical-time transport", [&] {
    td = run_transport_suite();
    return criterion_transport(td);
  });
  timed("8 non-concentration trend", [&] { return criterion_nonconcentration(td); });
  timed("9 loschmidt echo", criterion_echo);
  timed("10 structural invariants", criterion_verify);

  std::printf("%d/%d acceptance criteria pass\n", total - failures, total);
  return failures;
}
