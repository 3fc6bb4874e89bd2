#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "zoll/geodesic.hpp"

using namespace zoll;

namespace {
ZollSurface tannery03() { return ZollSurface::tannery(RevolutionProfile::odd({0.3, -0.3})); }

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

double chart_distance(const PhasePoint& a, const PhasePoint& b) {
  double dphi = std::remainder(a.phi - b.phi, kTwoPi);
  return std::sqrt((a.theta - b.theta) * (a.theta - b.theta) + dphi * dphi +
                   (a.p_theta - b.p_theta) * (a.p_theta - b.p_theta) +
                   (a.p_phi - b.p_phi) * (a.p_phi - b.p_phi));
}
}  // namespace

TEST_CASE("flow basics") {
  ZollSurface sphere = ZollSurface::canonical_sphere();
  PhasePoint eq{kPi / 2, 0.8, 0.0, 1.0};
  SECTION("s = 0 is the identity") {
    PhasePoint r = flow(sphere, eq, 0.0);
    CHECK(chart_distance(r, eq) == 0.0);
  }
  SECTION("equatorial great circle closes after 2 pi") {
    PhasePoint r = flow(sphere, eq, kTwoPi, 1e-11);
    CHECK(chart_distance(r, eq) < 1e-9);
  }
  SECTION("quarter period lands at phi + pi/2") {
    PhasePoint r = flow(sphere, eq, kPi / 2, 1e-11);
    CHECK(r.phi == Catch::Approx(0.8 + kPi / 2).margin(1e-9));
    CHECK(r.theta == Catch::Approx(kPi / 2).margin(1e-10));
  }
}

TEST_CASE("closure") {
  std::mt19937_64 rng(2024);
  ZollSurface sphere = ZollSurface::canonical_sphere();
  ZollSurface tan = tannery03();
  SECTION("round sphere: 100 random unit covectors close to 1e-9") {
    double worst = 0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, closure_defect(sphere, random_unit(sphere, rng)));
    CHECK(worst < 1e-9);
  }
  SECTION("tannery: 100 random initial conditions close to 1e-6") {
    double worst = 0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, closure_defect(tan, random_unit(tan, rng)));
    CHECK(worst < 1e-6);
  }
  SECTION("flow at tightened tolerance confirms the closure points") {
    PhasePoint r0 = random_unit(tan, rng);
    PhasePoint a = flow(tan, r0, kTwoPi, 1e-10);
    PhasePoint b = flow(tan, r0, kTwoPi, 1e-13);
    CHECK(chart_distance(a, b) < 1e-8);
  }
  SECTION("non-Zoll fixture misses closure for a generic initial condition") {
    // non-odd profile: sigma = 0.3 c + 0.2 c^2 (not a C_2pi metric)
    ZollSurface bad = make_surface_unchecked({0.0, 0.3, 0.2});
    double worst = 0;
    for (int i = 0; i < 10; ++i)
      worst = std::max(worst, closure_defect(bad, random_unit(bad, rng)));
    CHECK(worst > 1e-2);
  }
  SECTION("unit energy precondition") {
    PhasePoint r0 = random_unit(sphere, rng);
    r0.p_theta *= 2;
    r0.p_phi *= 2;
    CHECK_THROWS_AS(closure_defect(sphere, r0), std::invalid_argument);
  }
}

TEST_CASE("trajectory sampling") {
  ZollSurface sphere = ZollSurface::canonical_sphere();
  PhasePoint eq{kPi / 2, 0.0, 0.0, 1.0};
  SECTION("equator samples are equally spaced in phi") {
    Geodesic g = trajectory(sphere, eq, 16);
    REQUIRE(g.samples.size() == 16);
    for (int k = 0; k < 16; ++k)
      CHECK(std::remainder(g.samples[k].phi - kTwoPi * k / 16.0, kTwoPi) ==
            Catch::Approx(0.0).margin(1e-9));
  }
  SECTION("energy is shared by all samples") {
    ZollSurface tan = tannery03();
    std::mt19937_64 rng(5);
    PhasePoint r0 = random_unit(tan, rng);
    Geodesic g = trajectory(tan, r0, 64);
    for (const PhasePoint& p : g.samples)
      CHECK(hamiltonian_p0(tan, p) == Catch::Approx(g.energy).margin(1e-8));
  }
  SECTION("resampling at 2N and decimating reproduces the N samples") {
    ZollSurface tan = tannery03();
    std::mt19937_64 rng(6);
    PhasePoint r0 = random_unit(tan, rng);
    Geodesic a = trajectory(tan, r0, 32, 1e-11);
    Geodesic b = trajectory(tan, r0, 64, 1e-11);
    for (int k = 0; k < 32; ++k) CHECK(chart_distance(a.samples[k], b.samples[2 * k]) < 1e-8);
  }
  SECTION("sample count floor") {
    CHECK_THROWS_AS(trajectory(sphere, eq, 8), std::invalid_argument);
  }
}

TEST_CASE("conservation laws") {
  ZollSurface tan = tannery03();
  std::mt19937_64 rng(8);
  PhasePoint r0 = random_unit(tan, rng);
  double e0 = hamiltonian_p0(tan, r0);
  const double tol = 1e-10;
  for (double t : {-4.0 * kPi, -2.2, 0.9, kPi, 4.0 * kPi}) {
    PhasePoint r = flow(tan, r0, t, tol);
    CHECK(std::abs(hamiltonian_p0(tan, r) - e0) <= tol * (1 + std::abs(t)) * 50);
    CHECK(std::abs(r.p_phi - r0.p_phi) <= tol * (1 + std::abs(t)) * 50);  // Clairaut
  }
}

TEST_CASE("flow group law") {
  ZollSurface tan = tannery03();
  std::mt19937_64 rng(9);
  for (int i = 0; i < 5; ++i) {
    PhasePoint r0 = random_unit(tan, rng);
    PhasePoint a = flow(tan, flow(tan, r0, 1.1, 1e-10), 2.3, 1e-10);
    PhasePoint b = flow(tan, r0, 3.4, 1e-10);
    CHECK(chart_distance(a, b) < 1e-7);
  }
}

TEST_CASE("meridians cross the poles") {
  ZollSurface tan = tannery03();
  SECTION("meridian closes after one period") {
    PhasePoint m0{1.0, 0.4, tan.u(std::cos(1.0)), 0.0};
    PhasePoint r = flow(tan, m0, kTwoPi, 1e-11);
    CHECK(std::abs(r.theta - m0.theta) < 1e-9);
    CHECK(std::abs(std::remainder(r.phi - m0.phi, kTwoPi)) < 1e-9);
    CHECK(r.p_theta == Catch::Approx(m0.p_theta).margin(1e-8));
  }
  SECTION("azimuth flips by pi across a pole") {
    PhasePoint m0{0.5, 1.0, -tan.u(std::cos(0.5)), 0.0};  // heading north
    PhasePoint r = flow(tan, m0, 1.2, 1e-11);             // past the pole
    CHECK(std::abs(std::remainder(r.phi - (m0.phi + kPi), kTwoPi)) < 1e-9);
    CHECK(r.p_theta > 0);  // now moving south on the far side
  }
  SECTION("round sphere: rotated chart agrees with the meridian branch") {
    ZollSurface sphere = ZollSurface::canonical_sphere();
    PhasePoint exact{0.5, 1.0, -1.0, 0.0};
    // nearby non-meridian geodesic swings within 1e-8 of the pole and runs
    // through the rotated chart
    PhasePoint near = exact;
    near.p_phi = 1e-8;
    for (double t : {1.2, 2.5, 5.0}) {
      PhasePoint a = flow(sphere, exact, t, 1e-11);
      PhasePoint b = flow(sphere, near, t, 1e-11);
      CHECK(norm(position_ambient(a) - position_ambient(b)) < 1e-6);
    }
  }
}

TEST_CASE("tangent flow") {
  ZollSurface tan = tannery03();
  std::mt19937_64 rng(12);
  PhasePoint r0 = random_unit(tan, rng);
  SECTION("the flow direction is invariant") {
    std::array<double, 4> v0 = geodesic_field(tan, r0);
    for (double t : {0.7, 1.9}) {
      std::array<double, 4> vt = tangent_flow(tan, r0, t, v0, 1e-11);
      std::array<double, 4> expect = geodesic_field(tan, flow(tan, r0, t, 1e-11));
      for (int i = 0; i < 4; ++i) CHECK(vt[i] == Catch::Approx(expect[i]).margin(1e-7));
    }
  }
  SECTION("round sphere: the period map fixes the unit-bundle directions") {
    // phi^{2 pi} is the identity on S*M, so its differential fixes every
    // vector with dp0(v) = 0; energy-changing directions shear instead.
    ZollSurface sphere = ZollSurface::canonical_sphere();
    PhasePoint r = random_unit(sphere, rng);
    std::array<double, 4> v{0.3, -0.2, 0.5, 0.4};
    // remove the energy component using the fiber Euler vector (0,0,ptheta,pphi)
    std::array<double, 4> x = geodesic_field(sphere, r);
    double dp0_v = -x[2] * v[0] + x[0] * v[2] + x[1] * v[3];  // dp0 = (-ptheta', 0, theta', phi')
    std::array<double, 4> w{0, 0, r.p_theta, r.p_phi};
    double dp0_w = x[0] * w[2] + x[1] * w[3];  // = 2 p0
    std::array<double, 4> v0;
    for (int i = 0; i < 4; ++i) v0[i] = v[i] - (dp0_v / dp0_w) * w[i];
    std::array<double, 4> vt = tangent_flow(sphere, r, kTwoPi, v0, 1e-12);
    for (int i = 0; i < 4; ++i) CHECK(vt[i] == Catch::Approx(v0[i]).margin(1e-7));
  }
  SECTION("finite differences of the flow match") {
    std::array<double, 4> dirs[4] = {
        {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    const double h = 1e-6, t = 1.3;
    for (const auto& v0 : dirs) {
      std::array<double, 4> vt = tangent_flow(tan, r0, t, v0, 1e-11);
      PhasePoint rp = r0, rm = r0;
      rp.theta += h * v0[0];
      rp.phi += h * v0[1];
      rp.p_theta += h * v0[2];
      rp.p_phi += h * v0[3];
      rm.theta -= h * v0[0];
      rm.phi -= h * v0[1];
      rm.p_theta -= h * v0[2];
      rm.p_phi -= h * v0[3];
      PhasePoint fp = flow(tan, rp, t, 1e-12), fm = flow(tan, rm, t, 1e-12);
      double fd[4] = {(fp.theta - fm.theta) / (2 * h), (fp.phi - fm.phi) / (2 * h),
                      (fp.p_theta - fm.p_theta) / (2 * h), (fp.p_phi - fm.p_phi) / (2 * h)};
      for (int i = 0; i < 4; ++i) CHECK(vt[i] == Catch::Approx(fd[i]).margin(1e-5));
    }
  }
}
