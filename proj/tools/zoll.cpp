// Config-driven experiment runner: every module is exposed as a subcommand
// that writes plot-ready CSV.  Exit codes: 0 success, 2 config/validation
// error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "zoll/config.hpp"
#include "zoll/csvio.hpp"
#include "zoll/evolve.hpp"
#include "zoll/quadrature.hpp"
#include "zoll/radon.hpp"
#include "zoll/verify.hpp"
#include "zoll/zelditch.hpp"

namespace {

using namespace zoll;

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  long long seed = -1;  // -1: take the config's seed
  int jobs = 1;
};

ExperimentConfig load_config(const CliOptions& opt) {
  ExperimentConfig cfg;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path, std::ios::binary);
    if (!in) throw config_error("cannot read config file: " + opt.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = ExperimentConfig::parse(ss.str());
  }
  if (opt.seed >= 0) cfg.set("seed", std::to_string(opt.seed));
  return cfg;
}

std::string out_path(const CliOptions& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  return (std::filesystem::path(opt.out_dir) / name).string();
}

PhasePoint random_unit_point(const ZollSurface& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uth(0.25, kPi - 0.25), uph(0.0, kTwoPi), ups(0.0, kTwoPi);
  double th = uth(rng), ph = uph(rng), ps = ups(rng);
  PhasePoint r;
  r.theta = th;
  r.phi = ph;
  r.p_theta = s.u(std::cos(th)) * std::cos(ps);
  r.p_phi = std::sin(th) * std::sin(ps);
  return r;
}

PhasePoint point_from_config(const ExperimentConfig& cfg, const ZollSurface& s) {
  std::vector<double> ic = cfg.get_doubles("ic");
  if (ic.empty()) {
    // unit covector from (theta, direction angle) defaults
    double th = cfg.get_double("ic.theta", 1.1);
    double ps = cfg.get_double("ic.psi", 0.7);
    PhasePoint r;
    r.theta = th;
    r.phi = cfg.get_double("ic.phi", 0.0);
    r.p_theta = s.u(std::cos(th)) * std::cos(ps);
    r.p_phi = std::sin(th) * std::sin(ps);
    return r;
  }
  if (ic.size() != 4) throw config_error("config field ic: expected 'theta phi ptheta pphi'");
  return {ic[0], ic[1], ic[2], ic[3]};
}

int run_geodesic(const CliOptions& opt, const ExperimentConfig& cfg) {
  ZollSurface s = cfg.surface();
  long long count = cfg.get_int("geodesic.random_count", 0);
  std::size_t n = static_cast<std::size_t>(cfg.get_int("geodesic.samples", 256));
  double tol = cfg.get_double("geodesic.tol", 1e-10);
  if (tol <= 0) throw config_error("config field geodesic.tol: must be positive");
  CsvWriter csv(out_path(opt, "geodesic.csv"), cfg.digest(),
                {"ic", "s", "theta", "phi", "ptheta", "pphi", "energy", "closure_defect"});
  std::mt19937_64 rng(cfg.seed());
  long long nic = std::max(1ll, count);
  for (long long i = 0; i < nic; ++i) {
    PhasePoint r0 = (count > 0) ? random_unit_point(s, rng) : point_from_config(cfg, s);
    Geodesic g = trajectory(s, r0, n, tol);
    // closure is a unit-energy statement; rescale the covector for the check
    PhasePoint unit = r0;
    double nn = std::sqrt(covector_norm_sq(s, r0));
    unit.p_theta /= nn;
    unit.p_phi /= nn;
    double defect = closure_defect(s, unit, tol);
    for (std::size_t k = 0; k < g.samples.size(); ++k) {
      const PhasePoint& p = g.samples[k];
      csv.row({static_cast<double>(i), g.sample_spacing * k, p.theta, p.phi, p.p_theta, p.p_phi,
               hamiltonian_p0(s, p), defect});
    }
  }
  return 0;
}

int run_radon(const CliOptions& opt, const ExperimentConfig& cfg) {
  ZollSurface s = cfg.surface();
  Potential v = cfg.potential();
  long long count = cfg.get_int("radon.count", 20);
  RadonOptions ro;
  ro.samples = static_cast<std::size_t>(cfg.get_int("radon.samples", 256));
  std::mt19937_64 rng(cfg.seed());
  CsvWriter csv(out_path(opt, "radon.csv"), cfg.digest(),
                {"idx", "theta", "phi", "ptheta", "pphi", "value", "homogeneity_defect",
                 "flow_invariance_defect"});
  for (long long i = 0; i < count; ++i) {
    PhasePoint r = random_unit_point(s, rng);
    double val = radon(s, v, r, ro);
    double hom = radon_is_homogeneous(s, v, r, 2.0, ro).defect;
    double inv = std::abs(radon(s, v, flow(s, r, 1.3, ro.flow_tol), ro) - val);
    csv.row({static_cast<double>(i), r.theta, r.phi, r.p_theta, r.p_phi, val, hom, inv});
  }
  return 0;
}

int run_crit(const CliOptions& opt, const ExperimentConfig& cfg) {
  ZollSurface s = cfg.surface();
  Potential v = cfg.potential();
  int res = static_cast<int>(cfg.get_int("crit.resolution", 24));
  CriticalScanReport rep = critical_scan(s, v, res);
  CsvWriter csv(out_path(opt, "crit.csv"), cfg.digest(),
                {"theta0", "psi", "theta", "phi", "ptheta", "pphi", "residual"});
  if (rep.degenerate) {
    std::puts("degenerate: C(V) = M (the Radon gradient vanishes identically)");
    return 0;
  }
  for (const CriticalFinding& f : rep.findings)
    csv.row({f.theta0, f.psi, f.point.theta, f.point.phi, f.point.p_theta, f.point.p_phi,
             f.residual});
  std::printf("critical candidates: %zu\n", rep.findings.size());
  return 0;
}

int run_caustic(const CliOptions& opt, const ExperimentConfig& cfg) {
  ZollSurface s = cfg.surface();
  Potential v = cfg.potential();
  PhasePoint r0 = point_from_config(cfg, s);
  int grid = static_cast<int>(cfg.get_int("caustic.sgrid", 128));
  CausticScanReport rep = caustic_scan(s, v, r0, grid);
  CsvWriter csv(out_path(opt, "caustic.csv"), cfg.digest(), {"s", "theta", "phi"});
  if (rep.inside_crit) {
    std::puts("orbit inside Crit(L): the projected variation field vanishes identically");
    return 0;
  }
  for (double z : rep.zeros) {
    PhasePoint p = flow(s, r0, z, 1e-10);
    csv.row({z, p.theta, p.phi});
  }
  std::printf("caustic points per period: %zu\n", rep.zeros.size());
  return 0;
}

int run_q0(const CliOptions& opt, const ExperimentConfig& cfg) {
  ZollSurface s = cfg.surface();
  std::size_t n = static_cast<std::size_t>(cfg.get_int("q0.samples", 2048));
  long long sweep = cfg.get_int("q0.sweep_count", 9);
  CsvWriter csv(out_path(opt, "q0.csv"), cfg.digest(), {"label", "pphi", "q0"});
  PhasePoint eq{kPi / 2, 0.0, 0.0, 1.0};
  csv.row_tagged("equator", {1.0, q0(s, eq, n)});
  PhasePoint mer{kPi / 2, 0.0, -s.u(0.0), 0.0};
  csv.row_tagged("meridian", {0.0, q0(s, mer, n)});
  for (long long k = 1; k + 1 <= sweep; ++k) {
    // Clairaut sweep between the meridian and the equator at the phi = 0 section.
    double pphi = static_cast<double>(k) / static_cast<double>(sweep);
    double psi = std::asin(pphi);
    PhasePoint r{kPi / 2, 0.0, -s.u(0.0) * std::cos(psi), std::sin(psi)};
    csv.row_tagged("tilt", {pphi, q0(s, r, n)});
  }
  return 0;
}

int run_band(const CliOptions& opt, const ExperimentConfig& cfg) {
  Potential v = cfg.potential();
  std::vector<long long> ls = cfg.get_ints("band.l", {10, 20, 40});
  CsvWriter csv(out_path(opt, "band.csv"), cfg.digest(), {"l", "idx", "eigenvalue"});
  for (long long l : ls) {
    HarmonicBasis b = HarmonicBasis::build(static_cast<int>(l) + 2);
    std::vector<double> bv = band_invariants(b, v, static_cast<int>(l));
    for (std::size_t i = 0; i < bv.size(); ++i)
      csv.row({static_cast<double>(l), static_cast<double>(i), bv[i]});
  }
  return 0;
}

int run_gaps(const CliOptions& opt, const ExperimentConfig& cfg) {
  Potential v = cfg.potential();
  std::vector<long long> ls = cfg.get_ints("gaps.l", {20, 30, 40});
  double exponent = cfg.get_double("gaps.eps_exponent", 0.5);
  double e0 = cfg.get_double("gaps.e0", 0.5);
  double delta0 = cfg.get_double("gaps.delta0", 0.1);
  if (delta0 <= 0 || e0 <= 0) throw config_error("config field gaps.e0/gaps.delta0: must be positive");
  CsvWriter csv(out_path(opt, "gaps.csv"), cfg.digest(),
                {"l", "hbar", "eps", "s0", "s0_over_hbar_eps_sq"});
  for (long long l : ls) {
    double hb = hbar_for_cluster(static_cast<int>(l));
    double eps = std::pow(hb, exponent);
    HarmonicBasis b = HarmonicBasis::build(static_cast<int>(l) + 20);
    AxisymEigensystem es = eig_blocks(hamiltonian_blocks(b, hb, eps, v));
    double s0 = min_gap(all_eigenvalues(es), e0, delta0, 1e-12);
    csv.row({static_cast<double>(l), hb, eps, s0, s0 / (hb * eps * eps)});
  }
  return 0;
}

int run_transport(const CliOptions& opt, const ExperimentConfig& cfg) {
  Potential v = cfg.potential();
  std::vector<long long> ls = cfg.get_ints("transport.l", {20, 30, 40});
  double n3 = cfg.get_double("transport.n3", 0.5);
  if (!(n3 > -1 && n3 < 1)) throw config_error("config field transport.n3: in (-1, 1)");
  int samples = static_cast<int>(cfg.get_int("transport.samples", 33));
  double w = cfg.get_double("transport.tube_halfwidth", 0.35);
  Vec3 n0 = normalized(Vec3{std::sqrt(1.0 - n3 * n3), 0.0, n3});
  CsvWriter csv(out_path(opt, "transport.csv"), cfg.digest(),
                {"l", "t", "fit_x", "fit_y", "fit_z", "pred_x", "pred_y", "pred_z",
                 "angle_error", "tube_mass_moving", "tube_mass_initial"});
  for (long long l : ls) {
    TransportReport rep = transport_experiment(make_transport_plan(static_cast<int>(l), samples),
                                               v, n0, w);
    for (const TransportSample& sm : rep.samples)
      csv.row({static_cast<double>(l), sm.t, sm.fitted.x, sm.fitted.y, sm.fitted.z,
               sm.predicted.x, sm.predicted.y, sm.predicted.z, sm.angle_error, sm.mass_moving,
               sm.mass_initial});
  }
  return 0;
}

int run_echo(const CliOptions& opt, const ExperimentConfig& cfg) {
  Potential v = cfg.potential();
  int l = static_cast<int>(cfg.get_int("echo.l", 40));
  double exponent = cfg.get_double("echo.eps_exponent", 0.7);
  if (!(exponent > 0.5))
    throw config_error("config field echo.eps_exponent: the echo regime needs exponent > 1/2");
  int samples = static_cast<int>(cfg.get_int("echo.samples", 65));
  EvolutionPlan plan = make_echo_plan(l, exponent, samples);
  HarmonicBasis b = HarmonicBasis::build(plan.lmax);
  HarmonicState u = two_circle_superposition(b, Vec3{0, 0, 1}, Vec3{1, 0, 0}, l);
  EchoSeries es = loschmidt(plan, v, u);
  // Semiclassical prediction |cos(t dJ / 2)| from the two Radon values.
  ZollSurface sphere = ZollSurface::canonical_sphere();
  double j1 = radon(sphere, v, phase_point_from_normal(Vec3{0, 0, 1}));
  double j2 = radon(sphere, v, phase_point_from_normal(Vec3{1, 0, 0}));
  CsvWriter csv(out_path(opt, "echo.csv"), cfg.digest(),
                {"t", "re_f", "im_f", "abs_f", "predicted_abs_f"});
  for (std::size_t i = 0; i < es.t.size(); ++i)
    csv.row({es.t[i], es.f[i].real(), es.f[i].imag(), std::abs(es.f[i]),
             std::abs(std::cos(0.5 * es.t[i] * (j2 - j1)))});
  return 0;
}

int run_verify(const ExperimentConfig& cfg) {
  int failures = 0;
  std::size_t count = 0;
  std::vector<CheckResult> results = run_verify_suite(cfg.seed() + 1, [&](const CheckResult& r) {
    std::printf("%s %-50s measured %.3e bound %.3e\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.measured, r.bound);
    std::fflush(stdout);
    if (!r.pass) ++failures;
    ++count;
  });
  std::printf("%zu/%zu invariants pass\n", count - failures, count);
  return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zoll: geodesic dynamics, Radon averages, and semiclassical evolution on Zoll surfaces"};
  app.require_subcommand(1);
  CliOptions opt;

  const std::vector<std::string> names = {"geodesic", "radon", "crit",      "caustic", "q0",
                                          "band",     "gaps",  "transport", "echo",    "verify"};
  for (const std::string& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "experiment config file (flat key=value or JSON)");
    sub->add_option("--out", opt.out_dir, "output directory for CSV artifacts");
    sub->add_option("--seed", opt.seed, "seed override for randomized sweeps");
    sub->add_option("--jobs", opt.jobs, "worker cap (execution is deterministic)")
        ->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);
  std::string sub = app.get_subcommands().front()->get_name();

  try {
    ExperimentConfig cfg = load_config(opt);
    if (sub == "geodesic") return run_geodesic(opt, cfg);
    if (sub == "radon") return run_radon(opt, cfg);
    if (sub == "crit") return run_crit(opt, cfg);
    if (sub == "caustic") return run_caustic(opt, cfg);
    if (sub == "q0") return run_q0(opt, cfg);
    if (sub == "band") return run_band(opt, cfg);
    if (sub == "gaps") return run_gaps(opt, cfg);
    if (sub == "transport") return run_transport(opt, cfg);
    if (sub == "echo") return run_echo(opt, cfg);
    if (sub == "verify") return run_verify(cfg);
    std::fprintf(stderr, "unknown subcommand: %s\n", sub.c_str());
    return 2;
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure in %s: %s\n", sub.c_str(), e.what());
    return 3;
  }
}
