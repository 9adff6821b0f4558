// Command-line driver.
//
//   cshv check   --config c.json   existence conditions (D0, residues, A)
//   cshv ansatz  --config c.json   approximate-solution residual sweep in delta
//   cshv reduced --config c.json   reduced-system coefficient tables and zero
//   cshv solve   --config c.json   Newton continuation down the epsilon ladder
//   cshv tables                    lattice-sum constants and the rectangle
//                                  non-degeneracy inequality (config-free)
//
// Every command writes a manifest.json (command, config hash, versions,
// wall-clock timings) next to its outputs. Timings never enter the data
// files: CSV and report bytes are reproducible run to run.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cshv/ansatz.hpp"
#include "cshv/conditions.hpp"
#include "cshv/config.hpp"
#include "cshv/green.hpp"
#include "cshv/reduced.hpp"
#include "cshv/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace cshv;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigInvalid("cannot open output file " + p.string());
  out << text;
}

ordered_json cx_json(cx z) { return format_complex(z); }

// ---------------------------------------------------------------------------
// Shared plumbing

struct CommonArgs {
  std::string config_path;
  int grid = 0;          // 0: keep config value
  std::string out;       // empty: keep config value
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol = 0.0;      // 0: keep config value
};

RunConfig load_config(const CommonArgs& a) {
  std::ifstream in(a.config_path, std::ios::binary);
  if (!in) throw ConfigInvalid("cannot read config file " + a.config_path);
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig rc = parse_config(ss.str());
  if (a.grid > 0) rc.grid = a.grid;
  if (!a.out.empty()) rc.out_dir = a.out;
  if (a.seed_set) rc.seed = a.seed;
  if (a.tol > 0.0) rc.tol = a.tol;
  rc.validate();
  return rc;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void write_manifest(const fs::path& dir, const std::string& command,
                    const RunConfig* rc, const Timer& timer) {
  ordered_json j;
  j["command"] = command;
  if (rc != nullptr) {
    j["config_hash"] = hex64(config_hash(*rc));
    j["grid"] = rc->grid;
    j["seed"] = rc->seed;
  }
  j["versions"] = {{"cshv", kVersion}, {"compiler", __VERSION__}};
  j["timings_s"] = {{"total", timer.seconds()}};
  write_file(dir / "manifest.json", j.dump(2) + "\n");
}

Sigma0Data make_pipeline(const RunConfig& rc) {
  VortexConfig cfg = rc.vortex_config();
  cfg.require_balance();
  Green green(cfg.torus);
  HData h = build_H(green, cfg);
  return build_sigma0(h, rc.grid);
}

// Least-squares slope of log(y) against log(x).
double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double d = n * sxx - sx * sx;
  return d == 0.0 ? 0.0 : (n * sxy - sx * sy) / d;
}

// ---------------------------------------------------------------------------
// tables: lattice-sum constants and the rectangle non-degeneracy inequality.
// Everything here is scale-free (unit square), so no configuration is read.

struct TableConstants {
  double C1 = 0.0;  // 32 pi^4 sum lam(lam+1)(6 lam^2 + 6 lam + 1)
  double C2 = 0.0;  // 80 pi^4 sum_{m,k>=1} k^3 exp(-2 pi k m)
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

TableConstants compute_table_constants() {
  TableConstants t;
  const double pi4 = kPi * kPi * kPi * kPi;
  double s1 = 0.0;
  for (int k = 1; k <= 60; ++k) {
    const double lam = 1.0 / std::expm1(2.0 * kPi * k);
    const double term = lam * (lam + 1.0) * (6.0 * lam * (lam + 1.0) + 1.0);
    s1 += term;
    if (term < 1e-18 * s1) break;
  }
  t.C1 = 32.0 * pi4 * s1;
  double s2 = 0.0;
  for (int m = 1; m <= 60; ++m) {
    const double x = std::exp(-2.0 * kPi * m);
    // sum_k k^3 x^k = x (1 + 4x + x^2) / (1-x)^4
    const double row = x * (1.0 + x * (4.0 + x)) / std::pow(1.0 - x, 4);
    s2 += row;
    if (row < 1e-18 * s2) break;
  }
  t.C2 = 80.0 * pi4 * s2;
  t.lhs = std::abs(pi4 / 3.0 + 1.4 * t.C2 - t.C1);
  t.rhs = 3.0 * kPi * std::sqrt(pi4 / 3.0 + t.C2);
  t.holds = t.lhs < t.rhs;
  return t;
}

int cmd_tables(const std::string& out_dir) {
  Timer timer;
  const TableConstants t = compute_table_constants();
  fs::create_directories(out_dir);

  ordered_json j;
  j["lambda_sum_constant"] = t.C1;
  j["exponential_sum_constant"] = t.C2;
  j["inequality"] = {{"lhs", t.lhs}, {"rhs", t.rhs}, {"holds", t.holds}};
  write_file(fs::path(out_dir) / "tables.json", j.dump(2) + "\n");

  std::printf("lambda-sum constant      C1 = %.6f   (32 pi^4 sum lam(lam+1)(6 lam^2+6 lam+1), lam_k = 1/(e^{2 pi k}-1))\n",
              t.C1);
  std::printf("exponential-sum constant C2 = %.6f  (80 pi^4 sum_{m,k>=1} k^3 e^{-2 pi k m})\n",
              t.C2);
  std::printf("NONDEGENERACY INEQUALITY: |pi^4/3 + (7/5) C2 - C1| = %.6f %s %.6f = 3 pi sqrt(pi^4/3 + C2)  ->  %s\n",
              t.lhs, t.holds ? "<" : ">=", t.rhs,
              t.holds ? "HOLDS" : "FAILS");
  write_manifest(out_dir, "tables", nullptr, timer);
  return 0;
}

// ---------------------------------------------------------------------------
// check

// Random on-torus probes of |H0|^2 = exp(u0 + 8 pi sum_l (n_l+1) G(. - xi_l)),
// kept away from all singular points.
double identity_probe_dev(const Sigma0Data& s, std::uint64_t seed, int count) {
  const VortexConfig& cfg = s.h.cfg;
  const Green& green = *s.h.green;
  const Torus& T = cfg.torus;
  const double scale = std::min(std::abs(T.w1), std::abs(T.w2));
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> U(-0.45, 0.45);
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    cx z;
    for (int tries = 0; tries < 1000; ++tries) {
      z = U(gen) * T.w1 + U(gen) * T.w2;
      double dmin = scale;
      for (cx p : cfg.points) dmin = std::min(dmin, T.dist(z, p));
      for (cx xi : cfg.xi) dmin = std::min(dmin, T.dist(z, xi));
      if (dmin > 0.05 * scale) break;
    }
    double expo = 0.0;
    for (std::size_t j = 0; j < cfg.points.size(); ++j)
      expo -= 4.0 * kPi * cfg.mult[j] * green.G(z - cfg.points[j]);
    for (std::size_t l = 0; l < cfg.xi.size(); ++l)
      expo += 8.0 * kPi * (cfg.n_of_xi(l) + 1) * green.G(z - cfg.xi[l]);
    const double lhs = std::norm(s.h.H0val(z));
    const double rhs = std::exp(expo);
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  return worst;
}

int cmd_check(const RunConfig& rc) {
  Timer timer;
  fs::create_directories(rc.out_dir);
  Sigma0Data s = make_pipeline(rc);
  const VortexConfig& cfg = s.h.cfg;
  if (rc.rho > 0.0) validate_rho(s, rc.rho);
  ConditionReport rep = check_existence(s);
  const double probe_dev = identity_probe_dev(s, rc.seed, 20);
  const bool exist =
      rep.balance_ok && rep.residues_ok && rep.D0_negative && rep.nondegenerate;

  ordered_json j;
  j["balance_ok"] = rep.balance_ok;
  j["N"] = cfg.N();
  j["area"] = cfg.torus.area();
  j["epsilon_max"] = std::sqrt(cfg.torus.area() / (16.0 * kPi * cfg.N()));
  {
    ordered_json d;
    d["quadrature"] = rep.D0;
    d["area_route"] = rep.D0_area;
    d["route_diff"] = rep.D0_route_diff;
    d["negative"] = rep.D0_negative;
    j["D0"] = d;
  }
  {
    ordered_json r;
    r["max_residue"] = rep.residue_max;
    r["ok"] = rep.residues_ok;
    ordered_json c0 = ordered_json::array();
    for (cx c : rep.c0) c0.push_back(cx_json(c));
    r["c0"] = c0;
    j["residues"] = r;
  }
  {
    ordered_json G = ordered_json::array(), U = ordered_json::array();
    for (const auto& row : rep.gu.G) {
      ordered_json r = ordered_json::array();
      for (cx v : row) r.push_back(cx_json(v));
      G.push_back(r);
    }
    for (const auto& row : rep.gu.U) {
      ordered_json r = ordered_json::array();
      for (cx v : row) r.push_back(cx_json(v));
      U.push_back(r);
    }
    j["Gamma"] = G;
    j["Upsilon"] = U;
  }
  {
    ordered_json A = ordered_json::array();
    for (int i = 0; i < rep.A.rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (int k = 0; k < rep.A.cols(); ++k) row.push_back(rep.A(i, k));
      A.push_back(row);
    }
    j["matrix_A"] = A;
    j["detA"] = rep.detA;
    j["min_singular_value"] = rep.min_singular_value;
    j["nondegenerate"] = rep.nondegenerate;
  }
  j["strong_inequality"] = {{"applicable", rep.strong.applicable},
                            {"lhs", rep.strong.lhs},
                            {"rhs", rep.strong.rhs},
                            {"holds", rep.strong.holds}};
  j["identity_probes"] = {{"count", 20}, {"max_rel_dev", probe_dev}};
  j["existence_conditions"] = exist;
  write_file(fs::path(rc.out_dir) / "report.json", j.dump(2) + "\n");

  std::printf("balance: %s (N = %d, 2 sum (n_l+1) = %d)\n",
              rep.balance_ok ? "ok" : "VIOLATED", cfg.N(),
              [&] {
                int t = 0;
                for (std::size_t l = 0; l < cfg.xi.size(); ++l)
                  t += 2 * (cfg.n_of_xi(l) + 1);
                return t;
              }());
  std::printf("D0: quadrature = %.12g, area route = %.12g, |diff| = %.3g  -> %s\n",
              rep.D0, rep.D0_area, rep.D0_route_diff,
              rep.D0_negative ? "negative" : "non-negative");
  std::printf("residues: max contour residue = %.3g (%s)\n", rep.residue_max,
              rep.residues_ok ? "cancelled" : "NOT cancelled");
  std::printf("non-degeneracy: det A = %.12g, min singular value = %.3g (%s)\n",
              rep.detA, rep.min_singular_value,
              rep.nondegenerate ? "non-degenerate" : "DEGENERATE");
  if (rep.strong.applicable)
    std::printf("strong inequality: lhs = %.6g %s rhs = %.6g (%s)\n",
                rep.strong.lhs, rep.strong.holds ? "<" : ">=", rep.strong.rhs,
                rep.strong.holds ? "holds" : "fails");
  std::printf("identity probes: max relative deviation = %.3g (20 points)\n",
              probe_dev);
  std::printf("existence conditions: %s\n",
              exist ? "SATISFIED" : "NOT SATISFIED");
  write_manifest(rc.out_dir, "check", &rc, timer);
  return 0;
}

// ---------------------------------------------------------------------------
// ansatz: residual of the approximate solution over a delta ladder, with
// epsilon matched through the concentration law (mu = 1).

int cmd_ansatz(const RunConfig& rc) {
  Timer timer;
  fs::create_directories(rc.out_dir);
  Sigma0Data s = make_pipeline(rc);
  const VortexConfig& cfg = s.h.cfg;
  VortexSolver solver(s.h.green, cfg, rc.grid);
  const int n = cfg.n_of_xi(0);
  const double Habs = (n + 1) * std::abs(s.h.alpha0[0]);
  const double eps_max = solver.epsilon_max();

  const RangeSpec& dr = rc.delta_range;
  std::vector<double> deltas(dr.count);
  for (int i = 0; i < dr.count; ++i) {
    const double t = dr.count == 1 ? 0.0 : double(i) / (dr.count - 1);
    deltas[i] = dr.min * std::pow(dr.max / dr.min, t);
  }

  std::string csv = "delta,epsilon,res_weighted,res_sup,theta\n";
  std::vector<double> xs, ys;
  int skipped = 0;
  for (double delta : deltas) {
    // Inverse of the matching law delta(eps) at mu = 1.
    const double eps =
        std::pow(std::pow(delta, n + 2) * Habs / (n + 1), 1.0 / (n + 1));
    csv += fmt17(delta) + "," + fmt17(eps) + ",";
    if (!(eps < 0.999 * eps_max)) {
      csv += ",,\n";
      ++skipped;
      continue;
    }
    try {
      PeriodicField W = ansatz_W(s, delta, std::vector<cx>(cfg.xi.size(), 0.0));
      PeriodicField R = solver.residual(W, eps);
      double sup = 0.0;
      for (double val : R.v) sup = std::max(sup, std::abs(val));
      const double wn = weighted_norm(s, R, delta, 0.0, rc.gamma);
      const double theta = theta_constant(s, delta);
      csv += fmt17(wn) + "," + fmt17(sup) + "," + fmt17(theta) + "\n";
      xs.push_back(delta);
      ys.push_back(wn);
    } catch (const DiscriminantNegative&) {
      csv += ",,\n";
      ++skipped;
    }
  }
  write_file(fs::path(rc.out_dir) / "ansatz.csv", csv);

  const double slope = log_slope(xs, ys);
  ordered_json j;
  j["rows"] = static_cast<int>(deltas.size());
  j["skipped"] = skipped;
  j["gamma"] = rc.gamma;
  j["weighted_residual_slope"] = slope;
  j["expected_slope"] = 2.0 - rc.gamma;
  write_file(fs::path(rc.out_dir) / "report.json", j.dump(2) + "\n");

  std::printf("ansatz sweep: %zu deltas in [%g, %g], %d skipped\n",
              deltas.size(), dr.min, dr.max, skipped);
  std::printf("weighted residual slope = %.4f (expected about %.4f)\n", slope,
              2.0 - rc.gamma);
  write_manifest(rc.out_dir, "ansatz", &rc, timer);
  return 0;
}

// ---------------------------------------------------------------------------
// reduced: coefficient tables under all three evaluation routes, the
// discrepancy audit, and the reduced-system zero when it applies.

int cmd_reduced(const RunConfig& rc) {
  Timer timer;
  fs::create_directories(rc.out_dir);
  Sigma0Data s = make_pipeline(rc);
  const VortexConfig& cfg = s.h.cfg;
  ConditionReport rep = check_existence(s);
  const int n = cfg.n_of_xi(0);

  ReducedCoeffs coeffs(n);
  coeffs.audit_discrepancies();

  const std::vector<double> radii = {0.0, 0.1, 0.2, 0.5, 1.0,  2.0,
                                     3.0, 5.0, 10.0, 30.0, 100.0, 1000.0};
  write_file(fs::path(rc.out_dir) / "reduced_coeffs.csv",
             reduced_coeffs_csv(coeffs, radii));

  std::string dcsv = "quantity,printed,computed,note\n";
  for (const Discrepancy& d : coeffs.discrepancy_log()) {
    std::string note = d.note;
    for (char& c : note)
      if (c == ',') c = ';';
    dcsv += d.quantity + "," + fmt17(d.printed) + "," + fmt17(d.computed) +
            "," + note + "\n";
  }
  write_file(fs::path(rc.out_dir) / "discrepancies.csv", dcsv);

  ordered_json j;
  j["n"] = n;
  j["p"] = coeffs.p();
  j["f0"] = coeffs.I0();
  j["D0"] = rep.D0;
  j["discrepancies"] = static_cast<int>(coeffs.discrepancy_log().size());

  std::printf("reduced coefficients: n = %d, p = %.12g, f(0) = %.12g\n", n,
              coeffs.p(), coeffs.I0());
  std::printf("discrepancy log: %zu entries\n",
              coeffs.discrepancy_log().size());

  if (cfg.xi.size() == 1 && rep.D0 < 0.0) {
    Gamma0Inputs in;
    in.D0 = rep.D0;
    in.Gamma = rep.gu.G[0][0];
    in.Upsilon = rep.gu.U[0][0];
    in.n = n;
    const double mu0 = mu0_closed(in, coeffs);
    ReducedZero z = solve_reduced(in, coeffs, 1.1 * mu0, cx(0.05, 0.05));
    ordered_json zr;
    zr["mu0_closed"] = mu0;
    zr["mu"] = z.mu;
    zr["zeta"] = cx_json(z.zeta);
    zr["index"] = z.index;
    zr["residual"] = z.residual;
    zr["iterations"] = z.iterations;
    ordered_json br = ordered_json::array();
    for (double r : z.bifurcation_radii) br.push_back(r);
    zr["bifurcation_radii"] = br;
    j["zero"] = zr;
    std::printf("reduced zero: mu = %.12g (closed form %.12g), zeta = %s, index = %+d, residual = %.3g\n",
                z.mu, mu0, format_complex(z.zeta).c_str(), z.index, z.residual);
    for (double r : z.bifurcation_radii)
      std::printf("bifurcated ring radius |zeta0| = %.12g\n", r);
  } else {
    j["zero"] = nullptr;
    std::printf("reduced zero: skipped (%s)\n",
                cfg.xi.size() != 1 ? "more than one concentration point"
                                   : "D0 is not negative");
  }
  write_file(fs::path(rc.out_dir) / "report.json", j.dump(2) + "\n");
  write_manifest(rc.out_dir, "reduced", &rc, timer);
  return 0;
}

// ---------------------------------------------------------------------------
// solve

int cmd_solve(const RunConfig& rc) {
  Timer timer;
  fs::create_directories(rc.out_dir);
  Sigma0Data s = make_pipeline(rc);
  const VortexConfig& cfg = s.h.cfg;
  ConditionReport rep = check_existence(s);
  const int n = cfg.n_of_xi(0);

  double mu = 1.0;
  cx zeta = 0.0;
  ordered_json jred = nullptr;
  if (cfg.xi.size() == 1 && rep.D0 < 0.0) {
    ReducedCoeffs coeffs(n);
    Gamma0Inputs in;
    in.D0 = rep.D0;
    in.Gamma = rep.gu.G[0][0];
    in.Upsilon = rep.gu.U[0][0];
    in.n = n;
    const double mu0 = mu0_closed(in, coeffs);
    try {
      ReducedZero z = solve_reduced(in, coeffs, 1.1 * mu0, cx(0.05, 0.05));
      mu = z.mu;
      zeta = z.zeta;
      jred = {{"mu", z.mu}, {"zeta", format_complex(z.zeta)},
              {"index", z.index}, {"residual", z.residual}};
    } catch (const Error& e) {
      mu = mu0;
      zeta = 0.0;
      jred = {{"mu", mu0}, {"zeta", format_complex(zeta)},
              {"note", std::string("closed-form mu0; Newton failed: ") +
                           e.what()}};
    }
    std::printf("reduced start: mu = %.12g, zeta = %s\n", mu,
                format_complex(zeta).c_str());
  } else {
    std::printf("reduced start unavailable (%s); using mu = 1, zeta = 0\n",
                cfg.xi.size() != 1 ? "several concentration points"
                                   : "D0 not negative");
  }

  ContinuationOptions opt;
  opt.eps_min = rc.eps_range.min;
  opt.max_states = rc.eps_range.count;
  opt.solve.tol_sup = rc.tol;
  VortexSolver probe_solver(s.h.green, cfg, rc.grid);
  const double eps_bound = probe_solver.epsilon_max();
  if (rc.eps_range.max > 0.0 && rc.eps_range.max < 0.95 * eps_bound)
    opt.scan_start = rc.eps_range.max / eps_bound;

  std::vector<SolveResult> states = continuation(s, mu, zeta, opt);
  if (states.empty()) throw NewtonDiverged("continuation produced no states");

  std::string csv = "epsilon,c_minus,newton_iters,final_residual,flux_error,total_flux,phi_max";
  for (std::size_t l = 0; l < cfg.xi.size(); ++l)
    csv += ",mass_" + std::to_string(l + 1);
  csv += "\n";
  for (const SolveResult& r : states) {
    csv += fmt17(r.epsilon) + "," + fmt17(r.c_minus) + "," +
           std::to_string(r.newton_iters) + "," + fmt17(r.final_residual) +
           "," + fmt17(r.flux_error) + "," + fmt17(r.total_flux) + "," +
           fmt17(r.phi_max);
    for (double mss : r.concentration_masses) csv += "," + fmt17(mss);
    csv += "\n";
  }
  write_file(fs::path(rc.out_dir) / "solve.csv", csv);

  // Radial mass profile about the first concentration point, smallest eps.
  const SolveResult& last = states.back();
  VortexSolver solver(s.h.green, cfg, rc.grid);
  const double rmax =
      0.25 * std::min(std::abs(cfg.torus.w1), std::abs(cfg.torus.w2));
  write_file(fs::path(rc.out_dir) / "radial_mass.csv",
             solver.radial_mass_csv(last, 0, rmax, 48));

  ordered_json j;
  j["epsilon_max"] = eps_bound;
  j["reduced_zero"] = jred;
  j["states"] = static_cast<int>(states.size());
  ordered_json arr = ordered_json::array();
  for (const SolveResult& r : states) {
    ordered_json e;
    e["epsilon"] = r.epsilon;
    e["c_minus"] = r.c_minus;
    e["newton_iters"] = r.newton_iters;
    e["final_residual"] = r.final_residual;
    e["flux_error"] = r.flux_error;
    e["total_flux"] = r.total_flux;
    e["expected_total_flux"] = 2.0 * kPi * cfg.N();
    e["phi_max"] = r.phi_max;
    e["phi_argmax"] = cx_json(r.phi_argmax);
    ordered_json masses = ordered_json::array();
    for (double mss : r.concentration_masses) masses.push_back(mss);
    e["concentration_masses"] = masses;
    arr.push_back(e);
  }
  j["ladder"] = arr;
  write_file(fs::path(rc.out_dir) / "report.json", j.dump(2) + "\n");

  std::printf("continuation: %zu states, epsilon from %.6g down to %.6g\n",
              states.size(), states.front().epsilon, states.back().epsilon);
  for (const SolveResult& r : states)
    std::printf("  eps = %-12.6g iters = %-3d residual = %-10.3g flux defect = %-10.3g total flux = %.9g\n",
                r.epsilon, r.newton_iters, r.final_residual, r.flux_error,
                r.total_flux);
  const double target = 8.0 * kPi * (cfg.n_of_xi(0) + 1);
  if (!last.concentration_masses.empty())
    std::printf("smallest-eps mass near xi_1 = %.6g (limit 8 pi (n+1) = %.6g)\n",
                last.concentration_masses[0], target);
  write_manifest(rc.out_dir, "solve", &rc, timer);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-dual vortex condensates on the torus: existence checks, "
               "approximate solutions, reduced system, Newton continuation"};
  app.require_subcommand(1);

  CommonArgs a;
  std::string tables_out = "out";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", a.config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--grid", a.grid, "override grid size M");
    sub->add_option("--out", a.out, "override output directory");
    sub->add_option("--seed", a.seed, "override probe seed")
        ->each([&](const std::string&) { a.seed_set = true; });
    sub->add_option("--tol", a.tol, "override solver tolerance");
  };

  CLI::App* c_check = app.add_subcommand("check", "existence conditions");
  CLI::App* c_ansatz =
      app.add_subcommand("ansatz", "approximate-solution residual sweep");
  CLI::App* c_reduced =
      app.add_subcommand("reduced", "reduced-system tables and zero");
  CLI::App* c_solve = app.add_subcommand("solve", "Newton continuation");
  CLI::App* c_tables = app.add_subcommand(
      "tables", "lattice-sum constants and the non-degeneracy inequality");
  add_common(c_check);
  add_common(c_ansatz);
  add_common(c_reduced);
  add_common(c_solve);
  c_tables->add_option("--out", tables_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_tables->parsed()) return cmd_tables(tables_out);
    const RunConfig rc = load_config(a);
    if (c_check->parsed()) return cmd_check(rc);
    if (c_ansatz->parsed()) return cmd_ansatz(rc);
    if (c_reduced->parsed()) return cmd_reduced(rc);
    if (c_solve->parsed()) return cmd_solve(rc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
