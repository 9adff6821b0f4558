// Radial coefficient functions f(|zeta|) < 0 and g(|zeta|) > 0 of the
// finite-dimensional reduced system, the beta-integral machinery behind
// them, and the reduced map Gamma0(mu, zeta) with its zero finding.
//
// f and g are defined by the plane integrals
//   f(|zeta|)      = int (|y|^2 - 1) |y + zeta|^{2p} (1 + |y|^2)^{-5} dy
//   g(|zeta|) zeta = int |y + zeta|^{2p} y (1 + |y|^2)^{-5} dy
// with p = n/(n+1). Each is evaluated by three routes: an adaptive 2-D
// quadrature oracle, a moment-series expansion, and closed 1-D integral
// representations. The oracle is the contract; where a printed closed form
// or 1-D form disagrees beyond tolerance the conflict is recorded in a
// discrepancy log, never silently reconciled.
#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "cshv/common.hpp"

namespace cshv {

// I^p_q = int_0^inf rho^p (1+rho)^{-q} drho, q > p+1 > 0 (Beta function).
double beta_integral(double p, double q);

// A quantity whose published closed form disagrees with the quadrature
// oracle. `printed` is the closed-form value, `computed` the oracle value.
struct Discrepancy {
  std::string quantity;
  double printed = 0.0;
  double computed = 0.0;
  std::string note;
};

enum class EvalMethod { oracle, series, oned };

class ReducedCoeffs {
 public:
  explicit ReducedCoeffs(int n);

  int n() const { return n_; }
  double p() const { return p_; }
  // f(0) by the closed form -2pi/(2n+3) I^p_5 (agrees with the oracle).
  double I0() const { return I0_; }

  double f(double s, EvalMethod m = EvalMethod::oracle) const;
  double g(double s, EvalMethod m = EvalMethod::oracle) const;

  // 1-D representations of the two halves J1, J2 of f = J1 - 2 J2; exposed
  // separately because only J1's representation survives cross-validation.
  double J1_oned(double s) const;
  double J2_oned(double s) const;
  // 2-D quadrature of J1, J2 directly from their definitions.
  double J1_oracle(double s) const;
  double J2_oracle(double s) const;

  // Complex-valued oracle K(zeta) = int |y+zeta|^{2p} y (1+|y|^2)^{-5} dy;
  // g = Re(K/zeta). Exposed for the rotational-equivariance checks.
  cx K_oracle(cx zeta) const;
  double f_oracle_at(cx zeta) const;

  // Sweep the published closed forms and the 1-D representations against the
  // oracle and populate the discrepancy log. Idempotent.
  void audit_discrepancies();
  const std::vector<Discrepancy>& discrepancy_log() const { return log_; }

 private:
  double f_series(double s) const;
  double g_series(double s) const;
  double f_oned(double s) const;
  double g_oned(double s) const;

  int n_;
  double p_;
  double I0_;
  std::vector<Discrepancy> log_;
  bool audited_ = false;
};

// Inputs of the reduced map: the condition numbers of a configuration with a
// single concentration point of multiplicity n.
struct Gamma0Inputs {
  double D0 = 0.0;
  cx Gamma;
  cx Upsilon;
  int n = 0;
};

// Gamma0(mu, zeta) =
//   ( pi D0 mu^2 - (8 (n+1)^3 / mu^{2/(n+1)}) f(|zeta|),
//     Gamma zeta + conj(zeta) Upsilon
//       - (16 (n+1)^3 / (pi mu^{2(n+2)/(n+1)})) g(|zeta|) conj(zeta) ).
// Uses the oracle evaluators unless told otherwise.
std::pair<double, cx> gamma0_map(double mu, cx zeta, const Gamma0Inputs& in,
                                 const ReducedCoeffs& rc,
                                 EvalMethod m = EvalMethod::oracle);

// Closed form of the mu-component zero at zeta = 0 (requires D0 < 0).
double mu0_closed(const Gamma0Inputs& in, const ReducedCoeffs& rc);

// Central finite-difference Jacobian of gamma0_map as a map R^3 -> R^3 in
// the coordinates (mu, Re zeta, Im zeta).
std::array<std::array<double, 3>, 3> gamma0_jacobian_fd(
    double mu, cx zeta, const Gamma0Inputs& in, const ReducedCoeffs& rc,
    double rel_step = 1e-6);

struct ReducedZero {
  double mu = 0.0;
  cx zeta;
  int index = 0;           // sign of det D Gamma0 at the zero
  double residual = 0.0;
  int iterations = 0;
  // Bifurcated ring radius |zeta0| per positive eigenvalue of the 2x2 block
  // lying in the attained range of 2 D0 g/f (empty when none qualifies).
  std::vector<double> bifurcation_radii;
};

// Newton (finite-difference Jacobian) from a caller-supplied start, plus a
// 26-point sphere degree sample as the certificate, plus the eigenvalue
// bifurcation scan. Requires D0 < 0.
ReducedZero solve_reduced(const Gamma0Inputs& in, const ReducedCoeffs& rc,
                          double mu_start, cx zeta_start,
                          int max_iter = 60, double tol = 1e-11);

// Solve 2 D0 g(s)/f(s) = lambda1 for s > 0 by bisection (1e-10). Returns
// s = |zeta0|; raises NoZeroFound when lambda1 lies outside the attained
// range of the ratio.
double bifurcation_radius(double lambda1, const Gamma0Inputs& in,
                          const ReducedCoeffs& rc);

// CSV table of both coefficient functions under all three methods at the
// given radii: columns |zeta|, f_oracle, f_series, f_oned, g_oracle,
// g_series, g_oned (series columns empty where the expansion is refused).
std::string reduced_coeffs_csv(const ReducedCoeffs& rc,
                               const std::vector<double>& radii);

}  // namespace cshv
