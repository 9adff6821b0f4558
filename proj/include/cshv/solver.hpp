// Newton continuation for the regularized vortex equation on the torus.
//
// The unknown is the zero-mean field w; the constant c = c_-(w) is eliminated
// through the integrated Gauss-law constraint, which fixes e^c as the smaller
// root of  e^{2c} S2 - e^c S1 + 4 pi N eps^2 = 0  with S1 = int e^{u0+w},
// S2 = int e^{2(u0+w)}. The equation solved for w is
//   Lap(w) + (1/eps^2)[e^{c}e^{u0+w} - e^{2c}e^{2(u0+w)}] - 4 pi N/|Omega| = 0,
// whose mean vanishes identically (the constraint is built in), so Newton
// runs on the zero-mean subspace with a matrix-free spectral Jacobian.
#pragma once

#include <memory>

#include "cshv/ansatz.hpp"

namespace cshv {

enum class Branch { minus, plus };

// The constant c of the chosen branch. The minus branch (non-topological
// behavior) is evaluated in the cancellation-free form
//   e^{c_-} = 8 pi N eps^2 / (S1 + sqrt(S1^2 - 16 pi N eps^2 S2)).
double c_branch(const PeriodicField& u0, const PeriodicField& w, int N,
                double epsilon, Branch b = Branch::minus);

struct SolveResult {
  PeriodicField v;   // w + c_minus: solves the c-eliminated equation
  PeriodicField w;   // zero-mean unknown
  double c_minus = 0.0;
  double epsilon = 0.0;
  int newton_iters = 0;
  double final_residual = 0.0;  // discrete sup norm
  double flux_error = 0.0;      // relative defect of int e^{u0+v}(1-e^{u0+v})
                                //  = 4 pi N eps^2, on an independent finer grid
  std::vector<double> concentration_masses;  // per concentration point
  double phi_max = 0.0;                      // max e^{(u0+v)/2}
  cx phi_argmax = 0.0;
  double total_flux = 0.0;  // int (1/2 eps^2) e^{u0+v}(1 - e^{u0+v})
};

struct SolveOptions {
  int max_newton = 60;
  double tol_sup = 1e-10;     // target sup-norm of the residual
  int max_krylov = 600;       // per linear solve
  double mass_radius_factor = 0.1;  // mass ball radius / max(|w1|, |w2|)
  int fine_factor = 2;        // flux verification grid: fine_factor * M
};

class VortexSolver {
 public:
  VortexSolver(std::shared_ptr<Green> green, const VortexConfig& cfg, int M);

  const PeriodicField& u0() const { return u0_; }
  int M() const { return M_; }
  int N() const { return N_; }
  // Solvability window: the constraint discriminant forces
  // 16 pi N eps^2 < |Omega|.
  double epsilon_max() const;

  // Nonlinear residual at w (throws DiscriminantNegative when the branch
  // constant does not exist for this (w, eps)).
  PeriodicField residual(const PeriodicField& w, double epsilon) const;

  // Directional derivative of the residual at w applied to phi, including
  // the rank-one term from the w-dependence of c_-.
  PeriodicField jacobian_apply(const PeriodicField& w, double epsilon,
                               const PeriodicField& phi) const;

  // Damped Newton from w_init (zero mean enforced). Fills the diagnostic
  // fields (flux on a finer grid, masses, phi_max) on success.
  SolveResult solve(const PeriodicField& w_init, double epsilon,
                    const SolveOptions& opt = {}) const;

  // Physical diagnostics for a converged iterate; also used by solve().
  void diagnose(SolveResult& r, const SolveOptions& opt) const;

  // Radial profile of the concentration mass around xi_l: rows of
  // (radius, mass inside) for nrings radii up to rmax.
  std::string radial_mass_csv(const SolveResult& r, std::size_t l,
                              double rmax, int nrings) const;

 private:
  struct State;  // cached exponentials and branch constants of one iterate
  State make_state(const PeriodicField& w, double epsilon) const;

  std::shared_ptr<Green> green_;
  VortexConfig cfg_;
  int M_ = 0;
  int N_ = 0;
  PeriodicField u0_;
};

// Approximate solution used as the Newton start: the projected Liouville
// source of each concentration point (for a single point the source runs
// over the whole cell; for several each source is cut off at radius eta).
PeriodicField ansatz_W(const Sigma0Data& s, double delta,
                       const std::vector<cx>& a, double eta = 0.0);

// Matching law delta(eps) = [(n+1) eps^{n+1} / |H^l(xi_l)|]^{1/(n+2)} mu for
// the leading concentration point l = 0.
double delta_of_epsilon(const Sigma0Data& s, double epsilon, double mu);

struct ContinuationOptions {
  double eps_min = 0.0;  // stop once eps drops below this (0: run max_states)
  int max_states = 8;
  double ratio = 0.8;       // geometric eps decrease
  double scan_start = 0.95; // first scan candidate as a fraction of eps_max
  int scan_size = 12;
  SolveOptions solve;
};

// Scan for the largest workable start (discriminant safely positive, ansatz
// residual smallest), then decrease eps geometrically, warm-starting each
// solve from the previous solution. (mu, zeta) come from the reduced system;
// the ansatz center is a = zeta * delta(eps).
std::vector<SolveResult> continuation(const Sigma0Data& s, double mu, cx zeta,
                                      const ContinuationOptions& opt = {});

}  // namespace cshv
