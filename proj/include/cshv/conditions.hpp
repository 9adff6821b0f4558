// Computable existence conditions for a given vortex configuration: the sign
// of the quartic coefficient D0, vanishing of the residue obstructions, the
// pair (Gamma, Upsilon) of second-order coefficients at each concentration
// point, and the non-degeneracy matrix assembled from them.
#pragma once

#include <Eigen/Dense>

#include "cshv/ansatz.hpp"

namespace cshv {

// D0 via direct quadrature: |T|^2 over the cell minus round disks around
// each xi_l, plus the exact contribution of the carved disks computed in the
// root coordinate q (sigma0 = q^{n+1}), where the divergent part integrates in
// closed form. The bulk splits into a doubly periodic cartesian far part
// (refined by grid doubling, starting at 16*panels points per side) and polar
// annuli that absorb the steep growth of |T|^2 near each xi_l. `trace`
// records values for shrinking carve radii (the result must be
// radius-independent; only the carve rings move, the far part is shared).
struct D0Result {
  double value = 0.0;
  std::vector<std::pair<double, double>> trace;  // (radius factor, value)
};
D0Result compute_D0_quadrature(const Sigma0Data& s, double rho = 0.0,
                               int refinements = 2, int panels = 16);

// Guard for a user-supplied sigma-plane carve radius rho: the rho-level set
// must sit well inside every series disk, and the grid values of |sigma0|
// outside the disks must stay above rho. Raises RhoTooLarge otherwise.
void validate_rho(const Sigma0Data& s, double rho);

// D0 via the boundary route: (1/(2i)) * contour integral of conj(A) A' along
// the cell boundary (independent of the carve radius and of the integration
// constants once the residues cancel).
double compute_D0_area(const Sigma0Data& s, double tol = 1e-10,
                       int max_panels = 256);

// Second-order coefficients about each concentration point.
struct GammaUpsilon {
  std::vector<std::vector<cx>> G;  // Gamma^{l l'}
  std::vector<std::vector<cx>> U;  // Upsilon^{l l'}
};
GammaUpsilon compute_gamma_upsilon(const Sigma0Data& s);

// Closed forms for a multiplicity-zero concentration point (the xi are not
// vortex points): Gamma = H(xi)^2 u0_zz(xi), Upsilon = -(2 pi/|Omega|)|H(xi)|^2.
cx u0_zz(const Green& green, const VortexConfig& cfg, cx z);
GammaUpsilon gamma_upsilon_n0(const HData& h);

// Non-degeneracy matrix: 2m x 2m, blocks
//   [ Re(G+U) + c_l d_{ll'},  Im(U-G)              ]
//   [ Im(G+U),                Re(G-U) - c_l d_{ll'} ]
// with c_l = n(2n+3)/(n+1) * D0 * w_l for minimal-multiplicity points and
// weights w_l built from |H^l(xi_l)|^{-2/(n+1)}.
Eigen::MatrixXd build_matrix_A(const GammaUpsilon& gu, const HData& h,
                               double D0);

// Sufficient (strong) non-degeneracy inequality for a single multiplicity-2
// concentration point at the symmetry center of a rectangle. With the series
// H(z) = lam0 (1 + h2 z^2/2 + ...) and the regular-part derivatives
// Hs_k = (d^k H*/dz^k)(0), the inequality reads
//   |h2 h4/4 + h6/180 - 6 pi h2^2 Hs2 - 4 pi h2 Hs4 - (2 pi/3) Hs6|
//     < (3 pi/|Omega|) |h2|^2            (h_k = H^{(k)}(0)/lam0),
// which implies the exact condition |Gamma| != |Upsilon + c|. Both are
// evaluated and reported; the exact condition remains the authority.
struct StrongInequality {
  bool applicable = false;  // m=1, n=2, rectangle, xi at 0
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};
StrongInequality strong_nondegeneracy(const HData& h);

struct ConditionReport {
  double D0 = 0.0;           // quadrature route
  double D0_area = 0.0;      // boundary route
  double D0_route_diff = 0.0;
  std::vector<cx> c0;        // residue-cancelling coefficients
  double residue_max = 0.0;  // largest contour residue of T (diagnostic)
  bool balance_ok = false;
  bool residues_ok = false;
  GammaUpsilon gu;
  Eigen::MatrixXd A;
  double detA = 0.0;
  double min_singular_value = 0.0;
  bool D0_negative = false;
  bool nondegenerate = false;  // reported, never used to alter computation
  StrongInequality strong;     // sufficient inequality, where applicable
};

ConditionReport check_existence(const Sigma0Data& s);

}  // namespace cshv
