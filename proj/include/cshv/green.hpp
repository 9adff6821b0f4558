// Green's function of the Laplacian on the torus (zero mean), its regular
// part H, the holomorphic regularization H* with Re H* = H - |z|^2/(4|Omega|),
// and independent verification routes (rectangle product formula, spectral
// Poisson oracle, closed-form derivative series at 0 for rectangles).
//
// Closed form used throughout (v = pi z / w1, tau = w2/w1):
//   G(z) = -(1/2pi) log|theta1(v)| + (Im(z/w1))^2 / (2 Im tau) - Im(tau)/24,
// which is the unique zero-mean solution of -Laplace G = delta_0 - 1/|Omega|.
#pragma once

#include "cshv/elliptic.hpp"
#include "cshv/field.hpp"
#include "cshv/series.hpp"
#include "cshv/torus.hpp"

namespace cshv {

struct Green {
  Torus T;
  Theta th;
  double area;
  double im_tau;
  double log_fac;  // log |pi theta1'(0) / w1|
  double H0;       // H(0) = -(1/2pi) log_fac' ... see constructor

  explicit Green(const Torus& torus);

  // Zero-mean Green's function (returns +infinity at lattice points).
  double G(cx z) const;
  // Regular part H(z) = G(z) + (1/2pi) log|z| for z != 0 (mod lattice);
  // H(0) is the member H0.
  double H(cx z) const;

  // Derivatives of G away from the singularity.
  cx G_z(cx z) const;
  cx G_zz(cx z) const;
  double G_zzbar() const { return 0.25 / area; }

  // Holomorphic regularization. hstar_value uses principal logs: its
  // imaginary part is defined modulo 1 per evaluation; consumers exponentiate
  // with coefficients that cancel such jumps. Re hstar_value is exact.
  cx hstar_value(cx z) const;
  // (H*)'(z): single-valued, meromorphic with poles at nonzero lattice points.
  cx hstar_prime(cx z) const;

  // Taylor series of H* at 0 (constant = H(0), purely real).
  LocalSeries hstar_series0(int deg) const;
  // Taylor series of H* at base != 0 via termwise integration of (H*)';
  // the free imaginary constant is set to 0 (Re of constant = H(base) -
  // |base|^2/(4|Omega|)).
  LocalSeries hstar_series(cx base, int deg, double radius = 0.0) const;

  // Closed-form (H*)''(0), (H*)''''(0), (H*)^{(6)}(0) for rectangles via
  // exponential-sum series; NotARectangle otherwise.
  double hstar_d2_0() const;
  double hstar_d4_0() const;
  double hstar_d6_0() const;

  // Independent route: rectangle product-formula evaluation of G.
  double G_product(cx z) const;
};

// Spectral oracle: solves the mollified problem with a periodized Gaussian of
// width w at p and applies the exact constant correction -w^2/(2|Omega|).
// Values are accurate (up to e^{-d^2/2w^2}) at distance d >= ~8 w from p.
PeriodicField green_spectral_field(const Torus& T, int M, cx p, double w);

}  // namespace cshv
