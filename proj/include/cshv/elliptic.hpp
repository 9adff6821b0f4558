// Jacobi theta functions (q-series), Weierstrass functions, Eisenstein
// series, and a direct lattice-sum oracle for cross-checks.
//
// Conventions: tau = w2/w1 with Im tau > 0, q = exp(i pi tau), v = pi z / w1.
// theta1(v) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) v).
#pragma once

#include "cshv/torus.hpp"

namespace cshv {

struct Theta {
  cx w1, tau, q;

  explicit Theta(const Torus& T) : w1(T.w1), tau(T.tau()), q(std::exp(cx(0, kPi) * (T.tau()))) {}

  cx v_of(cx z) const { return kPi * z / w1; }

  cx theta1(cx v) const;
  cx theta1_d1(cx v) const;
  cx theta1_d2(cx v) const;
  cx theta1_d3(cx v) const;
  cx theta2(cx v) const;

  cx theta1p0() const { return theta1_d1(cx(0)); }
  cx theta1ppp0() const { return theta1_d3(cx(0)); }
  cx theta2_0() const { return theta2(cx(0)); }
  cx theta3_0() const;
  cx theta4_0() const;

  // (log theta1)'' and ''' at v.
  cx logtheta1_d2(cx v) const;
  cx logtheta1_d3(cx v) const;
};

// Weierstrass data for a period lattice.
struct EllipticData {
  Torus T;
  Theta th;
  cx e1, e2, e3;  // wp at the half periods w1/2, w2/2, (w1+w2)/2
  cx G4, G6;      // lattice sums sum' w^{-4}, sum' w^{-6}
  cx g2, g3;      // invariants g2 = 60 G4, g3 = 140 G6

  explicit EllipticData(const Torus& torus);

  cx wp(cx z) const;
  cx wp_prime(cx z) const;
  cx wp_second(cx z) const { return 6.0 * wp(z) * wp(z) - 0.5 * g2; }
  // Weierstrass zeta (odd, zeta' = -wp).
  cx wzeta(cx z) const;
};

// Normalized Eisenstein series E4, E6 at tau (q-expansion).
cx eisenstein(int k, cx tau);

// Direct symmetric lattice sum sum'_{|m|,|n|<=R} (m w1 + n w2)^{-k}, grouped
// over (+/-m, +/-n) quadruplets for cancellation. Oracle for G4/G6.
cx lattice_sum(const Torus& T, int k, int R = 400);

}  // namespace cshv
