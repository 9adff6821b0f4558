// Truncated local (Laurent) series about a base point, fitted by sampling on
// circles, with exact truncated-series algebra: product, quotient, log, exp,
// fractional power, composition, reversion. Also a small bivariate series
// type used for coefficient extraction in two variables, with synthetic
// division by (zeta - beta(w)).
#pragma once

#include <vector>

#include "cshv/common.hpp"

namespace cshv {

// Represents sum_{k} a[k] * (z - base)^(lo + k), valid for |z - base| < radius.
struct LocalSeries {
  cx base = 0.0;
  double radius = 0.0;
  int lo = 0;
  std::vector<cx> a;

  int hi() const { return lo + int(a.size()) - 1; }
  cx coeff(int deg) const {
    const int k = deg - lo;
    return (k < 0 || k >= int(a.size())) ? cx(0.0) : a[std::size_t(k)];
  }
  cx eval(cx z) const;
  // m-th derivative value at z (termwise).
  cx eval_deriv(cx z, int m) const;

  LocalSeries derivative() const;
  // Termwise antiderivative; requires |coeff(-1)| <= res_tol * scale, else
  // ResidueNotCancelled. The degree-(-1) coefficient (residue) is dropped and
  // reported through *residue if given. Constant term set to 0.
  LocalSeries antiderivative(double res_tol = 1e-7, cx* residue = nullptr) const;

  LocalSeries truncated(int new_lo, int new_hi) const;

  // Fits coefficients lo..hi of F about `base` by trapezoid samples on the
  // circle of radius r (spectrally accurate for F analytic in an annulus
  // containing the circle). n_samples defaults to a safe multiple of the
  // requested band.
  static LocalSeries fit(const std::function<cx(cx)>& F, cx base, double r,
                         int lo, int hi, int n_samples = 0);
};

LocalSeries operator+(const LocalSeries& x, const LocalSeries& y);
LocalSeries operator-(const LocalSeries& x, const LocalSeries& y);
LocalSeries operator*(const LocalSeries& x, const LocalSeries& y);
LocalSeries operator*(cx c, const LocalSeries& x);

// Multiply by (z - base)^k (shifts lo).
LocalSeries shift_order(const LocalSeries& x, int k);

// Reciprocal of a series with x.coeff(x.lo) != 0; result has lo = -x.lo.
LocalSeries reciprocal(const LocalSeries& x, int hi_deg);

// log of a unit series (lo == 0, a[0] != 0), principal branch of log(a[0]).
LocalSeries log_series(const LocalSeries& x);
// exp of a series with lo >= 0.
LocalSeries exp_series(const LocalSeries& x);
// k-th root of a series with lo == 0, a[0] != 0 (principal root of a[0]).
LocalSeries root_series(const LocalSeries& x, int k);

// outer(inner(z)) where inner has lo >= 1 (inner(base) contributes nothing);
// outer is a plain coefficient list around 0: sum outer[k] * u^k.
LocalSeries compose(const std::vector<cx>& outer, const LocalSeries& inner);

// Functional inverse of q(z) = sum_{k>=1} q_k (z-base)^k with q_1 != 0:
// returns b with q(base + b(w)) = w through degree `deg` (b.base = 0).
LocalSeries reversion(const LocalSeries& q, int deg);

// ---------------------------------------------------------------------------
// Bivariate truncated series: c[iw][iz] is the coefficient of w^iw * zeta^iz,
// 0 <= iw < Nw, 0 <= iz < Nz. Rectangular truncation is closed under the
// operations used here, so extracted coefficients are exact in exact
// arithmetic given exact inputs.
// ---------------------------------------------------------------------------
struct Series2 {
  int Nw = 0, Nz = 0;
  std::vector<cx> c;

  Series2() = default;
  Series2(int nw, int nz) : Nw(nw), Nz(nz), c(std::size_t(nw) * nz, cx(0)) {}
  cx& at(int iw, int iz) { return c[std::size_t(iw) * Nz + iz]; }
  cx at(int iw, int iz) const { return c[std::size_t(iw) * Nz + iz]; }

  // Coefficient row of w^iw as a polynomial in zeta.
  std::vector<cx> w_slice(int iw) const;
};

Series2 operator+(const Series2& x, const Series2& y);
Series2 operator-(const Series2& x, const Series2& y);
Series2 operator*(const Series2& x, const Series2& y);
Series2 operator*(cx a, const Series2& x);

// Embed univariate series as bivariate: p(zeta) or p(w).
Series2 embed_zeta(const std::vector<cx>& p, int Nw, int Nz);
Series2 embed_w(const std::vector<cx>& p, int Nw, int Nz);

// outer(X) where X has zero constant term; outer a coefficient list.
Series2 compose2(const std::vector<cx>& outer, const Series2& X);

// log of a series with nonzero constant term (principal branch at c00).
Series2 log2_series(const Series2& x);

// Divide N by (zeta - beta(w)), where beta is a power series in w with
// beta(0) = 0 and N vanishes on zeta = beta(w) up to truncation. Returns Q
// with N = (zeta - beta) * Q; the division remainder must be small relative
// to `scale` or SeriesDegreeInsufficient is raised.
Series2 divide_by_zeta_minus_beta(const Series2& N, const std::vector<cx>& beta,
                                  double scale, double tol = 1e-8);

}  // namespace cshv
