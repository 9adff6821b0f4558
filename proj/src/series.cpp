#include "cshv/series.hpp"

#include <algorithm>
#include <cmath>

namespace cshv {

cx LocalSeries::eval(cx z) const {
  const cx u = z - base;
  // Horner on the regular part, then multiply by u^lo.
  cx acc = 0.0;
  for (int k = int(a.size()) - 1; k >= 0; --k) acc = acc * u + a[std::size_t(k)];
  if (lo == 0) return acc;
  return acc * std::pow(u, lo);
}

cx LocalSeries::eval_deriv(cx z, int m) const {
  const cx u = z - base;
  cx acc = 0.0;
  for (int k = 0; k < int(a.size()); ++k) {
    const int d = lo + k;
    double f = 1.0;
    for (int j = 0; j < m; ++j) f *= double(d - j);
    if (f == 0.0) continue;
    acc += a[std::size_t(k)] * f * std::pow(u, d - m);
  }
  return acc;
}

LocalSeries LocalSeries::derivative() const {
  LocalSeries out;
  out.base = base;
  out.radius = radius;
  out.lo = lo - 1;
  out.a.resize(a.size(), cx(0));
  for (int k = 0; k < int(a.size()); ++k)
    out.a[std::size_t(k)] = a[std::size_t(k)] * double(lo + k);
  // Drop a leading exact zero from the constant term differentiating away.
  return out;
}

LocalSeries LocalSeries::antiderivative(double res_tol, cx* residue) const {
  double scale = 0.0;
  for (const cx& x : a) scale = std::max(scale, std::abs(x));
  LocalSeries out;
  out.base = base;
  out.radius = radius;
  out.lo = lo + 1;
  out.a.assign(a.size(), cx(0));
  cx res = 0.0;
  for (int k = 0; k < int(a.size()); ++k) {
    const int d = lo + k;
    if (d == -1) {
      res = a[std::size_t(k)];
      continue;
    }
    out.a[std::size_t(k)] = a[std::size_t(k)] / double(d + 1);
  }
  if (residue) *residue = res;
  if (std::abs(res) > res_tol * std::max(1.0, scale))
    throw ResidueNotCancelled("antiderivative residue |" + std::to_string(std::abs(res)) +
                              "| above tolerance");
  // Re-normalize so the constant (degree 0) slot exists and is zero.
  LocalSeries norm = out.truncated(std::min(out.lo, 0), out.hi());
  return norm;
}

LocalSeries LocalSeries::truncated(int new_lo, int new_hi) const {
  LocalSeries out;
  out.base = base;
  out.radius = radius;
  out.lo = new_lo;
  out.a.assign(std::size_t(new_hi - new_lo + 1), cx(0));
  for (int d = new_lo; d <= new_hi; ++d) out.a[std::size_t(d - new_lo)] = coeff(d);
  return out;
}

LocalSeries LocalSeries::fit(const std::function<cx(cx)>& F, cx base, double r,
                             int lo, int hi, int n_samples) {
  const int band = hi - lo + 1;
  int N = n_samples > 0 ? n_samples : std::max(256, 8 * band);
  LocalSeries out;
  out.base = base;
  out.radius = r;
  out.lo = lo;
  out.a.assign(std::size_t(band), cx(0));
  std::vector<cx> vals(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    const double th = 2.0 * kPi * j / N;
    vals[std::size_t(j)] = F(base + r * std::exp(cx(0, th)));
  }
  for (int d = lo; d <= hi; ++d) {
    cx acc = 0.0;
    for (int j = 0; j < N; ++j) {
      const double th = 2.0 * kPi * j / N;
      acc += vals[std::size_t(j)] * std::exp(cx(0, -d * th));
    }
    out.a[std::size_t(d - lo)] = acc / (double(N) * std::pow(r, d));
  }
  return out;
}

namespace {
void align(const LocalSeries& x, const LocalSeries& y, LocalSeries& out) {
  out.base = x.base;
  out.radius = std::min(x.radius > 0 ? x.radius : y.radius,
                        y.radius > 0 ? y.radius : x.radius);
  out.lo = std::min(x.lo, y.lo);
  const int hi = std::max(x.hi(), y.hi());
  out.a.assign(std::size_t(hi - out.lo + 1), cx(0));
}
}  // namespace

LocalSeries operator+(const LocalSeries& x, const LocalSeries& y) {
  LocalSeries out;
  align(x, y, out);
  for (int d = out.lo; d <= out.hi(); ++d)
    out.a[std::size_t(d - out.lo)] = x.coeff(d) + y.coeff(d);
  return out;
}

LocalSeries operator-(const LocalSeries& x, const LocalSeries& y) {
  LocalSeries out;
  align(x, y, out);
  for (int d = out.lo; d <= out.hi(); ++d)
    out.a[std::size_t(d - out.lo)] = x.coeff(d) - y.coeff(d);
  return out;
}

LocalSeries operator*(const LocalSeries& x, const LocalSeries& y) {
  LocalSeries out;
  out.base = x.base;
  out.radius = std::min(x.radius > 0 ? x.radius : y.radius,
                        y.radius > 0 ? y.radius : x.radius);
  out.lo = x.lo + y.lo;
  // Keep the band min(len_x, len_y) truncation-exact: the reachable top
  // degree is bounded by the shorter information band.
  const int len = std::min(x.hi() - x.lo, y.hi() - y.lo) + 1;
  out.a.assign(std::size_t(len), cx(0));
  for (int i = 0; i < int(x.a.size()); ++i)
    for (int j = 0; j < int(y.a.size()); ++j) {
      const int k = i + j;
      if (k < len) out.a[std::size_t(k)] += x.a[std::size_t(i)] * y.a[std::size_t(j)];
    }
  return out;
}

LocalSeries operator*(cx c, const LocalSeries& x) {
  LocalSeries out = x;
  for (cx& v : out.a) v *= c;
  return out;
}

LocalSeries shift_order(const LocalSeries& x, int k) {
  LocalSeries out = x;
  out.lo += k;
  return out;
}

LocalSeries reciprocal(const LocalSeries& x, int hi_deg) {
  if (x.a.empty() || std::abs(x.a[0]) == 0.0)
    throw SeriesDegreeInsufficient("reciprocal of series with vanishing leading term");
  // Write x = (z-b)^lo * u with u unit; invert u by Neumann recursion.
  const int n = hi_deg + x.lo + 1;  // coefficients of 1/u needed
  if (n < 1) throw SeriesDegreeInsufficient("reciprocal: requested degree too low");
  std::vector<cx> u(std::size_t(n), cx(0));
  for (int k = 0; k < n; ++k) u[std::size_t(k)] = x.coeff(x.lo + k);
  std::vector<cx> inv(std::size_t(n), cx(0));
  inv[0] = 1.0 / u[0];
  for (int k = 1; k < n; ++k) {
    cx s = 0.0;
    for (int j = 1; j <= k; ++j) s += u[std::size_t(j)] * inv[std::size_t(k - j)];
    inv[std::size_t(k)] = -s / u[0];
  }
  LocalSeries out;
  out.base = x.base;
  out.radius = x.radius;
  out.lo = -x.lo;
  out.a = std::move(inv);
  return out;
}

LocalSeries log_series(const LocalSeries& x) {
  if (x.lo != 0 || x.a.empty() || std::abs(x.a[0]) == 0.0)
    throw SeriesDegreeInsufficient("log_series requires a unit series");
  const int n = int(x.a.size());
  // log x = log a0 + integral of x'/x.
  std::vector<cx> u(x.a);
  std::vector<cx> inv(std::size_t(n), cx(0));
  inv[0] = 1.0 / u[0];
  for (int k = 1; k < n; ++k) {
    cx s = 0.0;
    for (int j = 1; j <= k; ++j) s += u[std::size_t(j)] * inv[std::size_t(k - j)];
    inv[std::size_t(k)] = -s / u[0];
  }
  LocalSeries out;
  out.base = x.base;
  out.radius = x.radius;
  out.lo = 0;
  out.a.assign(std::size_t(n), cx(0));
  out.a[0] = std::log(u[0]);
  for (int k = 1; k < n; ++k) {
    cx s = 0.0;  // coefficient k-1 of x'/x
    for (int j = 1; j <= k; ++j)
      s += double(j) * u[std::size_t(j)] * inv[std::size_t(k - j)];
    out.a[std::size_t(k)] = s / double(k);
  }
  return out;
}

LocalSeries exp_series(const LocalSeries& x) {
  if (x.lo < 0) throw SeriesDegreeInsufficient("exp_series requires lo >= 0");
  const int hi = x.hi();
  const int n = hi + 1;
  std::vector<cx> u(std::size_t(n), cx(0));
  for (int d = 0; d <= hi; ++d) u[std::size_t(d)] = x.coeff(d);
  std::vector<cx> e(std::size_t(n), cx(0));
  e[0] = std::exp(u[0]);
  // e' = u' e  =>  k e_k = sum_{j=1..k} j u_j e_{k-j}.
  for (int k = 1; k < n; ++k) {
    cx s = 0.0;
    for (int j = 1; j <= k; ++j)
      s += double(j) * u[std::size_t(j)] * e[std::size_t(k - j)];
    e[std::size_t(k)] = s / double(k);
  }
  LocalSeries out;
  out.base = x.base;
  out.radius = x.radius;
  out.lo = 0;
  out.a = std::move(e);
  return out;
}

LocalSeries root_series(const LocalSeries& x, int k) {
  LocalSeries lg = log_series(x);
  for (cx& v : lg.a) v /= double(k);
  return exp_series(lg);
}

LocalSeries compose(const std::vector<cx>& outer, const LocalSeries& inner) {
  if (inner.lo < 1)
    throw SeriesDegreeInsufficient("compose requires inner series with lo >= 1");
  const int hi = inner.hi();
  LocalSeries acc;
  acc.base = inner.base;
  acc.radius = inner.radius;
  acc.lo = 0;
  acc.a.assign(std::size_t(hi + 1), cx(0));
  // Horner in the outer coefficients.
  for (int k = int(outer.size()) - 1; k >= 0; --k) {
    acc = acc * inner;
    acc = acc.truncated(0, hi);
    acc.a[0] += outer[std::size_t(k)];
  }
  return acc;
}

LocalSeries reversion(const LocalSeries& q, int deg) {
  if (std::abs(q.coeff(1)) == 0.0)
    throw SeriesDegreeInsufficient("reversion requires q with nonzero linear term");
  if (std::abs(q.coeff(0)) > 0.0)
    throw SeriesDegreeInsufficient("reversion requires q(base) = 0");
  std::vector<cx> qc(std::size_t(deg + 1), cx(0));
  for (int d = 1; d <= deg; ++d) qc[std::size_t(d)] = q.coeff(d);
  std::vector<cx> qpc(std::size_t(deg + 1), cx(0));
  for (int d = 0; d + 1 <= deg; ++d)
    qpc[std::size_t(d)] = qc[std::size_t(d + 1)] * double(d + 1);
  // Newton iteration b <- b - (q(b) - w)/q'(b) in truncated arithmetic; doubles
  // the count of exact coefficients per pass.
  LocalSeries b;
  b.base = 0.0;
  b.radius = 0.0;
  b.lo = 0;
  b.a.assign(std::size_t(deg + 1), cx(0));
  b.a[1] = 1.0 / qc[1];
  const double scale = std::abs(b.a[1]);
  for (int it = 0; it < 64; ++it) {
    const LocalSeries binner = b.truncated(1, deg);
    const LocalSeries qb = compose(qc, binner).truncated(0, deg);
    const LocalSeries qpb = compose(qpc, binner).truncated(0, deg);
    LocalSeries r = qb;
    r.a[1] -= 1.0;
    double rn = 0.0;
    for (const cx& v : r.a) rn = std::max(rn, std::abs(v));
    if (rn < 1e-15 * std::max(1.0, scale)) break;
    const LocalSeries corr = r * reciprocal(qpb, deg);
    b = (b - corr).truncated(0, deg);
    b.a[0] = 0.0;
  }
  return b.truncated(1, deg);
}

// ---------------------------------------------------------------------------

std::vector<cx> Series2::w_slice(int iw) const {
  std::vector<cx> out(static_cast<std::size_t>(Nz));
  for (int iz = 0; iz < Nz; ++iz) out[std::size_t(iz)] = at(iw, iz);
  return out;
}

Series2 operator+(const Series2& x, const Series2& y) {
  Series2 out(std::max(x.Nw, y.Nw), std::max(x.Nz, y.Nz));
  for (int iw = 0; iw < out.Nw; ++iw)
    for (int iz = 0; iz < out.Nz; ++iz) {
      cx v = 0.0;
      if (iw < x.Nw && iz < x.Nz) v += x.at(iw, iz);
      if (iw < y.Nw && iz < y.Nz) v += y.at(iw, iz);
      out.at(iw, iz) = v;
    }
  return out;
}

Series2 operator-(const Series2& x, const Series2& y) {
  Series2 neg = cx(-1.0) * y;
  return x + neg;
}

Series2 operator*(const Series2& x, const Series2& y) {
  // Truncate to the common rectangle: those coefficients are exact given
  // exact inputs on each factor's rectangle.
  Series2 out(std::min(x.Nw, y.Nw), std::min(x.Nz, y.Nz));
  for (int iw = 0; iw < x.Nw; ++iw)
    for (int iz = 0; iz < x.Nz; ++iz) {
      const cx xv = x.at(iw, iz);
      if (xv == cx(0.0)) continue;
      for (int jw = 0; jw + iw < out.Nw && jw < y.Nw; ++jw)
        for (int jz = 0; jz + iz < out.Nz && jz < y.Nz; ++jz)
          out.at(iw + jw, iz + jz) += xv * y.at(jw, jz);
    }
  return out;
}

Series2 operator*(cx a, const Series2& x) {
  Series2 out = x;
  for (cx& v : out.c) v *= a;
  return out;
}

Series2 embed_zeta(const std::vector<cx>& p, int Nw, int Nz) {
  Series2 out(Nw, Nz);
  for (int iz = 0; iz < Nz && iz < int(p.size()); ++iz) out.at(0, iz) = p[std::size_t(iz)];
  return out;
}

Series2 embed_w(const std::vector<cx>& p, int Nw, int Nz) {
  Series2 out(Nw, Nz);
  for (int iw = 0; iw < Nw && iw < int(p.size()); ++iw) out.at(iw, 0) = p[std::size_t(iw)];
  return out;
}

Series2 compose2(const std::vector<cx>& outer, const Series2& X) {
  if (std::abs(X.at(0, 0)) > 0.0)
    throw SeriesDegreeInsufficient("compose2 requires zero constant term");
  Series2 acc(X.Nw, X.Nz);
  for (int k = int(outer.size()) - 1; k >= 0; --k) {
    acc = acc * X;
    acc.at(0, 0) += outer[std::size_t(k)];
  }
  return acc;
}

Series2 log2_series(const Series2& x) {
  const cx c00 = x.at(0, 0);
  if (std::abs(c00) == 0.0)
    throw SeriesDegreeInsufficient("log2_series requires nonzero constant term");
  Series2 u = (1.0 / c00) * x;
  u.at(0, 0) = 0.0;  // u = x/c00 - 1
  // log(1+u) = sum (-1)^{k+1} u^k / k up to total truncation.
  const int kmax = (x.Nw - 1) + (x.Nz - 1);
  Series2 acc(x.Nw, x.Nz);
  Series2 upow = u;
  for (int k = 1; k <= kmax; ++k) {
    const double sgn = (k % 2 == 1) ? 1.0 : -1.0;
    acc = acc + (sgn / double(k)) * upow;
    if (k <= kmax - 1) upow = upow * u;
  }
  acc.at(0, 0) += std::log(c00);
  return acc;
}

Series2 divide_by_zeta_minus_beta(const Series2& N, const std::vector<cx>& beta,
                                  double scale, double tol) {
  // N = sum_j N_j(w) zeta^j. Synthetic (Horner) division from the top:
  // Q_{d-1} = N_d; Q_{j-1} = N_j + beta * Q_j; remainder R = N_0 + beta * Q_0.
  const int Nw = N.Nw, Nz = N.Nz;
  auto mul_beta = [&](const std::vector<cx>& p) {
    std::vector<cx> out(std::size_t(Nw), cx(0));
    for (int i = 0; i < Nw; ++i) {
      if (p[std::size_t(i)] == cx(0.0)) continue;
      for (int j = 1; j + i < Nw && j < int(beta.size()); ++j)
        out[std::size_t(i + j)] += p[std::size_t(i)] * beta[std::size_t(j)];
    }
    return out;
  };
  Series2 Q(Nw, Nz);
  std::vector<cx> carry(std::size_t(Nw), cx(0));  // Q_j while descending
  for (int j = Nz - 1; j >= 1; --j) {
    std::vector<cx> Nj = N.w_slice(0);  // placeholder, filled below
    for (int iw = 0; iw < Nw; ++iw) Nj[std::size_t(iw)] = N.at(iw, j);
    std::vector<cx> bq = mul_beta(carry);
    for (int iw = 0; iw < Nw; ++iw) {
      const cx qv = Nj[std::size_t(iw)] + bq[std::size_t(iw)];
      Q.at(iw, j - 1) = qv;
      carry[std::size_t(iw)] = qv;
    }
  }
  // Remainder check.
  std::vector<cx> bq = mul_beta(carry);
  double rmax = 0.0;
  for (int iw = 0; iw < Nw; ++iw)
    rmax = std::max(rmax, std::abs(N.at(iw, 0) + bq[std::size_t(iw)]));
  if (rmax > tol * std::max(1.0, scale))
    throw SeriesDegreeInsufficient("synthetic division remainder " +
                                   std::to_string(rmax) + " too large");
  return Q;
}

}  // namespace cshv
