#include <algorithm>
#include <cmath>

#include "cshv/conditions.hpp"
#include "cshv/quadrature.hpp"

namespace cshv {

namespace {

// Outer hand-over radii: the largest round z-disks around each xi_l that the
// geometry allows (inside the cell, pairwise disjoint). T is evaluated
// directly inside them, so they are not limited by the series charts. The
// smooth cutoff that splits the integral between the cartesian far grid and
// the polar annuli transitions on [R/2, R]; pushing R out this far keeps the
// steep growth of |T|^2 out of the cartesian part entirely.
std::vector<double> polar_outer_radii(const Sigma0Data& s) {
  const auto& cfg = s.h.cfg;
  const Torus& T = cfg.torus;
  const std::size_t m = cfg.xi.size();
  std::vector<double> R(m);
  for (std::size_t l = 0; l < m; ++l) {
    const cx xi = cfg.xi[l];
    auto [t0, s0] = T.to_lattice(xi);
    const double margin = std::min((0.5 - std::abs(t0)) * std::abs(T.w1),
                                   (0.5 - std::abs(s0)) * std::abs(T.w2));
    double r = 0.45 * margin;
    for (std::size_t k = 0; k < m; ++k)
      if (k != l) r = std::min(r, 0.25 * T.dist(xi, cfg.xi[k]));
    R[l] = r;
  }
  return R;
}

// Base carve radii (the trace scales them down): inside the series chart of
// q0 and below the cutoff plateau, so the annulus [R_in, R_out] always covers
// the transition region.
std::vector<double> carve_inner_radii(const Sigma0Data& s,
                                      const std::vector<double>& Rout,
                                      double rho) {
  const auto& cfg = s.h.cfg;
  const std::size_t m = cfg.xi.size();
  std::vector<double> R(m);
  for (std::size_t l = 0; l < m; ++l) {
    double r = std::min(0.7 * s.r_override[l], 0.5 * Rout[l]);
    if (rho > 0.0) {
      // carve along |sigma0| ~ rho: |q0| = rho^{1/(n+1)} at leading order
      const int nl = cfg.n_of_xi(l);
      const double c1 = std::abs(s.q0_series[l].coeff(1));
      r = std::min(r, std::pow(rho, 1.0 / (nl + 1)) / c1);
    }
    R[l] = r;
  }
  return R;
}

// Cartesian far part (independent of the carve radii): periodic trapezoid of
// (1 - sum_l chi_l) |T|^2 with chi_l = 1 inside R_l/2 and 0 outside R_l.
// The integrand is smooth and doubly periodic, so grid doubling converges
// fast; refined until stable.
double far_part(const Sigma0Data& s, const std::vector<double>& Rout,
                int start_grid) {
  const auto& cfg = s.h.cfg;
  const Torus& T = cfg.torus;
  const std::size_t m = cfg.xi.size();
  auto f = [&](cx z) {
    double cut = 1.0;
    for (std::size_t l = 0; l < m; ++l) {
      const double d = T.dist(z, cfg.xi[l]);
      if (d <= 0.5 * Rout[l]) return 0.0;  // cutoff plateau
      cut -= radial_bump(d, Rout[l]);
    }
    if (cut <= 0.0) return 0.0;
    return cut * std::norm(s.h.Tval(z));
  };
  const double area = T.area();
  double prev = 0.0;
  bool have = false;
  for (int Mg = start_grid; Mg <= 4096; Mg *= 2) {
    const double val =
        det_sum(std::int64_t(Mg) * Mg, [&](std::int64_t q) {
          const int i = int(q % Mg), j = int(q / Mg);
          return f(T.from_lattice((i - Mg / 2) / double(Mg),
                                  (j - Mg / 2) / double(Mg)));
        }) *
        area / (double(Mg) * Mg);
    if (have && std::abs(val - prev) <= 1e-10 * std::max(1.0, std::abs(val)))
      return val;
    prev = val;
    have = true;
  }
  throw ToleranceNotMet(
      "far part of the carved |T|^2 integral did not stabilize under grid "
      "doubling");
}

// Polar annulus around xi_l: chi |T|^2 over R_in <= |z - xi_l| <= R_out.
// Spectral (trapezoid) in the angle, adaptive in the radius with the
// tolerance tied to each geometric subsegment's own magnitude.
double annulus_part(const Sigma0Data& s, std::size_t l, double Rin,
                    double Rout) {
  const cx xi = s.h.cfg.xi[l];
  const int ntheta = 256;
  return det_sum(ntheta, [&](std::int64_t k) {
    const double th = 2.0 * kPi * (double(k) + 0.5) / ntheta;
    const cx dir = std::exp(cx(0.0, th));
    auto rad = [&](cx r) -> cx {
      const double rr = r.real();
      const double chi = radial_bump(rr, Rout);
      if (chi <= 0.0) return cx(0.0);
      return cx(chi * std::norm(s.h.Tval(xi + rr * dir)) * rr, 0.0);
    };
    double acc = 0.0;
    double r0 = Rin;
    while (r0 < Rout) {
      const double r1 = std::min(2.0 * r0, Rout);
      const double coarse = std::abs(gk15(rad, cx(r0, 0.0), cx(r1, 0.0)));
      acc += integrate_segment(rad, cx(r0, 0.0), cx(r1, 0.0),
                               1e-13 * (1.0 + coarse), 40)
                 .real();
      r0 = r1;
    }
    return acc * (2.0 * kPi / ntheta);
  });
}

// Exact carved-disk correction in the root coordinate q (sigma0 = q^{n+1}):
// (n+1)/2 * closed integral of |q0|^{-(2n+2)} d(arg q0) along |z-xi_l| = R.
double ring_correction(const Sigma0Data& s, std::size_t l, double R) {
  const int nl = s.h.cfg.n_of_xi(l);
  const cx xi = s.h.cfg.xi[l];
  const int nphi = 512;
  return 0.5 * (nl + 1) *
         det_sum(nphi, [&](std::int64_t k) {
           const double phi = 2.0 * kPi * double(k) / nphi;
           const cx e = std::exp(cx(0.0, phi));
           const cx z = xi + R * e;
           const cx q = s.q0_series[l].eval(z);
           const cx qp = s.q0_series[l].eval_deriv(z, 1);
           const double theta_p = (qp * cx(0.0, 1.0) * R * e / q).imag();
           return std::pow(std::abs(q), -(2.0 * nl + 2.0)) * theta_p;
         }) *
         (2.0 * kPi / nphi);
}

}  // namespace

void validate_rho(const Sigma0Data& s, double rho) {
  if (rho <= 0.0) throw ConfigInvalid("carve level rho must be positive");
  const auto& cfg = s.h.cfg;
  const std::size_t m = cfg.xi.size();
  // the rho-level set of |sigma0| must sit inside half of each series disk
  for (std::size_t l = 0; l < m; ++l) {
    const int nl = cfg.n_of_xi(l);
    const double rhalf = 0.5 * s.r_override[l];
    double smin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 64; ++k) {
      const double th = 2.0 * kPi * k / 64.0;
      const cx z = cfg.xi[l] + rhalf * std::exp(cx(0.0, th));
      smin = std::min(smin, std::abs(s.sigma0_series[l].eval(z)));
    }
    if (rho >= smin)
      throw RhoTooLarge("level set of |sigma0| = rho leaves half the series "
                        "disk around a concentration point");
    (void)nl;
  }
  // grid values outside the disks must stay above rho
  for (int j = 0; j < s.M; ++j)
    for (int i = 0; i < s.M; ++i) {
      const cx z = s.sigma0.z_at(i, j);
      if (s.override_of(z) >= 0) continue;
      if (std::abs(s.sigma0.at(i, j)) < rho)
        throw RhoTooLarge("|sigma0| dips below rho outside the series disks");
    }
}

D0Result compute_D0_quadrature(const Sigma0Data& s, double rho,
                               int refinements, int panels) {
  if (rho > 0.0) validate_rho(s, rho);
  const std::size_t m = s.h.cfg.xi.size();
  const std::vector<double> Rout = polar_outer_radii(s);
  const std::vector<double> Rbase = carve_inner_radii(s, Rout, rho);
  const double far = far_part(s, Rout, std::max(256, 16 * panels));
  D0Result out;
  for (int r = 0; r <= refinements; ++r) {
    const double fac = std::pow(0.75, r);
    double acc = far;
    for (std::size_t l = 0; l < m; ++l) {
      acc += annulus_part(s, l, fac * Rbase[l], Rout[l]);
      acc -= ring_correction(s, l, fac * Rbase[l]);
    }
    out.trace.emplace_back(fac, acc / kPi);
  }
  out.value = out.trace.front().second;
  return out;
}

double compute_D0_area(const Sigma0Data& s, double tol, int max_panels) {
  const Torus& T = s.torus();
  const cx v1 = -0.5 * (T.w1 + T.w2), v2 = 0.5 * (T.w1 - T.w2);
  const cx v3 = 0.5 * (T.w1 + T.w2), v4 = -0.5 * (T.w1 - T.w2);
  const cx corners[5] = {v1, v2, v3, v4, v1};
  const auto xs = gk15_full_nodes();
  const auto ws = gk15_full_weights();
  auto Tf = [&](cx w) { return s.h.Tval(w); };

  double prev = 0.0;
  for (int K = 32; K <= max_panels; K *= 2) {
    cx Q = 0.0;
    cx Arun = s.A_at(v1);
    for (int e = 0; e < 4; ++e) {
      const cx a = corners[e], b = corners[e + 1];
      for (int p = 0; p < K; ++p) {
        const cx pa = a + (b - a) * (double(p) / K);
        const cx pb = a + (b - a) * (double(p + 1) / K);
        const cx mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
        // A at the panel nodes by short marches from the panel start
        cx acc = 0.0;
        for (int k = 0; k < 15; ++k) {
          const cx x = mid + xs[k] * half;
          const cx Ax =
              Arun + integrate_segment(Tf, pa, x, 1e-13, 40);
          acc += ws[k] * std::conj(Ax) * s.h.Tval(x);
        }
        Q += acc * half;
        Arun += integrate_segment(Tf, pa, pb, 1e-13, 40);
      }
    }
    const double val = 0.5 * Q.imag() / kPi;
    if (K > 32 && std::abs(val - prev) <= tol * std::max(1.0, std::abs(val)))
      return val;
    prev = val;
  }
  throw ToleranceNotMet("boundary-route D0 did not stabilize under panel "
                        "refinement");
}

cx u0_zz(const Green& green, const VortexConfig& cfg, cx z) {
  cx acc = 0.0;
  for (std::size_t j = 0; j < cfg.points.size(); ++j)
    acc += double(cfg.mult[j]) * green.G_zz(z - cfg.points[j]);
  return -4.0 * kPi * acc;
}

GammaUpsilon gamma_upsilon_n0(const HData& h) {
  const auto& cfg = h.cfg;
  const std::size_t m = cfg.xi.size();
  GammaUpsilon gu;
  gu.G.assign(m, std::vector<cx>(m, 0.0));
  gu.U.assign(m, std::vector<cx>(m, 0.0));
  for (std::size_t l = 0; l < m; ++l) {
    if (cfg.n_of_xi(l) != 0)
      throw ConfigInvalid("closed forms require multiplicity-zero xi");
    const cx Hxi = h.Hl[l].coeff(0) * h.P_l(l, cfg.xi[l]);  // = H(xi_l)
    gu.G[l][l] = Hxi * Hxi * u0_zz(*h.green, cfg, cfg.xi[l]);
    gu.U[l][l] = -(2.0 * kPi / cfg.torus.area()) * std::norm(Hxi);
  }
  return gu;
}

GammaUpsilon compute_gamma_upsilon(const Sigma0Data& s) {
  const HData& h = s.h;
  const auto& cfg = h.cfg;
  const Green& green = *h.green;
  const std::size_t m = cfg.xi.size();
  GammaUpsilon gu;
  gu.G.assign(m, std::vector<cx>(m, 0.0));
  gu.U.assign(m, std::vector<cx>(m, 0.0));

  // reversion charts b^j: q0(xi_j + b(w)) = w
  std::vector<std::vector<cx>> beta(m);
  for (std::size_t j = 0; j < m; ++j) {
    const int nj = cfg.n_of_xi(j);
    LocalSeries b = reversion(s.q0_series[j], nj + 2);
    std::vector<cx> bc(std::size_t(nj) + 2, 0.0);
    for (int k = 1; k <= nj + 1; ++k) bc[std::size_t(k)] = b.coeff(k);
    beta[j] = std::move(bc);
  }

  for (std::size_t l = 0; l < m; ++l) {
    const int nl = cfg.n_of_xi(l);
    const int Nz = nl + 2;
    for (std::size_t j = 0; j < m; ++j) {
      const int nj = cfg.n_of_xi(j);
      const int Nw = nj + 2;
      const int odeg = Nw + Nz;  // outer coefficient depth for compositions

      Series2 F(Nw, Nz);
      if (j == l) {
        // diagonal: 2 log U + 4 pi Hstar0-series(zeta - beta(w)) where
        // U = (w - q0(zeta)) / (beta(w) - zeta)
        Series2 N(Nw, Nz);
        N.at(1, 0) = 1.0;  // w
        for (int k = 1; k < Nz; ++k) N.at(0, k) -= s.q0_series[l].coeff(k);
        const double scale = std::abs(s.q0_series[l].coeff(1));
        Series2 Q = divide_by_zeta_minus_beta(N, beta[l], scale);
        Series2 U = cx(-1.0) * Q;
        F = cx(2.0) * log2_series(U);

        LocalSeries hs = green.hstar_series0(odeg);
        std::vector<cx> outer(std::size_t(odeg) + 1, 0.0);
        for (int k = 0; k <= odeg; ++k) outer[std::size_t(k)] = hs.coeff(k);
        Series2 X(Nw, Nz);  // zeta - beta(w)
        X.at(0, 1) = 1.0;
        for (int k = 1; k < Nw; ++k) X.at(k, 0) -= beta[l][std::size_t(k)];
        const cx a0 = outer[0];
        outer[0] = 0.0;
        Series2 comp = compose2(outer, X);
        comp.at(0, 0) += a0;
        F = F + cx(4.0 * kPi) * comp;
      } else {
        // off-diagonal: -2 log(x0 + X) + 4 pi Hstar-series-at-x0 (X),
        // X = zeta - beta_j(w), x0 = xi_l - xi_j
        const cx x0 = cfg.xi[l] - cfg.xi[j];
        Series2 X(Nw, Nz);
        X.at(0, 1) = 1.0;
        for (int k = 1; k < Nw; ++k) X.at(k, 0) -= beta[j][std::size_t(k)];

        Series2 lg = X;
        lg.at(0, 0) += x0;
        F = cx(-2.0) * log2_series(lg);

        LocalSeries hs = green.hstar_series(x0, odeg);
        std::vector<cx> outer(std::size_t(odeg) + 1, 0.0);
        for (int k = 0; k <= odeg; ++k) outer[std::size_t(k)] = hs.coeff(k);
        const cx a0 = outer[0];
        outer[0] = 0.0;
        Series2 comp = compose2(outer, X);
        comp.at(0, 0) += a0;
        F = F + cx(4.0 * kPi) * comp;
      }

      // Gamma^{lj} = (n_j+1) [zeta^{n_l+1}] ( H^l-series * w-slice_{n_j+1} F )
      const std::vector<cx> frow = F.w_slice(nj + 1);
      cx conv = 0.0;
      for (int k = 0; k <= nl + 1; ++k) {
        const int kf = nl + 1 - k;
        if (kf < int(frow.size())) conv += h.Hl[l].coeff(k) * frow[std::size_t(kf)];
      }
      gu.G[l][j] = double(nj + 1) * conv;

      // Upsilon^{lj} = -(2 pi (n_j+1)/|Omega|) conj(b^j_{n_j+1}) [zeta^{n_l}] H^l
      gu.U[l][j] = -(2.0 * kPi * (nj + 1) / cfg.torus.area()) *
                   std::conj(beta[j][std::size_t(nj) + 1]) * h.Hl[l].coeff(nl);
    }
  }
  return gu;
}

Eigen::MatrixXd build_matrix_A(const GammaUpsilon& gu, const HData& h,
                               double D0) {
  const auto& cfg = h.cfg;
  const std::size_t m = cfg.xi.size();
  int nmin = cfg.n_of_xi(0);
  for (std::size_t l = 1; l < m; ++l) nmin = std::min(nmin, cfg.n_of_xi(l));

  // weights over the minimal-multiplicity points
  std::vector<double> w(m, 0.0);
  double wsum = 0.0;
  for (std::size_t l = 0; l < m; ++l) {
    if (cfg.n_of_xi(l) != nmin) continue;
    w[l] = std::pow(std::abs(h.Hl[l].coeff(0)), -2.0 / (nmin + 1.0));
    wsum += w[l];
  }
  for (std::size_t l = 0; l < m; ++l) w[l] /= wsum;

  const double cn = double(nmin) * (2.0 * nmin + 3.0) / (nmin + 1.0) * D0;
  Eigen::MatrixXd A(2 * m, 2 * m);
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t j = 0; j < m; ++j) {
      const cx G = gu.G[l][j], U = gu.U[l][j];
      const double c = (l == j && cfg.n_of_xi(l) == nmin) ? cn * w[l] : 0.0;
      A(2 * l, 2 * j) = (G + U).real() + c;
      A(2 * l, 2 * j + 1) = (U - G).imag();
      A(2 * l + 1, 2 * j) = (G + U).imag();
      A(2 * l + 1, 2 * j + 1) = (G - U).real() - c;
    }
  return A;
}

StrongInequality strong_nondegeneracy(const HData& h) {
  StrongInequality out;
  const VortexConfig& cfg = h.cfg;
  const double scale = std::sqrt(cfg.torus.area());
  out.applicable = cfg.xi.size() == 1 && cfg.n_of_xi(0) == 2 &&
                   cfg.torus.is_rectangle() &&
                   std::abs(cfg.torus.wrap(cfg.xi[0])) < 1e-9 * scale;
  if (!out.applicable) return out;
  if (h.Hl[0].hi() < 6)
    throw SeriesDegreeInsufficient(
        "H series must reach degree 6 for the strong inequality");
  const cx lam0 = h.Hl[0].coeff(0);
  const cx h2 = 2.0 * h.Hl[0].coeff(2) / lam0;
  const cx h4 = 24.0 * h.Hl[0].coeff(4) / lam0;
  const cx h6 = 720.0 * h.Hl[0].coeff(6) / lam0;
  const Green& g = *h.green;
  const double Hs2 = g.hstar_d2_0();
  const double Hs4 = g.hstar_d4_0();
  const double Hs6 = g.hstar_d6_0();
  out.lhs = std::abs(h2 * h4 / 4.0 + h6 / 180.0 - 6.0 * kPi * h2 * h2 * Hs2 -
                     4.0 * kPi * h2 * Hs4 - 2.0 * kPi / 3.0 * Hs6);
  out.rhs = 3.0 * kPi / cfg.torus.area() * std::norm(h2);
  out.holds = out.lhs < out.rhs;
  return out;
}

ConditionReport check_existence(const Sigma0Data& s) {
  ConditionReport rep;
  const HData& h = s.h;
  const std::size_t m = h.cfg.xi.size();

  rep.balance_ok = h.cfg.balance_ok();
  rep.c0 = h.c0;

  // residue diagnostic: contour integrals of T on mid-size circles
  rep.residue_max = 0.0;
  for (std::size_t l = 0; l < m; ++l) {
    const double r = 0.75 * s.r_override[l];
    const int nk = 256;
    cx res = 0.0;
    for (int k = 0; k < nk; ++k) {
      const double th = 2.0 * kPi * k / nk;
      const cx e = std::exp(cx(0.0, th));
      res += h.Tval(h.cfg.xi[l] + r * e) * r * e;
    }
    res /= double(nk);  // equals the contour residue by exactness of the DFT
    double scale = 0.0;
    for (int k = 0; k < nk; k += 16)
      scale = std::max(scale, std::abs(h.Tval(h.cfg.xi[l] +
                                              r * std::exp(cx(0.0, 2.0 * kPi * k / nk)))) * r);
    rep.residue_max = std::max(rep.residue_max, std::abs(res) / std::max(scale, 1e-300));
  }
  rep.residues_ok = rep.residue_max < 1e-8;

  const D0Result d0 = compute_D0_quadrature(s);
  rep.D0 = d0.value;
  rep.D0_area = compute_D0_area(s);
  rep.D0_route_diff = std::abs(rep.D0 - rep.D0_area);
  rep.D0_negative = rep.D0 < 0.0;

  rep.gu = compute_gamma_upsilon(s);
  rep.A = build_matrix_A(rep.gu, h, rep.D0);
  rep.detA = rep.A.determinant();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rep.A);
  rep.min_singular_value = svd.singularValues().minCoeff();
  const double anorm = svd.singularValues().maxCoeff();
  rep.nondegenerate = rep.min_singular_value > 1e-6 * std::max(anorm, 1e-300);
  rep.strong = strong_nondegeneracy(h);
  return rep;
}

}  // namespace cshv
