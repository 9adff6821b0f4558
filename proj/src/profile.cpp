#include <algorithm>
#include <cmath>

#include "cshv/ansatz.hpp"
#include "cshv/quadrature.hpp"

namespace cshv {

namespace {

// chi: 1 on [0, eta], 0 beyond 2*eta, quintic smoothstep in between.
double chi_cut(double d, double eta) {
  return 1.0 - smoothstep_quintic((d - eta) / eta);
}

}  // namespace

PeriodicField liouville_U(const Sigma0Data& s, double delta, cx a) {
  PeriodicField U(s.torus(), s.M);
  const double l8d2 = std::log(8.0 * delta * delta);
  par_for(std::int64_t(s.M) * s.M, [&](std::int64_t q) {
    const double r2 = std::norm(s.sigma0.v[std::size_t(q)] - a);
    U.v[std::size_t(q)] = l8d2 - 2.0 * std::log(delta * delta + r2);
  });
  return U;
}

PeriodicField profile_source(const Sigma0Data& s, double delta, cx a,
                             std::size_t l, double eta) {
  PeriodicField S(s.torus(), s.M);
  const Torus& T = s.torus();
  const cx xi = s.h.cfg.xi[l];
  const double d2 = delta * delta;
  par_for(std::int64_t(s.M) * s.M, [&](std::int64_t q) {
    const int i = int(q) % s.M, j = int(q) / s.M;
    const cx z = S.z_at(i, j);
    const double chi = chi_cut(T.dist(z, xi), eta);
    if (chi == 0.0) {
      S.v[std::size_t(q)] = 0.0;
      return;
    }
    const double r2 = std::norm(s.sigma0.v[std::size_t(q)] - a);
    const double den = d2 + r2;
    const double eU = 8.0 * d2 / (den * den);
    S.v[std::size_t(q)] = chi * std::norm(s.sigma0p.v[std::size_t(q)]) * eU;
  });
  return S;
}

PeriodicField project_PU(const PeriodicField& S) {
  const double mu = S.mean();
  PeriodicField f = S.map([mu](double x) { return mu - x; });
  return solve_poisson(f);
}

double theta_constant(const Sigma0Data& s, double delta, int M_far) {
  const Torus& T = s.torus();
  const int M = M_far > 0 ? M_far : s.M;
  const double d2 = delta * delta;

  auto F = [&](cx z) {
    // fast path: grid nodes of the stored sigma0 (the far field only ever
    // samples there when M_far == s.M)
    double r2;
    auto [t, u] = T.to_lattice(z);
    const double it = t * s.M + s.M / 2, ju = u * s.M + s.M / 2;
    const double ri = std::round(it), rj = std::round(ju);
    if (std::abs(it - ri) < 1e-9 && std::abs(ju - rj) < 1e-9 && ri >= 0 &&
        ri < s.M && rj >= 0 && rj < s.M) {
      r2 = std::norm(s.sigma0.at(int(ri), int(rj)));
    } else {
      r2 = std::norm(s.sigma0_at(z));
    }
    return 2.0 * std::log(r2) - 2.0 * std::log(d2 + r2);
  };

  std::vector<SingularPatch> patches;
  for (std::size_t l = 0; l < s.h.cfg.xi.size(); ++l)
    patches.push_back({s.h.cfg.xi[l], 0.8 * s.r_override[l]});
  const double I = integrate_patched(F, T, M, patches, 128, 1e-11);
  return -I / T.area();
}

double boundary_flux_f(const Sigma0Data& s, cx z, int Mb) {
  const Torus& T = s.torus();
  if (Mb <= 0) Mb = s.M;
  const Green& green = *s.h.green;
  const cx v1 = -0.5 * (T.w1 + T.w2), v2 = 0.5 * (T.w1 - T.w2);
  const cx v3 = 0.5 * (T.w1 + T.w2), v4 = -0.5 * (T.w1 - T.w2);
  const cx corners[5] = {v1, v2, v3, v4, v1};

  double acc = 0.0;
  for (int e = 0; e < 4; ++e) {
    const cx a = corners[e], b = corners[e + 1];
    const cx dir = (b - a) / std::abs(b - a);
    const cx nu = -cx(0.0, 1.0) * dir;  // outward normal (counterclockwise)
    const double ds = std::abs(b - a) / Mb;
    acc += det_sum(Mb, [&](std::int64_t k) {
      const cx w = a + (b - a) * ((double(k) + 0.5) / Mb);
      const cx s0 = s.sigma0_at(w);
      const cx s0p = s.sigma0p_at(w);
      const double F = 1.0 / std::norm(s0);
      const cx dzF = -s0p / (s0 * s0 * std::conj(s0));
      const double dnF = 2.0 * (nu * dzF).real();
      const double Gv = green.G(w - z);
      const double dnG = 2.0 * (nu * green.G_z(w - z)).real();
      return (dnF * Gv - F * dnG) * ds;
    });
  }
  return acc;
}

KernelElements kernel_elements(const Sigma0Data& s, double delta, cx a,
                               std::size_t l, double eta) {
  const Torus& T = s.torus();
  const cx xi = s.h.cfg.xi[l];
  const double d2 = delta * delta;
  const int M = s.M;

  KernelElements K{PeriodicField(T, M), PeriodicField(T, M),
                   PeriodicField(T, M), PeriodicField(T, M),
                   PeriodicField(T, M), PeriodicField(T, M)};
  PeriodicField S0(T, M), Sre(T, M), Sim(T, M);
  par_for(std::int64_t(M) * M, [&](std::int64_t q) {
    const cx sa = s.sigma0.v[std::size_t(q)] - a;
    const double r2 = std::norm(sa);
    const double den = d2 + r2;
    K.Z0.v[std::size_t(q)] = (d2 - r2) / den;
    const cx Zc = delta * sa / den;
    K.Zre.v[std::size_t(q)] = Zc.real();
    K.Zim.v[std::size_t(q)] = Zc.imag();
    const int i = int(q) % M, j = int(q) / M;
    const double chi = chi_cut(T.dist(K.Z0.z_at(i, j), xi), eta);
    if (chi > 0.0) {
      const double w =
          chi * std::norm(s.sigma0p.v[std::size_t(q)]) * 8.0 * d2 / (den * den);
      S0.v[std::size_t(q)] = w * K.Z0.v[std::size_t(q)];
      Sre.v[std::size_t(q)] = w * K.Zre.v[std::size_t(q)];
      Sim.v[std::size_t(q)] = w * K.Zim.v[std::size_t(q)];
    }
  });
  K.mass_dZ0 = S0.integrate();
  K.mass_dZre = Sre.integrate();
  K.PZ0 = project_PU(S0);
  K.PZre = project_PU(Sre);
  K.PZim = project_PU(Sim);

  const double mu0 = S0.mean(), mure = Sre.mean();
  const double cell = T.area() / (double(M) * M);
  K.gram00 = det_sum(std::int64_t(M) * M, [&](std::int64_t q) {
    return (mu0 - S0.v[std::size_t(q)]) * K.PZ0.v[std::size_t(q)];
  }) * cell;
  K.gram_re0 = det_sum(std::int64_t(M) * M, [&](std::int64_t q) {
    return (mure - Sre.v[std::size_t(q)]) * K.PZ0.v[std::size_t(q)];
  }) * cell;
  return K;
}

double weighted_norm(const Sigma0Data& s, const PeriodicField& hfield,
                     double delta, cx a, double gamma) {
  const int n = s.h.cfg.n_of_xi(0);
  const double d2 = delta * delta;
  const double dg = std::pow(delta, gamma);
  const double pw = n / (n + 1.0);
  // |sigma0'|^2 = kq |sigma0|^{2n/(n+1)} exactly at leading order in the
  // concentration chart; the |sigma0|-based denominator extends that
  // behaviour globally, so the weight stays O(delta^-gamma) at the other
  // vortex points, where sigma0' itself has zeros.
  const double kq =
      (n + 1.0) * (n + 1.0) *
      std::pow(std::abs(s.h.alpha0[0]), -2.0 / (n + 1.0));
  const double dfloor = std::pow(d2, pw);
  double best = 0.0;
  for (std::size_t q = 0; q < hfield.v.size(); ++q) {
    const double r2 = std::norm(s.sigma0.v[q] - a);
    const double w = std::pow(d2 + r2, 1.0 + 0.5 * gamma) /
                     (dg * kq * (std::pow(r2, pw) + dfloor));
    best = std::max(best, std::abs(hfield.v[q]) * w);
  }
  return best;
}

}  // namespace cshv
