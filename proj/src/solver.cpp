#include "cshv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace cshv {

namespace {

double dot(const PeriodicField& a, const PeriodicField& b) {
  return det_sum(std::int64_t(a.v.size()), [&](std::int64_t k) {
    return a.v[std::size_t(k)] * b.v[std::size_t(k)];
  });
}

double nrm2(const PeriodicField& a) { return std::sqrt(dot(a, a)); }

double sup_norm(const PeriodicField& a) {
  double best = 0.0;
  for (double x : a.v) best = std::max(best, std::abs(x));
  return best;
}

void remove_mean(PeriodicField& a) {
  const double m = a.mean();
  for (double& x : a.v) x -= m;
}

}  // namespace

double c_branch(const PeriodicField& u0, const PeriodicField& w, int N,
                double epsilon, Branch b) {
  if (u0.M != w.M) throw GridTooSmall("u0 and w live on different grids");
  const std::int64_t n = std::int64_t(u0.M) * u0.M;
  const double cell = u0.torus.area() / double(n);
  const double S1 = cell * det_sum(n, [&](std::int64_t k) {
                      return std::exp(u0.v[std::size_t(k)] + w.v[std::size_t(k)]);
                    });
  const double S2 = cell * det_sum(n, [&](std::int64_t k) {
                      return std::exp(2.0 * (u0.v[std::size_t(k)] + w.v[std::size_t(k)]));
                    });
  const double q = 4.0 * kPi * N * epsilon * epsilon;
  const double disc = S1 * S1 - 4.0 * q * S2;
  if (disc < 0.0)
    throw DiscriminantNegative("constraint discriminant " + std::to_string(disc));
  const double root = std::sqrt(disc);
  return b == Branch::minus ? std::log(2.0 * q / (S1 + root))
                            : std::log((S1 + root) / (2.0 * S2));
}

struct VortexSolver::State {
  double epsilon = 0.0;
  double q = 0.0;  // 4 pi N eps^2
  PeriodicField E1, E2;
  double S1 = 0.0, S2 = 0.0, root = 0.0, ec = 0.0, c_minus = 0.0;
  PeriodicField m;  // multiplier of the linearization
  PeriodicField R;
  double res_sup = 0.0;
};

VortexSolver::VortexSolver(std::shared_ptr<Green> green,
                           const VortexConfig& cfg, int M)
    : green_(std::move(green)), cfg_(cfg), M_(M), N_(cfg.N()) {
  cfg_.validate();
  u0_ = build_u0(*green_, cfg_, M_);
}

double VortexSolver::epsilon_max() const {
  return std::sqrt(cfg_.torus.area() / (16.0 * kPi * N_));
}

VortexSolver::State VortexSolver::make_state(const PeriodicField& w,
                                             double epsilon) const {
  if (w.M != M_) throw GridTooSmall("iterate grid does not match the solver");
  State st;
  st.epsilon = epsilon;
  st.q = 4.0 * kPi * N_ * epsilon * epsilon;
  st.E1 = PeriodicField(cfg_.torus, M_);
  st.E2 = PeriodicField(cfg_.torus, M_);
  const std::int64_t n = std::int64_t(M_) * M_;
  par_for(n, [&](std::int64_t k) {
    const double x = u0_.v[std::size_t(k)] + w.v[std::size_t(k)];
    st.E1.v[std::size_t(k)] = std::exp(x);
    st.E2.v[std::size_t(k)] = std::exp(2.0 * x);
  });
  st.S1 = st.E1.integrate();
  st.S2 = st.E2.integrate();
  const double disc = st.S1 * st.S1 - 4.0 * st.q * st.S2;
  if (disc < 0.0)
    throw DiscriminantNegative("constraint discriminant " +
                               std::to_string(disc) + " at eps=" +
                               std::to_string(epsilon));
  st.root = std::sqrt(disc);
  st.ec = 2.0 * st.q / (st.S1 + st.root);
  st.c_minus = std::log(st.ec);

  const double inv_e2 = 1.0 / (epsilon * epsilon);
  const double ec2 = st.ec * st.ec;
  const double bg = 4.0 * kPi * N_ / cfg_.torus.area();
  st.R = w.laplacian();
  st.m = PeriodicField(cfg_.torus, M_);
  par_for(n, [&](std::int64_t k) {
    const double e1 = st.E1.v[std::size_t(k)], e2 = st.E2.v[std::size_t(k)];
    st.R.v[std::size_t(k)] += inv_e2 * (st.ec * e1 - ec2 * e2) - bg;
    st.m.v[std::size_t(k)] = inv_e2 * (st.ec * e1 - 2.0 * ec2 * e2);
  });
  st.res_sup = sup_norm(st.R);
  return st;
}

PeriodicField VortexSolver::residual(const PeriodicField& w,
                                     double epsilon) const {
  return make_state(w, epsilon).R;
}

// J[phi] = Lap(phi) + m phi + dc[phi] m, where dc is the derivative of the
// branch constant: dc = -(dS1 + dD)/(S1 + root), dD = (S1 dS1 - 2q dS2)/root,
// dS1 = int E1 phi, dS2 = 2 int E2 phi.
struct JacContext {
  const PeriodicField* E1;
  const PeriodicField* E2;
  const PeriodicField* m;
  double S1, root, q;
};

namespace {

PeriodicField jac_apply(const JacContext& c, const PeriodicField& phi) {
  const std::int64_t n = std::int64_t(phi.M) * phi.M;
  const double cell = phi.torus.area() / double(n);
  const double dS1 = cell * det_sum(n, [&](std::int64_t k) {
                       return c.E1->v[std::size_t(k)] * phi.v[std::size_t(k)];
                     });
  const double dS2 = 2.0 * cell * det_sum(n, [&](std::int64_t k) {
                       return c.E2->v[std::size_t(k)] * phi.v[std::size_t(k)];
                     });
  const double dD = (c.S1 * dS1 - 2.0 * c.q * dS2) / c.root;
  const double dc = -(dS1 + dD) / (c.S1 + c.root);
  PeriodicField out = phi.laplacian();
  par_for(n, [&](std::int64_t k) {
    out.v[std::size_t(k)] +=
        c.m->v[std::size_t(k)] * (phi.v[std::size_t(k)] + dc);
  });
  return out;
}

// Preconditioned BiCGStab for J x = b on the zero-mean subspace. Returns the
// best iterate reached; breakdowns end the iteration early (the outer damped
// Newton absorbs an imperfect direction).
PeriodicField bicgstab(const JacContext& ctx, const PeriodicField& b,
                       double kappa, double tol_abs, int max_iter) {
  PeriodicField x(b.torus, b.M);
  PeriodicField r = b;
  remove_mean(r);
  PeriodicField rhat = r;
  PeriodicField p(b.torus, b.M), v(b.torus, b.M);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double rnorm = nrm2(r);
  for (int it = 0; it < max_iter && rnorm > tol_abs; ++it) {
    const double rho_new = dot(rhat, r);
    if (std::abs(rho_new) < 1e-300) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    // p = r + beta (p - omega v)
    par_for(std::int64_t(p.v.size()), [&](std::int64_t k) {
      p.v[std::size_t(k)] =
          r.v[std::size_t(k)] +
          beta * (p.v[std::size_t(k)] - omega * v.v[std::size_t(k)]);
    });
    PeriodicField phat = helmholtz_inverse(p, kappa);
    remove_mean(phat);
    v = jac_apply(ctx, phat);
    remove_mean(v);
    const double rv = dot(rhat, v);
    if (std::abs(rv) < 1e-300) break;
    alpha = rho / rv;
    PeriodicField s = r;
    par_for(std::int64_t(s.v.size()), [&](std::int64_t k) {
      s.v[std::size_t(k)] -= alpha * v.v[std::size_t(k)];
    });
    PeriodicField shat = helmholtz_inverse(s, kappa);
    remove_mean(shat);
    PeriodicField t = jac_apply(ctx, shat);
    remove_mean(t);
    const double tt = dot(t, t);
    if (tt < 1e-300) {
      par_for(std::int64_t(x.v.size()), [&](std::int64_t k) {
        x.v[std::size_t(k)] += alpha * phat.v[std::size_t(k)];
      });
      break;
    }
    omega = dot(t, s) / tt;
    par_for(std::int64_t(x.v.size()), [&](std::int64_t k) {
      x.v[std::size_t(k)] +=
          alpha * phat.v[std::size_t(k)] + omega * shat.v[std::size_t(k)];
      r.v[std::size_t(k)] = s.v[std::size_t(k)] - omega * t.v[std::size_t(k)];
    });
    rnorm = nrm2(r);
    if (omega == 0.0) break;
  }
  return x;
}

}  // namespace

PeriodicField VortexSolver::jacobian_apply(const PeriodicField& w,
                                           double epsilon,
                                           const PeriodicField& phi) const {
  const State st = make_state(w, epsilon);
  const JacContext ctx{&st.E1, &st.E2, &st.m, st.S1, st.root, st.q};
  return jac_apply(ctx, phi);
}

SolveResult VortexSolver::solve(const PeriodicField& w_init, double epsilon,
                                const SolveOptions& opt) const {
  if (!(epsilon > 0.0) || epsilon >= epsilon_max())
    throw ConfigInvalid(
        "epsilon outside the solvability window 16 pi N eps^2 < |Omega|");
  PeriodicField w = w_init;
  remove_mean(w);
  State st = make_state(w, epsilon);
  std::vector<double> history{st.res_sup};
  int increase_count = 0;
  int iter = 0;
  for (; iter < opt.max_newton && st.res_sup > opt.tol_sup; ++iter) {
    const JacContext ctx{&st.E1, &st.E2, &st.m, st.S1, st.root, st.q};
    double kappa = 0.0;
    for (double x : st.m.v) kappa += std::abs(x);
    kappa = std::max(1e-8, kappa / double(st.m.v.size()));
    PeriodicField b = st.R;
    b *= -1.0;
    remove_mean(b);
    const double lin_tol =
        std::clamp(0.5 * st.res_sup, 1e-8, 1e-2) * nrm2(b);
    PeriodicField phi = bicgstab(ctx, b, kappa, lin_tol, opt.max_krylov);
    remove_mean(phi);

    double t = 1.0;
    bool accepted = false;
    bool any_valid = false;
    double best_res = std::numeric_limits<double>::infinity();
    State best_state;
    PeriodicField best_w;
    while (t >= std::pow(2.0, -20)) {
      PeriodicField w_t = w;
      par_for(std::int64_t(w_t.v.size()), [&](std::int64_t k) {
        w_t.v[std::size_t(k)] += t * phi.v[std::size_t(k)];
      });
      try {
        State st_t = make_state(w_t, epsilon);
        any_valid = true;
        if (st_t.res_sup <= (1.0 - 1e-4 * t) * st.res_sup) {
          w = std::move(w_t);
          st = std::move(st_t);
          accepted = true;
          break;
        }
        if (st_t.res_sup < best_res) {
          best_res = st_t.res_sup;
          best_state = std::move(st_t);
          best_w = std::move(w_t);
        }
      } catch (const DiscriminantNegative&) {
        // trial left the solvable region; shorten the step
      }
      t *= 0.5;
    }
    if (accepted) {
      increase_count = 0;
    } else if (any_valid) {
      const double prev = st.res_sup;
      w = std::move(best_w);
      st = std::move(best_state);
      if (st.res_sup >= prev) {
        if (++increase_count >= 5) {
          std::string h;
          for (double r : history) h += std::to_string(r) + " ";
          throw NewtonDiverged(
              "residual increased for 5 consecutive damped steps; history: " +
              h);
        }
      } else {
        increase_count = 0;
      }
    } else {
      throw DiscriminantNegative(
          "every damped step left the solvable region at eps=" +
          std::to_string(epsilon));
    }
    history.push_back(st.res_sup);
  }
  if (st.res_sup > opt.tol_sup && st.res_sup > 1e-9) {
    std::string h;
    for (double r : history) h += std::to_string(r) + " ";
    throw NewtonDiverged("Newton did not reach tolerance; history: " + h);
  }

  SolveResult out;
  out.w = w;
  out.c_minus = st.c_minus;
  out.v = w.map([&](double x) { return x + st.c_minus; });
  out.epsilon = epsilon;
  out.newton_iters = iter;
  out.final_residual = st.res_sup;
  diagnose(out, opt);
  return out;
}

void VortexSolver::diagnose(SolveResult& r, const SolveOptions& opt) const {
  const int Mf = std::max(1, opt.fine_factor) * M_;
  const PeriodicField w_f = (Mf == M_) ? r.w : r.w.upsample(Mf);
  const PeriodicField u0_f = (Mf == M_) ? u0_ : build_u0(*green_, cfg_, Mf);
  const std::int64_t n = std::int64_t(Mf) * Mf;
  const double cell = cfg_.torus.area() / double(n);
  const double q = 4.0 * kPi * N_ * r.epsilon * r.epsilon;

  const double flux = cell * det_sum(n, [&](std::int64_t k) {
                        const double eu = std::exp(
                            u0_f.v[std::size_t(k)] + w_f.v[std::size_t(k)] +
                            r.c_minus);
                        return eu * (1.0 - eu);
                      });
  r.flux_error = std::abs(flux - q) / q;
  r.total_flux = flux / (2.0 * r.epsilon * r.epsilon);

  const double rball =
      opt.mass_radius_factor *
      std::max(std::abs(cfg_.torus.w1), std::abs(cfg_.torus.w2));
  r.concentration_masses.assign(cfg_.xi.size(), 0.0);
  for (std::size_t l = 0; l < cfg_.xi.size(); ++l) {
    const cx xi = cfg_.xi[l];
    r.concentration_masses[l] =
        cell / (r.epsilon * r.epsilon) *
        det_sum(n, [&](std::int64_t k) {
          const int i = int(k) % Mf, j = int(k) / Mf;
          if (cfg_.torus.dist(w_f.z_at(i, j), xi) > rball) return 0.0;
          const double eu = std::exp(u0_f.v[std::size_t(k)] +
                                     w_f.v[std::size_t(k)] + r.c_minus);
          return eu * (1.0 - eu);
        });
  }

  r.phi_max = 0.0;
  for (int j = 0; j < Mf; ++j)
    for (int i = 0; i < Mf; ++i) {
      const double val = std::exp(
          0.5 * (u0_f.at(i, j) + w_f.at(i, j) + r.c_minus));
      if (val > r.phi_max) {
        r.phi_max = val;
        r.phi_argmax = w_f.z_at(i, j);
      }
    }
}

std::string VortexSolver::radial_mass_csv(const SolveResult& r, std::size_t l,
                                          double rmax, int nrings) const {
  const cx xi = cfg_.xi.at(l);
  const std::int64_t n = std::int64_t(M_) * M_;
  const double cell = cfg_.torus.area() / double(n);
  std::vector<double> band(std::size_t(nrings), 0.0);
  for (std::int64_t k = 0; k < n; ++k) {
    const int i = int(k) % M_, j = int(k) / M_;
    const double d = cfg_.torus.dist(r.w.z_at(i, j), xi);
    if (d >= rmax) continue;
    const int ring = std::min(nrings - 1, int(d / rmax * nrings));
    const double eu =
        std::exp(u0_.v[std::size_t(k)] + r.w.v[std::size_t(k)] + r.c_minus);
    band[std::size_t(ring)] += cell / (r.epsilon * r.epsilon) * eu * (1.0 - eu);
  }
  std::string out = "radius,mass_within\n";
  char buf[64];
  double acc = 0.0;
  for (int k = 0; k < nrings; ++k) {
    acc += band[std::size_t(k)];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n",
                  rmax * (k + 1) / double(nrings), acc);
    out += buf;
  }
  return out;
}

PeriodicField ansatz_W(const Sigma0Data& s, double delta,
                       const std::vector<cx>& a, double eta) {
  const std::size_t m = s.h.cfg.xi.size();
  if (a.size() != m)
    throw ConfigInvalid("one profile center per concentration point required");
  if (m == 1) {
    PeriodicField S(s.torus(), s.M);
    const double d2 = delta * delta;
    par_for(std::int64_t(S.v.size()), [&](std::int64_t k) {
      const double r2 = std::norm(s.sigma0.v[std::size_t(k)] - a[0]);
      const double den = d2 + r2;
      S.v[std::size_t(k)] =
          std::norm(s.sigma0p.v[std::size_t(k)]) * 8.0 * d2 / (den * den);
    });
    return project_PU(S);
  }
  if (eta <= 0.0) {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        dmin = std::min(dmin, s.torus().dist(s.h.cfg.xi[i], s.h.cfg.xi[j]));
    eta = 0.45 * dmin;
  }
  PeriodicField W(s.torus(), s.M);
  for (std::size_t l = 0; l < m; ++l)
    W += project_PU(profile_source(s, delta, a[l], l, eta));
  return W;
}

double delta_of_epsilon(const Sigma0Data& s, double epsilon, double mu) {
  const int n = s.h.cfg.n_of_xi(0);
  const double Habs = (n + 1.0) * std::abs(s.h.alpha0[0]);
  return std::pow((n + 1.0) * std::pow(epsilon, n + 1.0) / Habs,
                  1.0 / (n + 2.0)) *
         mu;
}

std::vector<SolveResult> continuation(const Sigma0Data& s, double mu, cx zeta,
                                      const ContinuationOptions& opt) {
  VortexSolver solver(s.h.green, s.h.cfg, s.M);
  const double eps_hi = opt.scan_start * solver.epsilon_max();
  const std::size_t m = s.h.cfg.xi.size();

  // Scan: largest eps whose ansatz has a safely positive discriminant and a
  // sup-residual within a factor 2 of the best seen.
  struct Candidate {
    double eps, res;
    PeriodicField W;
  };
  std::vector<Candidate> cands;
  double res_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opt.scan_size; ++k) {
    const double eps = eps_hi * std::pow(opt.ratio, k);
    if (eps <= opt.eps_min && opt.eps_min > 0.0) break;
    const double delta = delta_of_epsilon(s, eps, mu);
    PeriodicField W = ansatz_W(s, delta, std::vector<cx>(m, zeta * delta));
    // discriminant safety: 16 pi N eps^2 S2 <= 0.8 S1^2
    const PeriodicField& u0 = solver.u0();
    double S1 = 0.0, S2 = 0.0;
    {
      const std::int64_t nn = std::int64_t(W.M) * W.M;
      const double cell = W.torus.area() / double(nn);
      S1 = cell * det_sum(nn, [&](std::int64_t q) {
             return std::exp(u0.v[std::size_t(q)] + W.v[std::size_t(q)]);
           });
      S2 = cell * det_sum(nn, [&](std::int64_t q) {
             return std::exp(2.0 * (u0.v[std::size_t(q)] + W.v[std::size_t(q)]));
           });
    }
    const double safety =
        16.0 * kPi * solver.N() * eps * eps * S2 / (S1 * S1);
    if (safety > 0.8) continue;
    double res;
    try {
      res = sup_norm(solver.residual(W, eps));
    } catch (const DiscriminantNegative&) {
      continue;
    }
    res_min = std::min(res_min, res);
    cands.push_back({eps, res, std::move(W)});
  }
  if (cands.empty())
    throw DiscriminantNegative(
        "no scan candidate has a safely positive discriminant");
  std::size_t pick = 0;
  for (std::size_t k = 0; k < cands.size(); ++k)
    if (cands[k].res <= 2.0 * res_min) {
      pick = k;  // candidates are ordered by decreasing eps
      break;
    }

  std::vector<SolveResult> states;
  double eps = cands[pick].eps;
  PeriodicField w_start = std::move(cands[pick].W);
  while (int(states.size()) < opt.max_states &&
         (opt.eps_min <= 0.0 || eps > opt.eps_min)) {
    try {
      SolveResult r = solver.solve(w_start, eps, opt.solve);
      w_start = r.w;
      states.push_back(std::move(r));
    } catch (const NewtonDiverged&) {
      if (states.empty()) throw;
      break;
    } catch (const DiscriminantNegative&) {
      if (states.empty()) throw;
      break;
    }
    eps *= opt.ratio;
  }
  return states;
}

}  // namespace cshv
