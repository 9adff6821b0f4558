#include <algorithm>
#include <cmath>
#include <limits>

#include "cshv/ansatz.hpp"
#include "cshv/quadrature.hpp"

namespace cshv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Marching integral of f along [a,b] with tolerance tied to the first pass.
cx march_segment(const std::function<cx(cx)>& f, cx a, cx b) {
  const cx first = gk15(f, a, b);
  const double tol = 1e-12 * (1.0 + std::abs(first));
  return integrate_segment(f, a, b, tol, 48);
}

// Polyline from a to b that stays clear of the given disks (except near the
// endpoints, where short approaches are allowed).
void route_split(cx a, cx b, const std::vector<cx>& ctr,
                 const std::vector<double>& rad, int depth,
                 std::vector<cx>& out) {
  if (depth > 10) throw CurveTraceFailed("path construction did not settle");
  int worst = -1;
  double pen = 0.0;
  for (std::size_t l = 0; l < ctr.size(); ++l) {
    if (std::abs(a - ctr[l]) < rad[l] || std::abs(b - ctr[l]) < rad[l])
      continue;  // endpoint approach: leave to the integrator
    // distance from ctr[l] to segment [a,b]
    const cx d = b - a;
    const double L2 = std::norm(d);
    double t = L2 > 0 ? std::clamp(((ctr[l] - a) / d).real(), 0.0, 1.0) : 0.0;
    const cx proj = a + t * d;
    const double dist = std::abs(proj - ctr[l]);
    if (rad[l] - dist > pen) {
      pen = rad[l] - dist;
      worst = int(l);
    }
  }
  if (worst < 0) {
    out.push_back(b);
    return;
  }
  const cx c = ctr[std::size_t(worst)];
  const double R = rad[std::size_t(worst)];
  const cx d = b - a;
  double t = std::clamp(((c - a) / d).real(), 0.0, 1.0);
  cx away = a + t * d - c;
  if (std::abs(away) < 1e-14 * R) away = d * cx(0.0, 1.0);  // perpendicular
  const cx w = c + away / std::abs(away) * (1.6 * R);
  route_split(a, w, ctr, rad, depth + 1, out);
  route_split(w, b, ctr, rad, depth + 1, out);
}

std::vector<cx> route_avoiding(cx a, cx b, const std::vector<cx>& ctr,
                               const std::vector<double>& rad) {
  std::vector<cx> pts{a};
  route_split(a, b, ctr, rad, 0, pts);
  return pts;
}

cx integrate_polyline(const std::function<cx(cx)>& f,
                      const std::vector<cx>& pts) {
  cx acc = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    acc += march_segment(f, pts[k], pts[k + 1]);
  return acc;
}

}  // namespace

int Sigma0Data::override_of(cx z) const {
  for (std::size_t l = 0; l < h.cfg.xi.size(); ++l)
    if (std::abs(z - h.cfg.xi[l]) < r_override[l]) return int(l);
  return -1;
}

cx Sigma0Data::A_at(cx z) const {
  const int l = override_of(z);
  if (l >= 0) return A_series[std::size_t(l)].eval(z);
  // march from the nearest finite grid node
  const Torus& T = torus();
  auto [t, s] = T.to_lattice(z);
  int i = int(std::lround(t * M)) + M / 2;
  int j = int(std::lround(s * M)) + M / 2;
  i = std::clamp(i, 0, M - 1);
  j = std::clamp(j, 0, M - 1);
  // pick a finite neighbor if the rounded node sits on a pole
  static const int di[5] = {0, 1, -1, 0, 0};
  static const int dj[5] = {0, 0, 0, 1, -1};
  int in = -1, jn = -1;
  for (int r = 0; r < 5; ++r) {
    const int ii = std::clamp(i + di[r], 0, M - 1);
    const int jj = std::clamp(j + dj[r], 0, M - 1);
    if (std::isfinite(std::abs(A.v[std::size_t(jj) * M + ii]))) {
      in = ii;
      jn = jj;
      break;
    }
  }
  if (in < 0)
    throw CurveTraceFailed("no finite anchor node near evaluation point");
  const cx zn = A.z_at(in, jn);
  const cx an = A.v[std::size_t(jn) * M + in];
  auto f = [this](cx w) { return h.Tval(w); };
  return an + march_segment(f, zn, z);
}

cx Sigma0Data::sigma0_at(cx z) const {
  const int l = override_of(z);
  if (l >= 0) return sigma0_series[std::size_t(l)].eval(z);
  return -1.0 / A_at(z);
}

cx Sigma0Data::sigma0p_at(cx z) const {
  const int l = override_of(z);
  if (l >= 0) return sigma0_series[std::size_t(l)].eval_deriv(z, 1);
  const cx s0 = sigma0_at(z);
  return h.Tval(z) * s0 * s0;
}

Sigma0Data build_sigma0(const HData& h, int M) {
  Sigma0Data s;
  s.h = h;
  s.M = M;
  const Torus& T = h.cfg.torus;
  const std::size_t m = h.cfg.xi.size();
  const double hgrid = std::max(std::abs(T.w1), std::abs(T.w2)) / M;

  s.r_override.resize(m);
  for (std::size_t l = 0; l < m; ++l) {
    s.r_override[l] = 0.45 * h.rfit[l];
    if (s.r_override[l] < 3.2 * hgrid)
      throw GridTooSmall("series override disk spans fewer than 3 grid cells; "
                         "increase the grid size");
  }

  // --- local series ------------------------------------------------------
  const int hi_T = 22;
  s.A_series.resize(m);
  s.sigma0_series.resize(m);
  s.q0_series.resize(m);
  s.q0inv_series.resize(m);
  std::vector<LocalSeries> Tser(m);
  for (std::size_t l = 0; l < m; ++l) {
    const int nl = h.cfg.n_of_xi(l);
    auto F = [&](cx z) { return h.Tval(z); };
    Tser[l] = LocalSeries::fit(F, h.cfg.xi[l], h.rfit[l], -(nl + 2), hi_T);
    cx residue;
    s.A_series[l] = Tser[l].antiderivative(1e-7, &residue);
  }

  // Constants of integration: zero regular constant at xi_1; other charts are
  // matched by contour continuation between probe points.
  std::vector<cx> ctr(h.cfg.xi.begin(), h.cfg.xi.end());
  std::vector<double> rad(m);
  for (std::size_t l = 0; l < m; ++l) rad[l] = 0.8 * s.r_override[l];
  auto probe_of = [&](std::size_t l) {
    cx dir = -h.cfg.xi[l];  // towards the cell center
    if (std::abs(dir) < 1e-9 * std::sqrt(T.area())) dir = T.w1;
    dir /= std::abs(dir);
    return h.cfg.xi[l] + 0.5 * s.r_override[l] * dir;
  };
  auto Tf = [&](cx w) { return h.Tval(w); };
  const cx z1 = probe_of(0);
  const cx A1 = s.A_series[0].eval(z1);
  for (std::size_t l = 1; l < m; ++l) {
    const cx zl = probe_of(l);
    const cx Al = A1 + integrate_polyline(Tf, route_avoiding(z1, zl, ctr, rad));
    s.A_series[l].a[std::size_t(-s.A_series[l].lo)] += Al - s.A_series[l].eval(zl);
  }

  // sigma0 = -1/A, the root chart q0 with sigma0 = q0^{n+1}, and its inverse.
  for (std::size_t l = 0; l < m; ++l) {
    const int nl = h.cfg.n_of_xi(l);
    LocalSeries sig = cx(-1.0) * reciprocal(s.A_series[l], hi_T + 1);
    s.sigma0_series[l] = sig;  // lo = n_l + 1
    // unit series S = sigma0 / zeta^{n+1}; q0 = zeta * (S/S0)^{1/(n+1)} * S0^{1/(n+1)}
    LocalSeries S = shift_order(sig, -(nl + 1));
    const cx S0 = S.coeff(0);
    LocalSeries root = root_series((cx(1.0) / S0) * S, nl + 1);
    root = std::pow(S0, 1.0 / (nl + 1.0)) * root;
    LocalSeries q0 = shift_order(root, 1);  // multiply by zeta
    s.q0_series[l] = q0;
    s.q0inv_series[l] = reversion(q0, hi_T + 1);
  }

  // --- grid fill ----------------------------------------------------------
  s.A = ComplexGrid(T, M);
  s.sigma0 = ComplexGrid(T, M);
  s.sigma0p = ComplexGrid(T, M);
  std::vector<char> state(std::size_t(M) * M, 0);  // 0 open, 1 finite, 2 pole

  auto node = [&](int i, int j) { return s.A.z_at(i, j); };
  auto idx = [&](int i, int j) { return std::size_t(j) * M + i; };

  // phase 1: series override disks
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < M; ++i) {
      const cx z = node(i, j);
      const int l = s.override_of(z);
      if (l < 0) continue;
      const double d = std::abs(z - h.cfg.xi[std::size_t(l)]);
      if (d < 0.25 * hgrid) {
        s.A.v[idx(i, j)] = cx(kInf, 0.0);
        s.sigma0.v[idx(i, j)] = 0.0;
        s.sigma0p.v[idx(i, j)] =
            s.sigma0_series[std::size_t(l)].eval_deriv(z, 1);
        state[idx(i, j)] = 2;
      } else {
        s.A.v[idx(i, j)] = s.A_series[std::size_t(l)].eval(z);
        s.sigma0.v[idx(i, j)] = s.sigma0_series[std::size_t(l)].eval(z);
        s.sigma0p.v[idx(i, j)] =
            s.sigma0_series[std::size_t(l)].eval_deriv(z, 1);
        state[idx(i, j)] = 1;
      }
    }

  // phase 2: seed the anchor node (farthest from all xi), then its column
  int i0 = 0, j0 = 0;
  double best = -1.0;
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < M; ++i) {
      double dmin = kInf;
      for (std::size_t l = 0; l < m; ++l)
        dmin = std::min(dmin, std::abs(node(i, j) - h.cfg.xi[l]));
      if (dmin > best) {
        best = dmin;
        i0 = i;
        j0 = j;
      }
    }
  {
    const cx zn = node(i0, j0);
    s.A.v[idx(i0, j0)] =
        A1 + integrate_polyline(Tf, route_avoiding(z1, zn, ctr, rad));
    state[idx(i0, j0)] = 1;
  }
  auto march_to = [&](cx& run, cx& pos, int i, int j) {
    const std::size_t q = idx(i, j);
    if (state[q] == 1) {
      run = s.A.v[q];
      pos = node(i, j);
      return;
    }
    if (state[q] == 2) return;  // keep the previous anchor
    run += march_segment(Tf, pos, node(i, j));
    pos = node(i, j);
    s.A.v[q] = run;
    state[q] = 1;
  };
  {
    cx run = s.A.v[idx(i0, j0)], pos = node(i0, j0);
    for (int j = j0 + 1; j < M; ++j) march_to(run, pos, i0, j);
    run = s.A.v[idx(i0, j0)];
    pos = node(i0, j0);
    for (int j = j0 - 1; j >= 0; --j) march_to(run, pos, i0, j);
  }

  // phase 3: rows, in parallel, each marching away from the anchor column
  par_for(std::size_t(M), [&](std::size_t jq) {
    const int j = int(jq);
    // starting point: nearest finite node to the anchor column in this row
    int is = -1;
    for (int r = 0; r < M; ++r) {
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        const int i = i0 + sgn * r;
        if (i < 0 || i >= M) continue;
        if (state[idx(i, j)] == 1) {
          is = i;
          break;
        }
      }
      if (is >= 0) break;
    }
    if (is < 0) return;  // cannot happen: anchor column is filled
    cx run = s.A.v[idx(is, j)], pos = node(is, j);
    for (int i = is + 1; i < M; ++i) march_to(run, pos, i, j);
    run = s.A.v[idx(is, j)];
    pos = node(is, j);
    for (int i = is - 1; i >= 0; --i) march_to(run, pos, i, j);
  });

  // sigma0 and its derivative on the marched (non-disk) nodes
  par_for(std::size_t(M) * M, [&](std::size_t q) {
    const cx z = s.A.z_at(int(q) % M, int(q) / M);
    if (s.override_of(z) >= 0) return;  // set from the series in phase 1
    const cx s0 = -1.0 / s.A.v[q];
    s.sigma0.v[q] = s0;
    s.sigma0p.v[q] = h.Tval(z) * s0 * s0;
  });

  return s;
}

}  // namespace cshv
