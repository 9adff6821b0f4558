#include "cshv/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <cstdio>
#include <mutex>

namespace cshv {

namespace {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1] (QUADPACK nodes).
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GK15Result {
  cx value;
  double err;
};

GK15Result gk15_err(const std::function<cx(cx)>& f, cx a, cx b) {
  const cx mid = 0.5 * (a + b), half = 0.5 * (b - a);
  cx resg = 0.0, resk = 0.0;
  for (int j = 0; j < 7; ++j) {
    const cx fv1 = f(mid - half * xgk[j]);
    const cx fv2 = f(mid + half * xgk[j]);
    resk += wgk[j] * (fv1 + fv2);
    if (j % 2 == 1) resg += wg[j / 2] * (fv1 + fv2);
  }
  const cx fc = f(mid);
  resk += wgk[7] * fc;
  resg += wg[3] * fc;
  resk *= half;
  resg *= half;
  return {resk, std::abs(resk - resg)};
}

cx adaptive(const std::function<cx(cx)>& f, cx a, cx b, double tol, int depth) {
  const GK15Result r = gk15_err(f, a, b);
  if (r.err <= tol || std::abs(b - a) < 1e-300) return r.value;
  if (depth <= 0) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "segment quadrature: error %.3e above tolerance %.3e after "
                  "max subdivisions near (%.12g, %.12g)",
                  r.err, tol, a.real(), a.imag());
    throw ToleranceNotMet(msg);
  }
  const cx mid = 0.5 * (a + b);
  return adaptive(f, a, mid, 0.5 * tol, depth - 1) +
         adaptive(f, mid, b, 0.5 * tol, depth - 1);
}

double point_segment_dist(cx p, cx a, cx b) {
  const cx d = b - a;
  const double L2 = std::norm(d);
  if (L2 == 0.0) return std::abs(p - a);
  double t = ((p - a) * std::conj(d)).real() / L2;
  t = std::min(1.0, std::max(0.0, t));
  return std::abs(p - (a + t * d));
}

std::mutex& gsl_mutex() {
  static std::mutex m;
  static bool init = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)init;
  return m;
}

double gsl_trampoline(double x, void* p) {
  return (*static_cast<const std::function<double(double)>*>(p))(x);
}

}  // namespace

cx gk15(const std::function<cx(cx)>& f, cx a, cx b) {
  return gk15_err(f, a, b).value;
}

std::array<double, 15> gk15_full_nodes() {
  std::array<double, 15> x{};
  for (int j = 0; j < 7; ++j) {
    x[std::size_t(j)] = -xgk[j];
    x[std::size_t(14 - j)] = xgk[j];
  }
  x[7] = 0.0;
  return x;
}

std::array<double, 15> gk15_full_weights() {
  std::array<double, 15> w{};
  for (int j = 0; j < 7; ++j) {
    w[std::size_t(j)] = wgk[j];
    w[std::size_t(14 - j)] = wgk[j];
  }
  w[7] = wgk[7];
  return w;
}

cx integrate_segment(const std::function<cx(cx)>& f, cx a, cx b, double tol,
                     int max_depth) {
  return adaptive(f, a, b, tol, max_depth);
}

cx contour_integral(const std::function<cx(cx)>& f, const std::vector<cx>& pts,
                    double tol, const std::vector<cx>& poles, double clearance) {
  if (pts.size() < 2) throw ConfigInvalid("contour needs at least two points");
  for (std::size_t s = 0; s + 1 < pts.size(); ++s)
    for (cx p : poles)
      if (point_segment_dist(p, pts[s], pts[s + 1]) < clearance)
        throw PoleOnPath("listed pole within clearance of contour path");
  cx acc = 0.0;
  const double seg_tol = tol / double(pts.size() - 1);
  for (std::size_t s = 0; s + 1 < pts.size(); ++s)
    acc += integrate_segment(f, pts[s], pts[s + 1], seg_tol);
  return acc;
}

double qags(const std::function<double(double)>& f, double a, double b,
            double tol) {
  std::lock_guard<std::mutex> lock(gsl_mutex());
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4000);
  gsl_function F{&gsl_trampoline, const_cast<std::function<double(double)>*>(&f)};
  double result = 0.0, abserr = 0.0;
  const int status =
      gsl_integration_qags(&F, a, b, tol, tol, 4000, ws, &result, &abserr);
  gsl_integration_workspace_free(ws);
  if (status != GSL_SUCCESS && std::abs(abserr) > tol * (1.0 + std::abs(result)))
    throw ToleranceNotMet("qags failed: " + std::string(gsl_strerror(status)));
  return result;
}

double qagiu(const std::function<double(double)>& f, double a, double tol) {
  std::lock_guard<std::mutex> lock(gsl_mutex());
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4000);
  gsl_function F{&gsl_trampoline, const_cast<std::function<double(double)>*>(&f)};
  double result = 0.0, abserr = 0.0;
  const int status =
      gsl_integration_qagiu(&F, a, tol, tol, 4000, ws, &result, &abserr);
  gsl_integration_workspace_free(ws);
  if (status != GSL_SUCCESS && std::abs(abserr) > tol * (1.0 + std::abs(result)))
    throw ToleranceNotMet("qagiu failed: " + std::string(gsl_strerror(status)));
  return result;
}

double smoothstep_cinf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ga = std::exp(-1.0 / x);
  const double gb = std::exp(-1.0 / (1.0 - x));
  return ga / (ga + gb);
}

double smoothstep_quintic(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double radial_bump(double r, double R) {
  return 1.0 - smoothstep_cinf((r - 0.5 * R) / (0.5 * R));
}

double integrate_patched(const std::function<double(cx)>& f, const Torus& T,
                         int M, const std::vector<SingularPatch>& patches,
                         int n_theta, double radial_tol) {
  for (std::size_t a = 0; a < patches.size(); ++a)
    for (std::size_t b = a + 1; b < patches.size(); ++b)
      if (T.dist(patches[a].center, patches[b].center) <
          patches[a].R + patches[b].R)
        throw ConfigInvalid("singular patches overlap");

  // Far field: periodic trapezoid of f * (1 - sum of bumps).
  auto bump_sum = [&](cx z) {
    double s = 0.0;
    for (const auto& p : patches) {
      const double d = T.dist(z, p.center);
      if (d < p.R) s += radial_bump(d, p.R);
    }
    return s;
  };
  const std::int64_t n = std::int64_t(M) * M;
  const double far_sum = det_sum(n, [&](std::int64_t k) {
    const int i = int(k % M), j = int(k / M);
    const cx z = T.from_lattice((i - M / 2) / double(M), (j - M / 2) / double(M));
    const double w = 1.0 - bump_sum(z);
    return w == 0.0 ? 0.0 : w * f(z);
  });
  double total = far_sum * T.area() / double(n);

  // Near field: polar quadrature of f * bump around each center.
  for (const auto& p : patches) {
    const double dtheta = 2.0 * kPi / n_theta;
    const double ring = det_sum(n_theta, [&](std::int64_t it) {
      const double th = it * dtheta;
      const cx dir = std::exp(cx(0, th));
      const cx val = integrate_segment(
          [&](cx rr) {
            const double r = rr.real();
            if (r <= 0.0) return cx(0.0);
            return cx(f(p.center + r * dir) * radial_bump(r, p.R) * r, 0.0);
          },
          cx(0.0), cx(p.R), radial_tol);
      return val.real();
    });
    total += ring * dtheta;
  }
  return total;
}

}  // namespace cshv
