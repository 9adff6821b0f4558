#include "cshv/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cshv/quadrature.hpp"

namespace cshv {

double beta_integral(double p, double q) {
  if (!(p + 1.0 > 0.0) || !(q > p + 1.0))
    throw Divergent("beta_integral requires q > p+1 > 0, got p=" +
                    std::to_string(p) + " q=" + std::to_string(q));
  return std::exp(std::lgamma(p + 1.0) + std::lgamma(q - p - 1.0) -
                  std::lgamma(q));
}

namespace {

double pow5(double x) { return x * x * x * x * x; }
double pow4(double x) {
  const double x2 = x * x;
  return x2 * x2;
}

// Radial panel boundaries for the polar integrals centered at -zeta. The
// integrand carries the r^{2p} endpoint factor at r = 0 and its mass sits in
// a band of O(1) width around r = |zeta| (where y passes near the origin).
// Beyond d + 2048 the integrand is below ~1e-13 of the total (algebraic
// decay r^{2p-7} or faster), so the radial range is cut there.
std::vector<double> radial_breaks(double d) {
  std::vector<double> b{0.0, 0.25, 1.0, 4.0, 16.0};
  for (double x : {d - 16.0, d - 4.0, d - 1.0, d, d + 1.0, d + 4.0, d + 16.0})
    if (x > 0.0) b.push_back(x);
  b.push_back(d + 128.0);
  b.push_back(d + 2048.0);
  std::sort(b.begin(), b.end());
  std::vector<double> out;
  for (double x : b)
    if (out.empty() || x > out.back() + 1e-9) out.push_back(x);
  return out;
}

double radial_sum(const std::function<double(double)>& w,
                  const std::vector<double>& bp) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i)
    acc += qags(w, bp[i], bp[i + 1], 3e-13);
  return acc;
}

// One fixed-rule pass over |w|: an estimate of the radial integrand's
// magnitude, used to set the noise floor of the nested quadrature. Only the
// order of magnitude matters.
double radial_mag(const std::function<double(double)>& w,
                  const std::vector<double>& bp) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i)
    m += std::abs(gk15([&](cx r) { return cx(std::abs(w(r.real())), 0.0); },
                       cx(bp[i], 0.0), cx(bp[i + 1], 0.0))
                      .real());
  return m;
}

// Integral of F over one period of theta. The integrand is analytic but
// develops a peak of angular width ~1/|zeta| at theta0 = arg(zeta), so the
// period is pre-split around the peak before the adaptive rule runs; the
// absolute tolerance is scaled by a coarse one-pass estimate. Each F
// evaluation is itself a nested radial quadrature and carries absolute noise
// of order `noise` (relative tolerance times the magnitude of the radial
// integrand); the angular tolerance must sit well above this floor, or the
// bisection chases noise and never terminates.
cx angular_integral(const std::function<cx(double)>& F, double theta0,
                    double d, double noise) {
  const double w = std::min(0.3, 8.0 / std::max(d, 1.0));
  const std::array<double, 6> cuts = {theta0 - kPi,  theta0 - 0.5,
                                      theta0 - w,    theta0 + w,
                                      theta0 + 0.5,  theta0 + kPi};
  auto along = [&](cx t) { return F(t.real()); };
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    scale += std::abs(gk15(along, cuts[i], cuts[i + 1]));
  const double tol = std::max(
      1e-10 * (1.0 + scale) / double(cuts.size() - 1), 16.0 * noise);
  cx acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += integrate_segment(along, cuts[i], cuts[i + 1], tol);
  return acc;
}

// |y|^2 for y = -zeta + r e^{i theta}, written to avoid the cancellation of
// r^2 - 2 r a + d^2 when r ~ a ~ d: (r-a)^2 + (d-a)(d+a).
double y_norm2(double r, double a, double d) {
  return (r - a) * (r - a) + (d - a) * (d + a);
}

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1e-12, std::abs(a), std::abs(b)});
}

}  // namespace

ReducedCoeffs::ReducedCoeffs(int n) : n_(n) {
  if (n < 0) throw ConfigInvalid("multiplicity n must be >= 0");
  p_ = double(n) / double(n + 1);
  I0_ = -2.0 * kPi / (2.0 * n + 3.0) * beta_integral(p_, 5.0);
}

double ReducedCoeffs::f_oracle_at(cx zeta) const {
  const double d = std::abs(zeta);
  const double th0 = (d > 0.0) ? std::atan2(zeta.imag(), zeta.real()) : 0.0;
  const auto bp = radial_breaks(d);
  const double p = p_;
  auto F = [&](double th) -> cx {
    const double a = std::cos(th) * zeta.real() + std::sin(th) * zeta.imag();
    auto w = [&](double r) {
      const double y2 = y_norm2(r, a, d);
      return std::pow(r, 2.0 * p + 1.0) * (y2 - 1.0) / pow5(1.0 + y2);
    };
    return cx(radial_sum(w, bp), 0.0);
  };
  auto wabs = [&](double r) {
    const double y2 = y_norm2(r, d, d);
    return std::pow(r, 2.0 * p + 1.0) * std::abs(y2 - 1.0) / pow5(1.0 + y2);
  };
  const double noise =
      3e-13 * (double(bp.size()) + radial_mag(wabs, bp));
  return angular_integral(F, th0, d, noise).real();
}

cx ReducedCoeffs::K_oracle(cx zeta) const {
  const double d = std::abs(zeta);
  const double th0 = (d > 0.0) ? std::atan2(zeta.imag(), zeta.real()) : 0.0;
  const auto bp = radial_breaks(d);
  const double p = p_;
  // The kernel r^{2p} y (1+|y|^2)^{-5} (with y = r e^{i theta} - zeta) keeps
  // only the factor r^{2p} - |zeta|^{2p}: the dropped constant moment
  // |zeta|^{2p} integral of y (1+|y|^2)^{-5} vanishes exactly (odd in y over
  // the plane). Without the subtraction the quadrature at large |zeta|
  // resolves a value ~|zeta|^{2p-1} out of contributions ~|zeta|^{2p+1}.
  const double d2p = std::pow(d, 2.0 * p);
  auto F = [&](double th) -> cx {
    const double a = std::cos(th) * zeta.real() + std::sin(th) * zeta.imag();
    const cx dir = std::polar(1.0, th);
    auto wre = [&](double r) {
      const double y2 = y_norm2(r, a, d);
      return (std::pow(r, 2.0 * p) - d2p) * r *
             (r * dir.real() - zeta.real()) / pow5(1.0 + y2);
    };
    auto wim = [&](double r) {
      const double y2 = y_norm2(r, a, d);
      return (std::pow(r, 2.0 * p) - d2p) * r *
             (r * dir.imag() - zeta.imag()) / pow5(1.0 + y2);
    };
    return cx(radial_sum(wre, bp), radial_sum(wim, bp));
  };
  auto wabs = [&](double r) {
    const double y2 = y_norm2(r, d, d);
    return std::abs(std::pow(r, 2.0 * p) - d2p) * r * std::sqrt(y2) /
           pow5(1.0 + y2);
  };
  const double noise =
      3e-13 * (double(bp.size()) + 2.0 * radial_mag(wabs, bp));
  return angular_integral(F, th0, d, noise);
}

double ReducedCoeffs::J1_oracle(double s) const {
  const auto bp = radial_breaks(s);
  const double p = p_;
  auto F = [&](double th) -> cx {
    const double a = std::cos(th) * s;
    auto w = [&](double r) {
      return std::pow(r, 2.0 * p + 1.0) / pow4(1.0 + y_norm2(r, a, s));
    };
    return cx(radial_sum(w, bp), 0.0);
  };
  auto wabs = [&](double r) {
    return std::pow(r, 2.0 * p + 1.0) / pow4(1.0 + y_norm2(r, s, s));
  };
  const double noise =
      3e-13 * (double(bp.size()) + radial_mag(wabs, bp));
  return angular_integral(F, 0.0, s, noise).real();
}

double ReducedCoeffs::J2_oracle(double s) const {
  const auto bp = radial_breaks(s);
  const double p = p_;
  auto F = [&](double th) -> cx {
    const double a = std::cos(th) * s;
    auto w = [&](double r) {
      return std::pow(r, 2.0 * p + 1.0) / pow5(1.0 + y_norm2(r, a, s));
    };
    return cx(radial_sum(w, bp), 0.0);
  };
  auto wabs = [&](double r) {
    return std::pow(r, 2.0 * p + 1.0) / pow5(1.0 + y_norm2(r, s, s));
  };
  const double noise =
      3e-13 * (double(bp.size()) + radial_mag(wabs, bp));
  return angular_integral(F, 0.0, s, noise).real();
}

double ReducedCoeffs::f_series(double s) const {
  const double p = p_;
  const double lam = 1.0 + s * s;
  const double q = (lam - 1.0) / lam;  // term-ratio decay factor
  // beta_1 = c_1 C(2,1) pi lam^{p-4} I^{p+1}_6 with c_1 = 5!/24 = 5.
  double beta = 10.0 * kPi * std::pow(lam, p - 4.0) * beta_integral(p + 1.0, 6.0);
  double sum = 0.0;
  int small_in_a_row = 0;
  for (int k = 1; k <= 60000; ++k) {
    const double bracket =
        (double(k) / (k + p)) * ((1.0 + k) * lam / (2.0 + k - p) - 1.0) -
        (lam - 1.0);
    const double term = bracket * beta;
    sum += term;
    if (std::abs(term) <= 1e-12 * (std::abs(sum) + 1e-300)) {
      if (++small_in_a_row >= 3 && k >= 8) return sum;
    } else {
      small_in_a_row = 0;
    }
    beta *= (p + k + 1.0) * (k + 3.0 - p) / (double(k) * (k + 1.0)) * q;
  }
  throw SeriesDiverged("moment series for f did not settle at |zeta|=" +
                       std::to_string(s));
}

double ReducedCoeffs::g_series(double s) const {
  const double p = p_;
  if (p == 0.0) return 0.0;  // every term carries the factor p
  const double lam = 1.0 + s * s;
  const double q = (lam - 1.0) / lam;
  // term_0 = p c_0 C(0,0) pi lam^{p-4} I^p_5 with c_0 = 1.
  double term = p * kPi * std::pow(lam, p - 4.0) * beta_integral(p, 5.0);
  double sum = 0.0;
  int small_in_a_row = 0;
  for (int k = 0; k <= 60000; ++k) {
    sum += term;
    if (std::abs(term) <= 1e-12 * (std::abs(sum) + 1e-300)) {
      if (++small_in_a_row >= 3 && k >= 8) return sum;
    } else {
      small_in_a_row = 0;
    }
    term *= (p + k + 1.0) * (k + 4.0 - p) / ((k + 2.0) * (k + 1.0)) * q;
  }
  throw SeriesDiverged("moment series for g did not settle at |zeta|=" +
                       std::to_string(s));
}

namespace {

// One-dimensional representations. The shared denominator
// (lam+rho)^2 - 4(lam-1)rho = (rho-(lam-2))^2 + 4(lam-1) is positive for all
// rho >= 0, lam >= 1. Each integral is split around the peak at rho ~ lam
// before handing the unbounded remainder to the infinite-range rule.
double oned_integral(const std::function<double(double)>& w, double lam) {
  if (lam > 4.0)
    return qags(w, 0.0, lam, 1e-11) + qags(w, lam, 4.0 * lam, 1e-11) +
           qagiu(w, 4.0 * lam, 1e-11);
  return qagiu(w, 0.0, 1e-11);
}

}  // namespace

double ReducedCoeffs::J1_oned(double s) const {
  const double p = p_, lam = 1.0 + s * s;
  auto w = [=](double r) {
    const double A = lam + r, B = (lam - 1.0) * r;
    const double D = A * A - 4.0 * B;
    return std::pow(r, p) * A * (A * A + 6.0 * B) / (D * D * D * std::sqrt(D));
  };
  return kPi * oned_integral(w, lam);
}

double ReducedCoeffs::J2_oned(double s) const {
  const double p = p_, lam = 1.0 + s * s;
  auto w = [=](double r) {
    const double A = lam + r, B = (lam - 1.0) * r;
    const double D = A * A - 4.0 * B;
    return std::pow(r, p) * (pow4(A) + 12.0 * B * A * A + 42.0 * B * B) /
           (pow4(D) * std::sqrt(D));
  };
  return kPi * oned_integral(w, lam);
}

double ReducedCoeffs::f_oned(double s) const {
  const double p = p_, lam = 1.0 + s * s;
  auto w = [=](double r) {
    const double A = lam + r, B = (lam - 1.0) * r;
    const double D = A * A - 4.0 * B;
    const double num = pow5(A) - 2.0 * pow4(A) + 2.0 * B * A * A * A -
                       24.0 * lam * (lam - 1.0) * r * (r + 1.0) * A -
                       84.0 * B * B;
    return std::pow(r, p) * num / (pow4(D) * std::sqrt(D));
  };
  return kPi * oned_integral(w, lam);
}

double ReducedCoeffs::g_oned(double s) const {
  const double p = p_, lam = 1.0 + s * s;
  auto w = [=](double r) {
    const double A = lam + r;
    const double D = A * A - 4.0 * (lam - 1.0) * r;
    const double num = pow4(A) + 2.0 * r * (lam - 6.0 - 5.0 * r) * A * A +
                       6.0 * (lam - 1.0) * r * r * (2.0 * lam - 7.0 - 5.0 * r);
    return std::pow(r, p) * num / (pow4(D) * std::sqrt(D));
  };
  return -0.5 * kPi * oned_integral(w, lam);
}

double ReducedCoeffs::f(double s, EvalMethod m) const {
  if (s < 0.0) throw ConfigInvalid("|zeta| must be >= 0");
  switch (m) {
    case EvalMethod::oracle:
      return f_oracle_at(cx(s, 0.0));
    case EvalMethod::series:
      return f_series(s);
    case EvalMethod::oned:
      return f_oned(s);
  }
  throw ConfigInvalid("unknown evaluation method");
}

double ReducedCoeffs::g(double s, EvalMethod m) const {
  if (s < 0.0) throw ConfigInvalid("|zeta| must be >= 0");
  switch (m) {
    case EvalMethod::oracle: {
      if (s == 0.0) {
        // K(0) = 0 by oddness; the ratio K/zeta at 0 is recovered by
        // Richardson extrapolation in the radius (g is even in |zeta|).
        const double h = 1e-2;
        const double g1 = K_oracle(cx(h, 0.0)).real() / h;
        const double g2 = K_oracle(cx(2.0 * h, 0.0)).real() / (2.0 * h);
        return (4.0 * g1 - g2) / 3.0;
      }
      return (K_oracle(cx(s, 0.0)) / cx(s, 0.0)).real();
    }
    case EvalMethod::series:
      return g_series(s);
    case EvalMethod::oned:
      return g_oned(s);
  }
  throw ConfigInvalid("unknown evaluation method");
}

void ReducedCoeffs::audit_discrepancies() {
  if (audited_) return;
  audited_ = true;
  const double I5 = beta_integral(p_, 5.0);

  // Printed closed form for g(0); the moment series and the 2-D quadrature
  // both give p pi I^p_5 instead (and 0 at n = 0).
  {
    const double printed = (3.0 * n_ + 1.0) / (2.0 * (n_ + 1.0)) * kPi * I5;
    const double computed = g(0.0, EvalMethod::oracle);
    if (rel_diff(printed, computed) > 1e-4)
      log_.push_back({"g(0) closed form", printed, computed,
                      "series and 2-D quadrature give n/(n+1) pi I5"});
  }

  const double S = 1e3;
  const double s2p = std::pow(S, 2.0 * p_);

  // Printed large-|zeta| coefficient of f; dominated convergence on the
  // defining integral gives -pi/6.
  {
    const double printed = -(356.0 / 3.0) * kPi / 280.0;
    const double computed = f_oracle_at(cx(S, 0.0)) / s2p;
    if (rel_diff(printed, computed) > 1e-4)
      log_.push_back({"f large-|zeta| coefficient", printed, computed,
                      "oracle at |zeta|=1e3; limit is -pi/6"});
  }

  // Printed large-|zeta| coefficient of g; the defining integral decays two
  // powers faster, so the scaled limit is 0.
  {
    const double printed = 17.0 * kPi / 280.0;
    const double computed =
        (K_oracle(cx(S, 0.0)) / cx(S, 0.0)).real() / s2p;
    if (rel_diff(printed, computed) > 1e-4)
      log_.push_back({"g large-|zeta| coefficient", printed, computed,
                      "oracle at |zeta|=1e3; scaled limit is 0"});
  }

  // The 1-D representation of J2 drifts from the 2-D definition: its
  // large-|zeta| constant is 53 pi/140 while the definition gives pi/4.
  {
    const double printed = 53.0 * kPi / 140.0;
    const double computed = J2_oracle(S) / s2p;
    if (rel_diff(printed, computed) > 1e-4)
      log_.push_back({"J2 large-|zeta| coefficient", printed, computed,
                      "1-D form at |zeta|=1e3 gives " +
                          std::to_string(J2_oned(S) / s2p) +
                          "; definition gives pi/4"});
  }

  // Pointwise probes of every 1-D representation against the oracle.
  for (double s : {0.0, 1.0, 3.0, 30.0}) {
    const std::string at = " at |zeta|=" + std::to_string(s);
    const double f2 = f_oracle_at(cx(s, 0.0));
    const double f1 = f_oned(s);
    if (rel_diff(f1, f2) > 1e-4)
      log_.push_back({"f 1-D form" + at, f1, f2, "inherits the J2 drift"});
    const double g2 = g(s, EvalMethod::oracle);
    const double g1 = g_oned(s);
    if (rel_diff(g1, g2) > 1e-4)
      log_.push_back({"g 1-D form" + at, g1, g2, ""});
    const double j22 = J2_oracle(s);
    const double j21 = J2_oned(s);
    if (rel_diff(j21, j22) > 1e-4)
      log_.push_back({"J2 1-D form" + at, j21, j22, ""});
    const double j12 = J1_oracle(s);
    const double j11 = J1_oned(s);
    if (rel_diff(j11, j12) > 1e-4)
      log_.push_back({"J1 1-D form" + at, j11, j12, ""});
  }
}

std::pair<double, cx> gamma0_map(double mu, cx zeta, const Gamma0Inputs& in,
                                 const ReducedCoeffs& rc, EvalMethod m) {
  if (!(mu > 0.0)) throw ConfigInvalid("gamma0_map requires mu > 0");
  const double np1 = in.n + 1.0;
  const double cube = np1 * np1 * np1;
  const double s = std::abs(zeta);
  const double first = kPi * in.D0 * mu * mu -
                       8.0 * cube * std::pow(mu, -2.0 / np1) * rc.f(s, m);
  cx second = in.Gamma * zeta + in.Upsilon * std::conj(zeta);
  if (s > 0.0)
    second -= 16.0 * cube /
              (kPi * std::pow(mu, 2.0 * (in.n + 2.0) / np1)) * rc.g(s, m) *
              std::conj(zeta);
  return {first, second};
}

double mu0_closed(const Gamma0Inputs& in, const ReducedCoeffs& rc) {
  if (!(in.D0 < 0.0))
    throw NoZeroFound("mu0 requires D0 < 0 (I0 < 0 makes the ratio positive)");
  const double np1 = in.n + 1.0;
  const double base = 8.0 * np1 * np1 * np1 * rc.I0() / (kPi * in.D0);
  return std::pow(base, np1 / (2.0 * (in.n + 2.0)));
}

std::array<std::array<double, 3>, 3> gamma0_jacobian_fd(
    double mu, cx zeta, const Gamma0Inputs& in, const ReducedCoeffs& rc,
    double rel_step) {
  auto eval = [&](double m, cx z) -> std::array<double, 3> {
    const auto [a, b] = gamma0_map(m, z, in, rc);
    return {a, b.real(), b.imag()};
  };
  const double hm = rel_step * std::max(std::abs(mu), 1.0);
  const double hz = rel_step * std::max(std::abs(zeta), 1.0);
  std::array<std::array<double, 3>, 3> J{};
  const auto fm_p = eval(mu + hm, zeta), fm_m = eval(mu - hm, zeta);
  const auto fx_p = eval(mu, zeta + hz), fx_m = eval(mu, zeta - hz);
  const auto fy_p = eval(mu, zeta + cx(0.0, hz)),
             fy_m = eval(mu, zeta - cx(0.0, hz));
  for (int r = 0; r < 3; ++r) {
    J[std::size_t(r)][0] = (fm_p[std::size_t(r)] - fm_m[std::size_t(r)]) / (2.0 * hm);
    J[std::size_t(r)][1] = (fx_p[std::size_t(r)] - fx_m[std::size_t(r)]) / (2.0 * hz);
    J[std::size_t(r)][2] = (fy_p[std::size_t(r)] - fy_m[std::size_t(r)]) / (2.0 * hz);
  }
  return J;
}

namespace {

double det3(const std::array<std::array<double, 3>, 3>& J) {
  return J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
         J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
         J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
}

// Solve J x = b by Gaussian elimination with partial pivoting.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> J,
                             std::array<double, 3> b) {
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(J[std::size_t(r)][std::size_t(c)]) >
          std::abs(J[std::size_t(piv)][std::size_t(c)]))
        piv = r;
    std::swap(J[std::size_t(c)], J[std::size_t(piv)]);
    std::swap(b[std::size_t(c)], b[std::size_t(piv)]);
    if (J[std::size_t(c)][std::size_t(c)] == 0.0)
      throw DegenerateJacobian("singular reduced-system Jacobian");
    for (int r = c + 1; r < 3; ++r) {
      const double m = J[std::size_t(r)][std::size_t(c)] /
                       J[std::size_t(c)][std::size_t(c)];
      for (int k = c; k < 3; ++k)
        J[std::size_t(r)][std::size_t(k)] -=
            m * J[std::size_t(c)][std::size_t(k)];
      b[std::size_t(r)] -= m * b[std::size_t(c)];
    }
  }
  std::array<double, 3> x{};
  for (int r = 2; r >= 0; --r) {
    double acc = b[std::size_t(r)];
    for (int k = r + 1; k < 3; ++k)
      acc -= J[std::size_t(r)][std::size_t(k)] * x[std::size_t(k)];
    x[std::size_t(r)] = acc / J[std::size_t(r)][std::size_t(r)];
  }
  return x;
}

double res_norm(const std::pair<double, cx>& F) {
  return std::max(std::abs(F.first), std::abs(F.second));
}

}  // namespace

ReducedZero solve_reduced(const Gamma0Inputs& in, const ReducedCoeffs& rc,
                          double mu_start, cx zeta_start, int max_iter,
                          double tol) {
  if (!(in.D0 < 0.0))
    throw NoZeroFound("reduced system requires D0 < 0");
  double mu = mu_start;
  cx zeta = zeta_start;
  const double scale =
      1.0 + std::abs(kPi * in.D0 * mu_start * mu_start);
  ReducedZero out;
  double res = res_norm(gamma0_map(mu, zeta, in, rc));
  int it = 0;
  for (; it < max_iter && res > tol * scale; ++it) {
    const auto J = gamma0_jacobian_fd(mu, zeta, in, rc);
    double jscale = 1.0;
    for (const auto& row : J)
      jscale *= std::max({std::abs(row[0]), std::abs(row[1]), std::abs(row[2]),
                          1e-30});
    if (std::abs(det3(J)) < 1e-10 * std::max(1.0, jscale))
      throw DegenerateJacobian("reduced-system Jacobian determinant below "
                               "1e-10 of its scale");
    const auto F0 = gamma0_map(mu, zeta, in, rc);
    const auto d = solve3(J, {-F0.first, -F0.second.real(), -F0.second.imag()});
    double t = 1.0;
    bool accepted = false;
    while (t >= std::pow(2.0, -20)) {
      const double mu_t = mu + t * d[0];
      const cx zeta_t = zeta + t * cx(d[1], d[2]);
      if (mu_t > 0.0) {
        const double res_t = res_norm(gamma0_map(mu_t, zeta_t, in, rc));
        if (res_t <= (1.0 - 0.25 * t) * res) {
          mu = mu_t;
          zeta = zeta_t;
          res = res_t;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted)
      throw NoZeroFound("damped Newton stalled on the reduced system");
  }
  if (res > tol * scale)
    throw NoZeroFound("reduced-system Newton did not reach tolerance");
  out.mu = mu;
  out.zeta = zeta;
  out.residual = res;
  out.iterations = it;

  // Local index: sign of det D Gamma0. Certified on a small sphere: at 26
  // sampled directions the linear term must dominate the remainder, which
  // pins the Brouwer degree to the sign of the determinant.
  const auto J = gamma0_jacobian_fd(mu, zeta, in, rc);
  const double det = det3(J);
  out.index = (det > 0.0) ? 1 : (det < 0.0 ? -1 : 0);
  double r_cert = 1e-3 * std::max(1.0, std::abs(mu));
  for (int attempt = 0; attempt < 2; ++attempt) {
    bool dominated = true;
    for (int i = -1; i <= 1 && dominated; ++i)
      for (int j = -1; j <= 1 && dominated; ++j)
        for (int k = -1; k <= 1 && dominated; ++k) {
          if (i == 0 && j == 0 && k == 0) continue;
          const double nrm = std::sqrt(double(i * i + j * j + k * k));
          const std::array<double, 3> dir = {r_cert * i / nrm,
                                             r_cert * j / nrm,
                                             r_cert * k / nrm};
          const auto Fs = gamma0_map(mu + dir[0],
                                     zeta + cx(dir[1], dir[2]), in, rc);
          const std::array<double, 3> lin = {
              J[0][0] * dir[0] + J[0][1] * dir[1] + J[0][2] * dir[2],
              J[1][0] * dir[0] + J[1][1] * dir[1] + J[1][2] * dir[2],
              J[2][0] * dir[0] + J[2][1] * dir[1] + J[2][2] * dir[2]};
          const double lin_n = std::sqrt(lin[0] * lin[0] + lin[1] * lin[1] +
                                         lin[2] * lin[2]);
          const double rem_n = std::sqrt(
              std::pow(Fs.first - lin[0], 2) +
              std::pow(Fs.second.real() - lin[1], 2) +
              std::pow(Fs.second.imag() - lin[2], 2));
          if (rem_n > 0.5 * lin_n) dominated = false;
        }
    if (dominated) break;
    r_cert /= 8.0;
  }

  // Bifurcation scan: real positive eigenvalues of the 2x2 action
  // [[Re(G+U), Im(U-G)], [-Im(G+U), Re(U-G)]] inside the attained range of
  // 2 D0 g/f give rings of zeros at the bisected radius.
  if (rc.n() >= 1) {
    const double a11 = (in.Gamma + in.Upsilon).real();
    const double a12 = (in.Upsilon - in.Gamma).imag();
    const double a21 = -(in.Gamma + in.Upsilon).imag();
    const double a22 = (in.Upsilon - in.Gamma).real();
    const double tr = a11 + a22, dt = a11 * a22 - a12 * a21;
    const double disc = 0.25 * tr * tr - dt;
    if (disc >= 0.0) {
      for (double lam : {0.5 * tr + std::sqrt(disc), 0.5 * tr - std::sqrt(disc)}) {
        if (!(lam > 0.0)) continue;
        try {
          out.bifurcation_radii.push_back(bifurcation_radius(lam, in, rc));
        } catch (const NoZeroFound&) {
        }
      }
    }
  }
  return out;
}

double bifurcation_radius(double lambda1, const Gamma0Inputs& in,
                          const ReducedCoeffs& rc) {
  if (!(in.D0 < 0.0)) throw NoZeroFound("requires D0 < 0");
  if (rc.n() == 0)
    throw NoZeroFound("the ratio 2 D0 g/f vanishes identically for n = 0");
  if (!(lambda1 > 0.0))
    throw NoZeroFound("the ratio 2 D0 g/f is positive; eigenvalue is not");
  auto ratio = [&](double s) { return 2.0 * in.D0 * rc.g(s) / rc.f(s); };
  double lo = 1e-6;
  const double r_lo = ratio(lo);
  if (lambda1 >= r_lo)
    throw NoZeroFound("eigenvalue above the attained range of 2 D0 g/f");
  double hi = 1.0;
  while (ratio(hi) > lambda1) {
    hi *= 2.0;
    if (hi > 1e6)
      throw NoZeroFound("no crossing of 2 D0 g/f found below |zeta|=1e6");
  }
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (ratio(mid) > lambda1)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::string reduced_coeffs_csv(const ReducedCoeffs& rc,
                               const std::vector<double>& radii) {
  std::string out = "zeta_abs,f_oracle,f_series,f_oned,g_oracle,g_series,g_oned\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  };
  for (double s : radii) {
    put(s);
    for (int which = 0; which < 2; ++which) {
      for (EvalMethod m :
           {EvalMethod::oracle, EvalMethod::series, EvalMethod::oned}) {
        out += ',';
        try {
          put(which == 0 ? rc.f(s, m) : rc.g(s, m));
        } catch (const SeriesDiverged&) {
          // column left empty where the expansion is refused
        }
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace cshv
