// Torus geometry (period lattice, fundamental domain) and vortex
// configurations with concentration points.
#pragma once

#include <cmath>
#include <vector>

#include "cshv/common.hpp"

namespace cshv {

// Flat torus with periods w1, w2, Im(w2/w1) > 0. The fundamental domain is
// { t*w1 + s*w2 : t,s in [-1/2, 1/2) } and |Omega| = |Im(conj(w1) w2)|.
struct Torus {
  cx w1{1.0, 0.0};
  cx w2{0.0, 1.0};

  Torus() = default;
  Torus(cx omega1, cx omega2) : w1(omega1), w2(omega2) {
    if (!(std::imag(w2 / w1) > 0.0))
      throw ConfigInvalid("torus periods must satisfy Im(w2/w1) > 0");
  }

  double area() const { return std::abs(std::imag(std::conj(w1) * w2)); }
  cx tau() const { return w2 / w1; }

  bool is_rectangle(double tol = 1e-12) const {
    return std::abs(std::imag(w1)) <= tol * std::abs(w1) &&
           std::abs(std::real(w2)) <= tol * std::abs(w2) &&
           std::real(w1) > 0.0 && std::imag(w2) > 0.0;
  }

  // Lattice coordinates (t, s) with z = t*w1 + s*w2.
  std::pair<double, double> to_lattice(cx z) const {
    const double a = std::imag(std::conj(w1) * w2);  // signed area, > 0
    const double t = std::imag(std::conj(w2) * z) / std::imag(std::conj(w2) * w1);
    const double s = std::imag(std::conj(w1) * z) / a;
    return {t, s};
  }
  cx from_lattice(double t, double s) const { return t * w1 + s * w2; }

  // Representative of z in the fundamental domain (coordinates in [-1/2,1/2)).
  cx wrap(cx z) const {
    auto [t, s] = to_lattice(z);
    t -= std::floor(t + 0.5);
    s -= std::floor(s + 0.5);
    return from_lattice(t, s);
  }

  // Distance on the torus: min over the 3x3 block of lattice translates.
  double dist(cx a, cx b) const {
    const cx d = wrap(a - b);
    double best = std::abs(d);
    for (int m = -1; m <= 1; ++m)
      for (int n = -1; n <= 1; ++n)
        best = std::min(best, std::abs(d + double(m) * w1 + double(n) * w2));
    return best;
  }
};

// Vortex points p_j (distinct mod lattice) with multiplicities n_j >= 1, plus
// concentration points xi_l. A concentration point may coincide with a vortex
// point (then its multiplicity enters the balance count) or be a fresh point
// (multiplicity 0). Flux balance requires N = sum n_j = 2 * sum_l (n_l + 1).
struct VortexConfig {
  Torus torus;
  std::vector<cx> points;
  std::vector<int> mult;
  std::vector<cx> xi;

  int N() const {
    int s = 0;
    for (int m : mult) s += m;
    return s;
  }

  // Multiplicity of xi_l as a vortex point (0 if it is not one).
  int n_of_xi(std::size_t l) const {
    const int j = vortex_index_of_xi(l);
    return j < 0 ? 0 : mult[std::size_t(j)];
  }

  // Index into points[] of xi_l, or -1.
  int vortex_index_of_xi(std::size_t l) const {
    const double scale = std::sqrt(torus.area());
    for (std::size_t j = 0; j < points.size(); ++j)
      if (torus.dist(points[j], xi[l]) < 1e-9 * scale) return int(j);
    return -1;
  }

  // Index into xi[] of points[j], or -1 if it is not a concentration point.
  int xi_index_of_vortex(std::size_t j) const {
    const double scale = std::sqrt(torus.area());
    for (std::size_t l = 0; l < xi.size(); ++l)
      if (torus.dist(points[j], xi[l]) < 1e-9 * scale) return int(l);
    return -1;
  }

  bool balance_ok() const {
    int rhs = 0;
    for (std::size_t l = 0; l < xi.size(); ++l) rhs += 2 * (n_of_xi(l) + 1);
    return N() == rhs;
  }

  void validate() const {
    if (points.size() != mult.size())
      throw ConfigInvalid("points/multiplicities size mismatch");
    if (points.empty()) throw ConfigInvalid("no vortex points");
    if (xi.empty()) throw ConfigInvalid("no concentration points");
    const double scale = std::sqrt(torus.area());
    for (int m : mult)
      if (m < 1) throw ConfigInvalid("multiplicities must be >= 1");
    for (std::size_t a = 0; a < points.size(); ++a)
      for (std::size_t b = a + 1; b < points.size(); ++b)
        if (torus.dist(points[a], points[b]) < 1e-9 * scale)
          throw ConfigInvalid("vortex points must be distinct mod lattice");
    for (std::size_t a = 0; a < xi.size(); ++a)
      for (std::size_t b = a + 1; b < xi.size(); ++b)
        if (torus.dist(xi[a], xi[b]) < 1e-9 * scale)
          throw ConfigInvalid("concentration points must be distinct");
  }

  void require_balance() const {
    if (!balance_ok()) {
      int rhs = 0;
      for (std::size_t l = 0; l < xi.size(); ++l) rhs += 2 * (n_of_xi(l) + 1);
      throw BalanceViolated("N = " + std::to_string(N()) +
                            " but 2*sum(n_l+1) = " + std::to_string(rhs));
    }
  }
};

}  // namespace cshv
