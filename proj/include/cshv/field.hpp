// Periodic grid fields on the torus and the spectral Poisson solver.
//
// Grid convention: M x M nodes at z(i,j) = t_i*w1 + s_j*w2 with
// t_i = (i - M/2)/M, s_j = (j - M/2)/M, both in [-1/2, 1/2); index j*M + i
// (i fastest). The plane wave e^{2 pi i (k t + l s)} is an eigenfunction of
// -Laplace with eigenvalue (4 pi^2/|Omega|^2) |k w2 - l w1|^2.
#pragma once

#include <functional>
#include <vector>

#include "cshv/torus.hpp"

namespace cshv {

struct PeriodicField {
  Torus torus;
  int M = 0;
  std::vector<double> v;

  PeriodicField() = default;
  PeriodicField(const Torus& T, int m) : torus(T), M(m), v(std::size_t(m) * m, 0.0) {
    if (m < 4 || (m & (m - 1)) != 0) throw GridTooSmall("grid size must be a power of two >= 4");
  }

  double t_of(int i) const { return (i - M / 2) / double(M); }
  double s_of(int j) const { return (j - M / 2) / double(M); }
  cx z_at(int i, int j) const { return torus.from_lattice(t_of(i), s_of(j)); }
  double& at(int i, int j) { return v[std::size_t(j) * M + i]; }
  double at(int i, int j) const { return v[std::size_t(j) * M + i]; }

  static PeriodicField sample(const Torus& T, int M,
                              const std::function<double(cx)>& f);

  double mean() const;
  double integrate() const { return mean() * torus.area(); }

  PeriodicField& operator+=(const PeriodicField& o);
  PeriodicField& operator-=(const PeriodicField& o);
  PeriodicField& operator*=(double c);
  PeriodicField map(const std::function<double(double)>& f) const;

  // Spectral Laplacian (in z, not in lattice coordinates).
  PeriodicField laplacian() const;

  // Trigonometric interpolation onto a finer M2 x M2 grid (zero padding).
  PeriodicField upsample(int M2) const;

  // Exact evaluation of the trigonometric interpolant at one point
  // (O(M^2) per call; intended for test probes).
  double eval_interpolant(cx z) const;
};

// Solves Laplace(u) = f - <f> with <u> = 0. If |<f>| exceeds mean_tol times
// the L2 scale of f, raises NonZeroMean (the projected problem would silently
// change the data).
PeriodicField solve_poisson(const PeriodicField& f, double mean_tol = 1e-8);

// Solves (Laplace - kappa) u = f spectrally for kappa > 0 (the shift makes
// the operator invertible on all modes); used to precondition Newton-Krylov
// linear systems.
PeriodicField helmholtz_inverse(const PeriodicField& f, double kappa);

// Complex-valued grid (same layout); used for holomorphic data like sigma0.
struct ComplexGrid {
  Torus torus;
  int M = 0;
  std::vector<cx> v;

  ComplexGrid() = default;
  ComplexGrid(const Torus& T, int m) : torus(T), M(m), v(std::size_t(m) * m, cx(0)) {}
  cx z_at(int i, int j) const {
    return torus.from_lattice((i - M / 2) / double(M), (j - M / 2) / double(M));
  }
  cx& at(int i, int j) { return v[std::size_t(j) * M + i]; }
  cx at(int i, int j) const { return v[std::size_t(j) * M + i]; }
};

}  // namespace cshv
