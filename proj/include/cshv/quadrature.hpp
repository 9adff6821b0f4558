// One-dimensional adaptive quadrature (complex line integrals along
// polylines, real-axis integrals via GSL) and smooth-partition quadrature on
// the torus for integrands with isolated logarithmic or power singularities.
#pragma once

#include <array>
#include <functional>
#include <vector>

#include "cshv/field.hpp"
#include "cshv/torus.hpp"

namespace cshv {

// Single 15-point Gauss-Kronrod pass over the segment [a, b].
cx gk15(const std::function<cx(cx)>& f, cx a, cx b);

// The full (mirrored) 15-point Kronrod nodes and weights on [-1, 1], for
// callers assembling their own composite rules.
std::array<double, 15> gk15_full_nodes();
std::array<double, 15> gk15_full_weights();

// Integral of f along the straight segment [a, b], adaptive Gauss-Kronrod 15.
cx integrate_segment(const std::function<cx(cx)>& f, cx a, cx b,
                     double tol = 1e-12, int max_depth = 48);

// Integral along the polyline through pts (open path; close it by repeating
// the first point). If any listed pole lies within `clearance` of the path,
// raises PoleOnPath.
cx contour_integral(const std::function<cx(cx)>& f, const std::vector<cx>& pts,
                    double tol = 1e-12, const std::vector<cx>& poles = {},
                    double clearance = 0.0);

// Real adaptive integrals via GSL (QAGS on [a,b]; QAGIU on [a, infinity)).
double qags(const std::function<double(double)>& f, double a, double b,
            double tol = 1e-11);
double qagiu(const std::function<double(double)>& f, double a,
             double tol = 1e-11);

// C-infinity smoothstep: 0 for x <= 0, 1 for x >= 1, smooth in between.
double smoothstep_cinf(double x);
// Quintic polynomial smoothstep (used for profile cut-offs).
double smoothstep_quintic(double x);

// Radial bump: 1 on [0, R/2], 0 beyond R, C-infinity in between.
double radial_bump(double r, double R);

struct SingularPatch {
  cx center;
  double R;  // patch radius; integrand may be singular at the center
};

// Integral over the torus of f, where f is smooth except at the patch
// centers (integrable singularities allowed, e.g. log or |z-c|^alpha with
// alpha > -2). Far field: periodic trapezoid of f * (1 - sum of bumps) on an
// M x M grid (spectrally accurate for C-infinity data). Near field: polar
// quadrature of f * bump around each center (trapezoid in angle, adaptive GK
// in radius). Patches must be pairwise disjoint.
double integrate_patched(const std::function<double(cx)>& f, const Torus& T,
                         int M, const std::vector<SingularPatch>& patches,
                         int n_theta = 128, double radial_tol = 1e-12);

}  // namespace cshv
