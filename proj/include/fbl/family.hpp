#pragma once

#include "fbl/grid.hpp"

namespace fbl {

// Built-in L2-normalized test functions at the coherent scale sqrt(h).

inline double hermite_poly(int k, double t) {
  double p0 = 1.0, p1 = 2.0 * t;
  if (k == 0) return p0;
  if (k == 1) return p1;
  for (int m = 2; m <= k; ++m) {
    double p2 = 2.0 * t * p1 - 2.0 * (m - 1) * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// Hermite function of order k, centered at x0, unit L2 norm in the continuum
inline GridFunction hermite_state(const PhaseSpaceGrid& g, int k, double x0 = 0.0) {
  double h = g.h();
  double fact = 1.0;
  for (int m = 2; m <= k; ++m) fact *= m;
  double norm = std::pow(PI * h, -0.25) / std::sqrt(std::pow(2.0, k) * fact);
  GridFunction u(g, Tag::base);
  for (std::size_t j = 0; j < g.base_count(); ++j) {
    double y;
    g.base_point(j, &y);
    double t = (y - x0) / std::sqrt(h);
    u.v[j] = norm * hermite_poly(k, t) * std::exp(-t * t / 2.0);
  }
  return u;
}

// coherent state centered at the phase-space point (x0, xi0)
inline GridFunction coherent_state(const PhaseSpaceGrid& g, double x0, double xi0) {
  double h = g.h();
  double norm = std::pow(PI * h, -0.25);
  GridFunction u(g, Tag::base);
  for (std::size_t j = 0; j < g.base_count(); ++j) {
    double y;
    g.base_point(j, &y);
    double d = y - x0;
    u.v[j] = norm * std::exp(cplx{-d * d / (2 * h), xi0 * d / h});
  }
  return u;
}

// random band-limited function: random combination of Hermite states 0..kmax
inline GridFunction random_band_limited(const PhaseSpaceGrid& g, Rng& rng, int kmax = 8,
                                        double x0 = 0.0) {
  GridFunction u(g, Tag::base);
  for (int k = 0; k <= kmax; ++k) {
    cplx a = rng.cnormal();
    GridFunction hk = hermite_state(g, k, x0);
    for (std::size_t j = 0; j < u.size(); ++j) u.v[j] += a * hk.v[j];
  }
  double nn = norm(u);
  if (nn > 0)
    for (auto& z : u.v) z /= nn;
  return u;
}

// random phase-side vector with unit weighted norm.  White noise is windowed
// into the box interior: the truncated grid models L^2(T*R^n) faithfully only
// for fields that die out before the box edges (spectral content at the
// momentum edge is not representable by the base grid).
inline GridFunction random_phase_vector(const PhaseSpaceGrid& g, Rng& rng,
                                        const std::vector<double>* w = nullptr,
                                        double x_frac = 0.6, double xi_frac = 0.5) {
  GridFunction F(g, Tag::phase);
  double ax = x_frac * g.half_width_x(), axi = xi_frac * g.half_width_xi();
  for (std::size_t a = 0; a < F.size(); ++a) {
    double x, xi;
    g.phase_point(a, &x, &xi);
    double ex = std::pow(x / ax, 8), exi = std::pow(xi / axi, 8);
    F.v[a] = rng.cnormal() * std::exp(-ex - exi);
  }
  double nn = norm(F, w);
  for (auto& z : F.v) z /= nn;
  return F;
}

}  // namespace fbl
