#pragma once

#include <array>
#include <cmath>
#include <span>

#include "wigner/grid.hpp"
#include "wigner/types.hpp"

namespace wigner {

// Conservative semi-Lagrangian WENO advection of f_t + v f_x = 0 along x.
//
// Every column j is shifted by sigma = v_j * tau / dx cells. The departure
// point is x_d = x_b - r*dx with b = i - k the nearest node, k =
// ceil(sigma - 1/2) and r = sigma - k in (-1/2, 1/2]. With s = |r| the update is
//
//   f_new(i) = f(b) - s * (F(b + 1/2) - F(b - 1/2)),
//
// where F(b - 1/2) is a polynomial in s built from the upwind stencil
// f(b + t0), ..., f(b + t0 + order - 1), t0 = -(order + 1) / 2. With linear
// weights this reproduces the degree-`order` Lagrange interpolant on nodes
// b + t0 .. b - t0 - 1 exactly. WENO weights act on the s^0 term only.
// Negative r mirrors the stencil about the base node.

struct SlOptions {
  int order = 5;  // 3 or 5
  bool weno = true;
  double eps = 1e-6;
};

// Base cell and local coordinate of the trace-back point, xi in [-1/2, 1/2).
struct Departure {
  Index k = 0;
  double xi = 0.0;
};

Departure departure(Index i, double v, double tau, const PhaseSpaceGrid& grid);

// Flux polynomial coefficients: flux_coefficients(order)[u][p] multiplies
// f(b + t0 + u) * s^p in F(b - 1/2).
using FluxTable = std::array<std::array<double, 5>, 5>;
const FluxTable& flux_coefficients(int order);

// F(b - 1/2) from `order` upwind-first stencil values g[0..order-1].
double sl_flux(const double* g, double s, const SlOptions& opt);

// Nearest-node decomposition of sigma = v*tau/dx.
struct CellShift {
  Index offset = 0;  // base node b = i - offset
  double s = 0.0;    // |sigma - offset|, in [0, 1/2]
  int dir = 1;       // sign of sigma - offset (+1 when zero)
};

inline CellShift cell_shift(double sigma) {
  CellShift c;
  const double k = std::ceil(sigma - 0.5);
  const double r = sigma - k;
  c.offset = static_cast<Index>(k);
  c.dir = r >= 0.0 ? 1 : -1;
  c.s = std::abs(r);
  return c;
}

inline Index wrap_index(Index k, Index n) {
  k %= n;
  return k < 0 ? k + n : k;
}

// Update one point from h[q - t0] = f(b + dir*q), q = t0 .. -t0 - 1.
inline double sl_stencil_update(std::span<const double> h, double s,
                                const SlOptions& opt) {
  const int w = opt.order;
  const int t0 = -(w + 1) / 2;
  if (s == 0.0) return h[static_cast<std::size_t>(-t0)];
  const double left = sl_flux(h.data(), s, opt);
  const double right = sl_flux(h.data() + 1, s, opt);
  return h[static_cast<std::size_t>(-t0)] - s * (right - left);
}

// Single entry of the advected matrix. `source(k, j)` is read with k already
// wrapped into [0, nx).
template <typename Source>
double sl_entry(const Source& source, Index i, Index j, double tau,
                const PhaseSpaceGrid& grid, const SlOptions& opt = {}) {
  const CellShift c = cell_shift(grid.v[j] * tau / grid.dx);
  const int t0 = -(opt.order + 1) / 2;
  std::array<double, 6> h{};
  const Index b = i - c.offset;
  for (int q = t0; q <= -t0 - 1; ++q)
    h[static_cast<std::size_t>(q - t0)] =
        source(wrap_index(b + c.dir * q, grid.nx), j);
  return sl_stencil_update(std::span<const double>(h.data(), opt.order + 1),
                           c.s, opt);
}

// Advect one periodic line by sigma cells. Equal bitwise to calling
// sl_stencil_update point by point.
void sl_line(std::span<const double> in, std::span<double> out, double sigma,
             const SlOptions& opt);

MatrixXd sl_full(const MatrixXd& f, double tau, const PhaseSpaceGrid& grid,
                 const SlOptions& opt = {});

}  // namespace wigner
