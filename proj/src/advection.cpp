#include "wigner/advection.hpp"

#include <stdexcept>
#include <vector>

namespace wigner {

namespace {

using Poly = std::vector<double>;

Poly multiply(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

FluxTable build_table(int order) {
  const int t0 = -(order + 1) / 2;
  const int t1 = -t0 - 1;
  // a[t][p]: coefficient of s^p in the Lagrange weight of node t evaluated at
  // x = -s (departure at x_b - s*dx).
  std::vector<Poly> a;
  for (int t = t0; t <= t1; ++t) {
    Poly l{1.0};
    for (int n = t0; n <= t1; ++n) {
      if (n == t) continue;
      const double den = static_cast<double>(t - n);
      l = multiply(l, Poly{-static_cast<double>(n) / den, 1.0 / den});
    }
    for (std::size_t p = 1; p < l.size(); p += 2) l[p] = -l[p];
    a.push_back(l);
  }
  FluxTable table{};
  for (int u = 0; u < order; ++u)
    for (int p = 0; p < order; ++p) {
      double acc = 0.0;
      for (int t = 0; t <= u; ++t) acc += a[t][p + 1];
      table[u][p] = acc;
    }
  return table;
}

double weno_leading3(const double* g, double eps) {
  const double q1 = -0.5 * g[0] + 1.5 * g[1];
  const double q2 = 0.5 * g[1] + 0.5 * g[2];
  const double b1 = (g[1] - g[0]) * (g[1] - g[0]);
  const double b2 = (g[1] - g[2]) * (g[1] - g[2]);
  const double w1 = (1.0 / 3.0) / ((eps + b1) * (eps + b1));
  const double w2 = (2.0 / 3.0) / ((eps + b2) * (eps + b2));
  return (w1 * q1 + w2 * q2) / (w1 + w2);
}

double weno_leading5(const double* g, double eps) {
  const double q0 = (2.0 * g[0] - 7.0 * g[1] + 11.0 * g[2]) / 6.0;
  const double q1 = (-g[1] + 5.0 * g[2] + 2.0 * g[3]) / 6.0;
  const double q2 = (2.0 * g[2] + 5.0 * g[3] - g[4]) / 6.0;
  const double c = 13.0 / 12.0;
  const double d0a = g[0] - 2.0 * g[1] + g[2];
  const double d0b = g[0] - 4.0 * g[1] + 3.0 * g[2];
  const double d1a = g[1] - 2.0 * g[2] + g[3];
  const double d1b = g[1] - g[3];
  const double d2a = g[2] - 2.0 * g[3] + g[4];
  const double d2b = 3.0 * g[2] - 4.0 * g[3] + g[4];
  const double b0 = c * d0a * d0a + 0.25 * d0b * d0b;
  const double b1 = c * d1a * d1a + 0.25 * d1b * d1b;
  const double b2 = c * d2a * d2a + 0.25 * d2b * d2b;
  const double w0 = 0.1 / ((eps + b0) * (eps + b0));
  const double w1 = 0.6 / ((eps + b1) * (eps + b1));
  const double w2 = 0.3 / ((eps + b2) * (eps + b2));
  return (w0 * q0 + w1 * q1 + w2 * q2) / (w0 + w1 + w2);
}

}  // namespace

const FluxTable& flux_coefficients(int order) {
  static const FluxTable third = build_table(3);
  static const FluxTable fifth = build_table(5);
  if (order == 3) return third;
  if (order == 5) return fifth;
  throw std::invalid_argument("advection: order must be 3 or 5");
}

double sl_flux(const double* g, double s, const SlOptions& opt) {
  const FluxTable& c = flux_coefficients(opt.order);
  const int w = opt.order;
  double lead;
  if (opt.weno) {
    lead = w == 3 ? weno_leading3(g, opt.eps) : weno_leading5(g, opt.eps);
  } else {
    lead = 0.0;
    for (int u = 0; u < w; ++u) lead += c[u][0] * g[u];
  }
  // Horner over s^1 .. s^(w-1).
  double tail = 0.0;
  for (int p = w - 1; p >= 1; --p) {
    double coef = 0.0;
    for (int u = 0; u < w; ++u) coef += c[u][p] * g[u];
    tail = (tail + coef) * s;
  }
  return lead + tail;
}

Departure departure(Index i, double v, double tau, const PhaseSpaceGrid& grid) {
  const double sigma = v * tau / grid.dx;
  const double near = std::ceil(sigma - 0.5);
  Departure d;
  d.k = wrap_index(i - static_cast<Index>(near), grid.nx);
  d.xi = near - sigma;
  return d;
}

void sl_line(std::span<const double> in, std::span<double> out, double sigma,
             const SlOptions& opt) {
  const Index n = static_cast<Index>(in.size());
  const CellShift c = cell_shift(sigma);
  const int w = opt.order;
  const int t0 = -(w + 1) / 2;
  if (c.s == 0.0) {
    for (Index i = 0; i < n; ++i)
      out[i] = in[wrap_index(i - c.offset, n)];
    return;
  }
  // flux[b] is F(b - 1/2) read in the upwind direction from base b.
  std::vector<double> flux(static_cast<std::size_t>(n));
  std::array<double, 5> g{};
  for (Index b = 0; b < n; ++b) {
    for (int u = 0; u < w; ++u)
      g[u] = in[wrap_index(b + c.dir * (t0 + u), n)];
    flux[b] = sl_flux(g.data(), c.s, opt);
  }
  for (Index i = 0; i < n; ++i) {
    const Index b = wrap_index(i - c.offset, n);
    const double left = flux[b];
    const double right = flux[wrap_index(b + c.dir, n)];
    out[i] = in[b] - c.s * (right - left);
  }
}

MatrixXd sl_full(const MatrixXd& f, double tau, const PhaseSpaceGrid& grid,
                 const SlOptions& opt) {
  if (f.rows() != grid.nx || f.cols() != grid.nv)
    throw std::invalid_argument("sl_full: matrix shape does not match grid");
  MatrixXd out(f.rows(), f.cols());
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < f.cols(); ++j) {
    sl_line(std::span<const double>(f.col(j).data(), f.rows()),
            std::span<double>(out.col(j).data(), f.rows()),
            grid.v[j] * tau / grid.dx, opt);
  }
  return out;
}

}  // namespace wigner
