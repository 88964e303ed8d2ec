#include "wigner/grid.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace wigner {

PhaseSpaceGrid build_grid(double lx, double lv, Index nx, Index nv) {
  if (!(lx > 0.0) || !(lv > 0.0))
    throw std::invalid_argument("grid: domain lengths must be positive");
  if (nx < 8 || nv < 8)
    throw std::invalid_argument("grid: need at least 8 nodes per dimension");
  if (nv % 2 != 0)
    throw std::invalid_argument("grid: Nv must be even, got " +
                                std::to_string(nv));

  PhaseSpaceGrid g;
  g.nx = nx;
  g.nv = nv;
  g.lx = lx;
  g.lv = lv;
  g.dx = lx / static_cast<double>(nx);
  g.dv = 2.0 * lv / static_cast<double>(nv - 1);
  g.x.resize(nx);
  for (Index i = 0; i < nx; ++i) g.x[i] = static_cast<double>(i) * g.dx;
  g.v.resize(nv);
  for (Index j = 0; j < nv; ++j) g.v[j] = -lv + static_cast<double>(j) * g.dv;
  g.v[nv - 1] = lv;
  g.kv.resize(nv);
  for (Index b = 0; b < nv; ++b) g.kv[b] = bin_frequency(b, nv, lv);
  return g;
}

VectorXd frequency_grid(Index nv, double lv) {
  if (nv % 2 != 0) throw std::invalid_argument("frequency_grid: Nv must be even");
  VectorXd k(nv);
  const double scale = std::numbers::pi / lv;
  for (Index c = 0; c < nv; ++c)
    k[c] = scale * static_cast<double>(c - nv / 2);
  return k;
}

std::vector<Index> centered_to_bin(Index nv) {
  std::vector<Index> map(static_cast<std::size_t>(nv));
  for (Index c = 0; c < nv; ++c) map[c] = (c - nv / 2 + nv) % nv;
  return map;
}

std::vector<Index> bin_to_centered(Index nv) {
  std::vector<Index> map(static_cast<std::size_t>(nv));
  for (Index b = 0; b < nv; ++b) map[b] = (b + nv / 2) % nv;
  return map;
}

double bin_frequency(Index bin, Index nv, double lv) {
  const Index m = bin < nv / 2 ? bin : bin - nv;
  return std::numbers::pi / lv * static_cast<double>(m);
}

}  // namespace wigner
