#include "wigner/poisson.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "wigner/lowrank.hpp"

namespace wigner {

VectorXd trapezoid_weights(Index nv) {
  VectorXd w = VectorXd::Ones(nv);
  w[0] = 0.5;
  w[nv - 1] = 0.5;
  return w;
}

VectorXd density_full(const MatrixXd& f, const PhaseSpaceGrid& grid) {
  if (f.rows() != grid.nx || f.cols() != grid.nv)
    throw std::invalid_argument("density_full: matrix shape does not match grid");
  return grid.dv * (f * trapezoid_weights(grid.nv));
}

VectorXd density_lowrank(const LowRankFactors<double>& factors,
                         const PhaseSpaceGrid& grid) {
  if (factors.rank() == 0) return VectorXd::Zero(grid.nx);
  if (factors.u.rows() != grid.nx || factors.v.rows() != grid.nv)
    throw std::invalid_argument("density_lowrank: factor shape does not match grid");
  const VectorXd vw = factors.v.transpose() * trapezoid_weights(grid.nv);
  return grid.dv * (factors.u * factors.sigma.cwiseProduct(vw));
}

VectorXd solve_poisson(const VectorXd& rho, const PhaseSpaceGrid& grid) {
  const Index n = grid.nx;
  std::vector<double> src(static_cast<std::size_t>(n));
  const double mean = rho.mean();
  for (Index i = 0; i < n; ++i) src[i] = rho[i] - mean;

  Eigen::FFT<double> fft;
  std::vector<Complex> spec;
  fft.fwd(spec, src);
  spec[0] = 0.0;
  const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
  for (Index k = 1; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(n);
    const double symbol =
        (2.5 - (8.0 / 3.0) * std::cos(theta) + std::cos(2.0 * theta) / 6.0) *
        inv_dx2;
    spec[k] /= symbol;
  }
  std::vector<Complex> out;
  fft.inv(out, spec);

  VectorXd phi(n);
  for (Index i = 0; i < n; ++i) phi[i] = out[i].real();
  phi.array() -= phi.mean();
  return phi;
}

VectorXd electric_field(const VectorXd& phi, const PhaseSpaceGrid& grid) {
  const Index n = phi.size();
  VectorXd e(n);
  auto at = [&](Index i) { return phi[((i % n) + n) % n]; };
  const double c = 1.0 / (12.0 * grid.dx);
  for (Index i = 0; i < n; ++i)
    e[i] = -(at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) * c;
  return e;
}

}  // namespace wigner
