#include "wigner/diagnostics.hpp"

#include <cmath>
#include <numeric>

#include "wigner/poisson.hpp"

namespace wigner {

double total_mass(const MatrixXd& f, const PhaseSpaceGrid& grid) {
  return density_full(f, grid).sum() * grid.dx;
}

double total_mass(const LowRankFactors<double>& f, const PhaseSpaceGrid& grid) {
  if (f.rank() == 0) return 0.0;
  const VectorXd us = f.u.colwise().sum().transpose() * grid.dx;
  const VectorXd vs = f.v.transpose() * trapezoid_weights(grid.nv) * grid.dv;
  return (f.sigma.array() * us.array() * vs.array()).sum();
}

double momentum(const MatrixXd& f, const PhaseSpaceGrid& grid) {
  const VectorXd wv = trapezoid_weights(grid.nv).cwiseProduct(grid.v);
  return (f * wv).sum() * grid.dx * grid.dv;
}

double momentum(const LowRankFactors<double>& f, const PhaseSpaceGrid& grid) {
  if (f.rank() == 0) return 0.0;
  const VectorXd wv = trapezoid_weights(grid.nv).cwiseProduct(grid.v);
  const VectorXd us = f.u.colwise().sum().transpose() * grid.dx;
  const VectorXd vs = f.v.transpose() * wv * grid.dv;
  return (f.sigma.array() * us.array() * vs.array()).sum();
}

double abs_velocity_moment(const MatrixXd& f, const PhaseSpaceGrid& grid) {
  const VectorXd wv = trapezoid_weights(grid.nv).cwiseProduct(grid.v.cwiseAbs());
  return (f.cwiseAbs() * wv).sum() * grid.dx * grid.dv;
}

double abs_velocity_moment(const LowRankFactors<double>& f,
                           const PhaseSpaceGrid& grid) {
  return abs_velocity_moment(f.expand(), grid);
}

double electrostatic_energy(const VectorXd& e, const PhaseSpaceGrid& grid) {
  return std::sqrt(e.squaredNorm() * grid.dx);
}

long rank_at_energy(const VectorXd& s, double fraction) {
  const double total = s.squaredNorm();
  if (!(total > 0.0)) return 0;
  const double target = fraction * total;
  double acc = 0.0;
  for (Index m = 0; m < s.size(); ++m) {
    acc += s[m] * s[m];
    if (acc >= target) return static_cast<long>(m + 1);
  }
  return static_cast<long>(s.size());
}

double imaginary_residual(const MatrixXcd& f, const PhaseSpaceGrid& grid) {
  const VectorXd w = trapezoid_weights(grid.nv);
  return std::abs((f.imag() * w).sum()) * grid.dx * grid.dv;
}

std::optional<double> fit_damping_rate(const std::vector<double>& t,
                                       const std::vector<double>& ee,
                                       double t0, double t1) {
  std::vector<double> pt;
  std::vector<double> pv;
  for (std::size_t n = 1; n + 1 < ee.size(); ++n) {
    if (t[n] < t0 || t[n] > t1) continue;
    if (ee[n] > ee[n - 1] && ee[n] >= ee[n + 1] && ee[n] > 0.0) {
      pt.push_back(t[n]);
      pv.push_back(std::log(ee[n]));
    }
  }
  if (pt.size() < 3) return std::nullopt;
  const double n = static_cast<double>(pt.size());
  const double mt = std::accumulate(pt.begin(), pt.end(), 0.0) / n;
  const double mv = std::accumulate(pv.begin(), pv.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < pt.size(); ++k) {
    sxy += (pt[k] - mt) * (pv[k] - mv);
    sxx += (pt[k] - mt) * (pt[k] - mt);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  return -sxy / sxx;
}

}  // namespace wigner
