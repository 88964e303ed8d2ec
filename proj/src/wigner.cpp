#include "wigner/wigner.hpp"

#include <cmath>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "wigner/advection.hpp"
#include "wigner/poisson.hpp"

namespace wigner {

namespace {

double wrap_position(double x, double lx) {
  double r = std::fmod(x, lx);
  if (r < 0.0) r += lx;
  if (r >= lx) r -= lx;
  return r;
}

double weno_interp5(const double* f, double theta) {
  // f[0..4] = phi at nodes -2..2 around the nearest node, theta in [-1/2, 1/2].
  const double p0 = f[2] + theta * (1.5 * f[2] - 2.0 * f[1] + 0.5 * f[0]) +
                    0.5 * theta * theta * (f[0] - 2.0 * f[1] + f[2]);
  const double p1 = f[2] + 0.5 * theta * (f[3] - f[1]) +
                    0.5 * theta * theta * (f[1] - 2.0 * f[2] + f[3]);
  const double p2 = f[2] + theta * (-1.5 * f[2] + 2.0 * f[3] - 0.5 * f[4]) +
                    0.5 * theta * theta * (f[2] - 2.0 * f[3] + f[4]);
  const double d0 = (theta - 1.0) * (theta - 2.0) / 12.0;
  const double d1 = (4.0 - theta * theta) / 6.0;
  const double d2 = (theta + 1.0) * (theta + 2.0) / 12.0;
  const double c = 13.0 / 12.0;
  const double a0 = f[0] - 2.0 * f[1] + f[2];
  const double b0 = f[0] - 4.0 * f[1] + 3.0 * f[2];
  const double a1 = f[1] - 2.0 * f[2] + f[3];
  const double b1 = f[1] - f[3];
  const double a2 = f[2] - 2.0 * f[3] + f[4];
  const double b2 = 3.0 * f[2] - 4.0 * f[3] + f[4];
  const double beta0 = c * a0 * a0 + 0.25 * b0 * b0;
  const double beta1 = c * a1 * a1 + 0.25 * b1 * b1;
  const double beta2 = c * a2 * a2 + 0.25 * b2 * b2;
  constexpr double eps = 1e-6;
  const double w0 = d0 / ((eps + beta0) * (eps + beta0));
  const double w1 = d1 / ((eps + beta1) * (eps + beta1));
  const double w2 = d2 / ((eps + beta2) * (eps + beta2));
  return (w0 * p0 + w1 * p1 + w2 * p2) / (w0 + w1 + w2);
}

double phase_angle(const VectorXd& phi, double h, double dt, double x,
                   double kv, const PhaseSpaceGrid& grid) {
  const double half = h * kv / 2.0;
  const double plus = interpolate_potential(phi, x + half, grid);
  const double minus = interpolate_potential(phi, x - half, grid);
  return (plus - minus) * dt / h;
}

}  // namespace

double interpolate_potential(const VectorXd& phi, double xq,
                             const PhaseSpaceGrid& grid) {
  const double pos = wrap_position(xq, grid.lx) / grid.dx;
  const double nearest = std::floor(pos + 0.5);
  const double theta = pos - nearest;
  const Index k = static_cast<Index>(nearest);
  if (std::abs(theta) < 1e-12) return phi[wrap_index(k, grid.nx)];
  double f[5];
  for (int q = 0; q < 5; ++q) f[q] = phi[wrap_index(k + q - 2, grid.nx)];
  return weno_interp5(f, theta);
}

Complex phase_multiplier(const VectorXd& phi, double h, double dt, Index i,
                         Index j, const PhaseSpaceGrid& grid) {
  return std::polar(1.0, phase_angle(phi, h, dt, grid.x[i], grid.kv[j], grid));
}

void phase_column(const WignerStep& step, Index j, const PhaseSpaceGrid& grid,
                  VectorXcd& out) {
  out.resize(grid.nx);
  for (Index i = 0; i < grid.nx; ++i)
    out[i] = phase_multiplier(*step.phi, step.h, step.dt, i, j, grid);
}

void phase_row(const WignerStep& step, Index i, const PhaseSpaceGrid& grid,
               VectorXcd& out) {
  out.resize(grid.nv);
  for (Index j = 0; j < grid.nv; ++j)
    out[j] = phase_multiplier(*step.phi, step.h, step.dt, i, j, grid);
}

MatrixXd fourier_update_full(const MatrixXd& f, const VectorXd& phi, double h,
                             double dt, const PhaseSpaceGrid& grid,
                             FourierStageReport* report) {
  const Index nx = f.rows();
  const Index nv = f.cols();
  const Index nyq = grid.nyquist_bin();
  MatrixXd out(nx, nv);
  VectorXd imag_row_sums(nx);
  VectorXd imag_row_max(nx);
  WignerStep step{&phi, h, dt};
  const VectorXd w = trapezoid_weights(nv);

#pragma omp parallel
  {
    Eigen::FFT<double> fft;
    std::vector<double> line(static_cast<std::size_t>(nv));
    std::vector<Complex> spec;
    std::vector<Complex> back;
    VectorXcd g;
#pragma omp for schedule(static)
    for (Index i = 0; i < nx; ++i) {
      for (Index j = 0; j < nv; ++j) line[j] = f(i, j);
      fft.fwd(spec, line);
      phase_row(step, i, grid, g);
      for (Index j = 0; j < nv; ++j) spec[j] *= g[j];
      spec[nyq] = 0.0;
      fft.inv(back, spec);
      double isum = 0.0;
      double imax = 0.0;
      for (Index j = 0; j < nv; ++j) {
        out(i, j) = back[j].real();
        isum += w[j] * back[j].imag();
        imax = std::max(imax, std::abs(back[j].imag()));
      }
      imag_row_sums[i] = isum;
      imag_row_max[i] = imax;
    }
  }
  if (report) {
    report->imag_residual =
        std::abs(imag_row_sums.sum()) * grid.dx * grid.dv;
    const double fmax = out.cwiseAbs().maxCoeff();
    report->max_imag_ratio =
        fmax > 0.0 ? imag_row_max.maxCoeff() / fmax : imag_row_max.maxCoeff();
  }
  return out;
}

MatrixXcd dft_columns(const MatrixXd& v) {
  return dft_columns(MatrixXcd(v.cast<Complex>()));
}

MatrixXcd dft_columns(const MatrixXcd& v) {
  Eigen::FFT<double> fft;
  MatrixXcd out(v.rows(), v.cols());
  std::vector<Complex> in(static_cast<std::size_t>(v.rows()));
  std::vector<Complex> spec;
  for (Index m = 0; m < v.cols(); ++m) {
    for (Index j = 0; j < v.rows(); ++j) in[j] = v(j, m);
    fft.fwd(spec, in);
    for (Index j = 0; j < v.rows(); ++j) out(j, m) = spec[j];
  }
  return out;
}

MatrixXcd idft_columns(const MatrixXcd& vt) {
  Eigen::FFT<double> fft;
  MatrixXcd out(vt.rows(), vt.cols());
  std::vector<Complex> in(static_cast<std::size_t>(vt.rows()));
  std::vector<Complex> back;
  for (Index m = 0; m < vt.cols(); ++m) {
    for (Index j = 0; j < vt.rows(); ++j) in[j] = vt(j, m);
    fft.inv(back, in);
    for (Index j = 0; j < vt.rows(); ++j) out(j, m) = back[j];
  }
  return out;
}

FourierFactors to_fourier(const LowRankFactors<double>& f) {
  FourierFactors out;
  out.u = f.u;
  out.sigma = f.sigma;
  out.vt = f.rank() > 0 ? dft_columns(f.v) : MatrixXcd(f.v.rows(), 0);
  return out;
}

Complex fourier_entry(const FourierFactors& factors, const VectorXd& phi,
                      double h, double dt, Index i, Index j,
                      const PhaseSpaceGrid& grid) {
  if (j == grid.nyquist_bin()) return 0.0;
  Complex acc = 0.0;
  for (Index m = 0; m < factors.rank(); ++m)
    acc += factors.u(i, m) * factors.sigma[m] * factors.vt(j, m);
  return acc * phase_multiplier(phi, h, dt, i, j, grid);
}

FourierUpdateAccessor::FourierUpdateAccessor(const FourierFactors& factors,
                                             const VectorXd& phi, double h,
                                             double dt,
                                             const PhaseSpaceGrid& grid)
    : factors_(&factors), grid_(&grid), step_{&phi, h, dt} {
  weighted_vt_ = factors.vt * factors.sigma.cast<Complex>().asDiagonal();
}

Complex FourierUpdateAccessor::entry(Index i, Index j) const {
  return fourier_entry(*factors_, *step_.phi, step_.h, step_.dt, i, j, *grid_);
}

void FourierUpdateAccessor::column(Index j, VectorXcd& out) const {
  out.resize(grid_->nx);
  if (j == grid_->nyquist_bin() || factors_->rank() == 0) {
    out.setZero();
    return;
  }
  out = factors_->u.cast<Complex>() * weighted_vt_.row(j).transpose();
  VectorXcd g;
  phase_column(step_, j, *grid_, g);
  out.array() *= g.array();
}

void FourierUpdateAccessor::row(Index i, VectorXcd& out) const {
  out.resize(grid_->nv);
  if (factors_->rank() == 0) {
    out.setZero();
    return;
  }
  out = weighted_vt_ * factors_->u.row(i).transpose().cast<Complex>();
  VectorXcd g;
  phase_row(step_, i, *grid_, g);
  out.array() *= g.array();
  out[grid_->nyquist_bin()] = 0.0;
}

LowRankFactors<double> from_fourier(const LowRankFactors<Complex>& f,
                                    const PhaseSpaceGrid& grid,
                                    FourierStageReport* report) {
  const Index r = f.rank();
  if (r == 0) {
    if (report) *report = FourierStageReport{};
    return LowRankFactors<double>::zero(f.rows(), f.cols());
  }
  const MatrixXcd w = idft_columns(f.v);
  if (report) {
    // sum_ij F_ij w_j = (1^T U) diag(sigma) (W^T w)
    const VectorXcd us = f.u.colwise().sum().transpose();
    const VectorXcd ws = w.transpose() * trapezoid_weights(grid.nv).cast<Complex>();
    Complex total = 0.0;
    for (Index m = 0; m < r; ++m) total += us[m] * f.sigma[m] * ws[m];
    report->imag_residual = std::abs(total.imag()) * grid.dx * grid.dv;
    report->max_imag_ratio = 0.0;
  }
  // Re(U S W^T) = [Re U, Im U] diag(S, S) [Re W, -Im W]^T
  MatrixXd ub(f.rows(), 2 * r);
  MatrixXd wb(f.cols(), 2 * r);
  VectorXd sb(2 * r);
  ub << f.u.real(), f.u.imag();
  wb << w.real(), -w.imag();
  sb << f.sigma, f.sigma;
  return recompress<double>(ub, sb, wb, r, 1e-14);
}

}  // namespace wigner
