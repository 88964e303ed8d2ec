#pragma once

#include "wigner/grid.hpp"
#include "wigner/lowrank.hpp"
#include "wigner/types.hpp"

namespace wigner {

// Fifth-order WENO interpolation of a periodic nodal field at xq. Uses the
// five nodes around the nearest grid node and three quadratic substencils.
double interpolate_potential(const VectorXd& phi, double xq,
                             const PhaseSpaceGrid& grid);

// Frozen-field Wigner step parameters.
struct WignerStep {
  const VectorXd* phi = nullptr;
  double h = 1.0;   // dimensionless Planck constant
  double dt = 0.0;
};

// g^{x_i}(k_v(j)) = exp(i/H [phi(x_i + H k_v/2) - phi(x_i - H k_v/2)] dt),
// j a DFT bin (DC first).
Complex phase_multiplier(const VectorXd& phi, double h, double dt, Index i,
                         Index j, const PhaseSpaceGrid& grid);

// Phase multipliers for a whole column (fixed bin j) or row (fixed node i).
void phase_column(const WignerStep& step, Index j, const PhaseSpaceGrid& grid,
                  VectorXcd& out);
void phase_row(const WignerStep& step, Index i, const PhaseSpaceGrid& grid,
               VectorXcd& out);

struct FourierStageReport {
  // |sum_ij Im f_ij w_j| dx dv after the inverse transform, before it is
  // dropped. w: trapezoid weights in v.
  double imag_residual = 0.0;
  // Largest |Im f_ij| relative to max |f_ij|.
  double max_imag_ratio = 0.0;
};

// Row-wise DFT in v, multiply by g, zero the Nyquist bin, inverse DFT, keep
// the real part.
MatrixXd fourier_update_full(const MatrixXd& f, const VectorXd& phi, double h,
                             double dt, const PhaseSpaceGrid& grid,
                             FourierStageReport* report = nullptr);

// Column-wise forward (unnormalised) and inverse (1/N) DFT.
MatrixXcd dft_columns(const MatrixXd& v);
MatrixXcd dft_columns(const MatrixXcd& v);
MatrixXcd idft_columns(const MatrixXcd& vt);

// Real U, real sigma, complex V-tilde: the Fourier-space image of a real
// low-rank solution.
struct FourierFactors {
  MatrixXd u;
  VectorXd sigma;
  MatrixXcd vt;

  Index rank() const { return sigma.size(); }
};

FourierFactors to_fourier(const LowRankFactors<double>& f);

Complex fourier_entry(const FourierFactors& factors, const VectorXd& phi,
                      double h, double dt, Index i, Index j,
                      const PhaseSpaceGrid& grid);

// Matrix accessor over the updated Fourier-space solution, for ACA.
class FourierUpdateAccessor {
 public:
  using Scalar = Complex;

  FourierUpdateAccessor(const FourierFactors& factors, const VectorXd& phi,
                        double h, double dt, const PhaseSpaceGrid& grid);

  Index rows() const { return grid_->nx; }
  Index cols() const { return grid_->nv; }
  Complex entry(Index i, Index j) const;
  void column(Index j, VectorXcd& out) const;
  void row(Index i, VectorXcd& out) const;

 private:
  const FourierFactors* factors_;
  const PhaseSpaceGrid* grid_;
  WignerStep step_;
  MatrixXcd weighted_vt_;  // vt * diag(sigma)
};

// Back to velocity space: inverse DFT of V-tilde, imaginary residue measured,
// real part recompressed into orthonormal real factors of rank <= r.
LowRankFactors<double> from_fourier(const LowRankFactors<Complex>& f,
                                    const PhaseSpaceGrid& grid,
                                    FourierStageReport* report = nullptr);

}  // namespace wigner
