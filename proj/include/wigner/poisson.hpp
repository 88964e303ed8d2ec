#pragma once

#include "wigner/grid.hpp"
#include "wigner/types.hpp"

namespace wigner {

template <typename Scalar>
struct LowRankFactors;

// Trapezoid weights in v (1/2 at both endpoints, 1 elsewhere), without dv.
VectorXd trapezoid_weights(Index nv);

// rho_i = dv * sum_j w_j F(i, j).
VectorXd density_full(const MatrixXd& f, const PhaseSpaceGrid& grid);
VectorXd density_lowrank(const LowRankFactors<double>& factors,
                         const PhaseSpaceGrid& grid);

// Periodic fourth-order FD solve of -phi'' = rho - 1 with zero-mean gauge.
// The operator is diagonalised by the DFT; the k = 0 mode is dropped.
VectorXd solve_poisson(const VectorXd& rho, const PhaseSpaceGrid& grid);

// E = -phi' with the fourth-order central difference.
VectorXd electric_field(const VectorXd& phi, const PhaseSpaceGrid& grid);

}  // namespace wigner
