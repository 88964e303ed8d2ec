#pragma once

#include <array>
#include <optional>
#include <vector>

#include "wigner/grid.hpp"
#include "wigner/lowrank.hpp"
#include "wigner/types.hpp"

namespace wigner {

inline constexpr std::array<double, 5> kEnergyThresholds = {
    0.95, 0.99, 0.9999, 0.999999, 0.99999999};

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double mass_rel_err = 0.0;
  double momentum = 0.0;
  double momentum_err = 0.0;
  double ee_norm = 0.0;
  long rank = -1;
  std::array<long, 5> ranks_at_thresholds{-1, -1, -1, -1, -1};
  double imag_residual = 0.0;
};

// Trapezoid in v, plain sum in x.
double total_mass(const MatrixXd& f, const PhaseSpaceGrid& grid);
double total_mass(const LowRankFactors<double>& f, const PhaseSpaceGrid& grid);

double momentum(const MatrixXd& f, const PhaseSpaceGrid& grid);
double momentum(const LowRankFactors<double>& f, const PhaseSpaceGrid& grid);

// Normaliser for momentum_err: sum_ij |v_j| f_ij w_j dx dv.
double abs_velocity_moment(const MatrixXd& f, const PhaseSpaceGrid& grid);
double abs_velocity_moment(const LowRankFactors<double>& f,
                           const PhaseSpaceGrid& grid);

// (sum_i E_i^2 dx)^(1/2)
double electrostatic_energy(const VectorXd& e, const PhaseSpaceGrid& grid);

// Smallest r with sum_{m<=r} s_m^2 >= fraction * sum s_m^2. Zero spectrum: 0.
long rank_at_energy(const VectorXd& singular_values, double fraction);

// |sum_ij Im f_ij w_j| dx dv, trapezoid weights w in v
double imaginary_residual(const MatrixXcd& f, const PhaseSpaceGrid& grid);

// Damping rate from local maxima of ee inside [t0, t1]: minus the slope of
// the least-squares line through (t_peak, log ee_peak). Needs >= 3 peaks.
std::optional<double> fit_damping_rate(const std::vector<double>& t,
                                       const std::vector<double>& ee,
                                       double t0, double t1);

}  // namespace wigner
