#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wigner/advection.hpp"
#include "wigner/diagnostics.hpp"
#include "wigner/grid.hpp"
#include "wigner/lowrank.hpp"
#include "wigner/types.hpp"

namespace wigner {

enum class Problem { TwoStream, Landau };
enum class Mode { Full, Adaptive };

struct SolverConfig {
  Problem problem = Problem::TwoStream;
  double h = 1.0;
  Index nx = 0;
  Index nv = 0;
  std::optional<double> lx;  // defaults per problem
  std::optional<double> lv;
  std::optional<double> cfl;
  std::optional<double> dt;
  double t_final = 0.0;
  Mode mode = Mode::Adaptive;
  int weno_order = 5;
  double eps_c = 1e-4;
  AcaStop aca_stop = AcaStop::Absolute;
  double eps_s = 1e-3;
  int candidates = 12;
  Index max_rank = 0;  // 0: min(nx, nv)
  std::uint64_t seed = 0;
  long snapshot_every = 0;  // 0: initial and final snapshot only
  double fit_t0 = 0.0;
  double fit_t1 = 20.0;
  // Full mode only: dense singular values every k steps (0 disables).
  long svd_every = 0;
  int threads = 0;  // 0: runtime default
  std::string out;

  double domain_length() const;
  double velocity_bound() const;

  bool operator==(const SolverConfig&) const = default;
};

PhaseSpaceGrid make_grid(const SolverConfig& cfg);

struct InitialCondition {
  LowRankFactors<double> factors;  // exact rank-1 separable form
  MatrixXd dense;
};

InitialCondition init_distribution(Problem problem, const PhaseSpaceGrid& grid);

// dt = cfl * dx / max|v|, max|v| = Lv.
double timestep(double cfl, const PhaseSpaceGrid& grid);
double timestep(const SolverConfig& cfg, const PhaseSpaceGrid& grid);

// Rescale so that total_mass == Lx. Throws NumericalError on mass <= 0.
void mass_correct(MatrixXd& f, const PhaseSpaceGrid& grid);
void mass_correct(LowRankFactors<double>& f, const PhaseSpaceGrid& grid);

// Low-rank source advected by tau along x, sampled entry/row/column-wise.
class AdvectionAccessor {
 public:
  using Scalar = double;

  AdvectionAccessor(const LowRankFactors<double>& f, double tau,
                    const PhaseSpaceGrid& grid, const SlOptions& opt);

  Index rows() const { return grid_->nx; }
  Index cols() const { return grid_->nv; }
  double entry(Index i, Index j) const;
  void column(Index j, VectorXd& out) const;
  void row(Index i, VectorXd& out) const;

 private:
  double source(Index k, Index j) const {
    return f_->u.row(k).dot(weighted_v_.row(j));
  }

  const LowRankFactors<double>* f_;
  const PhaseSpaceGrid* grid_;
  SlOptions opt_;
  MatrixXd weighted_v_;  // v * diag(sigma)
  std::vector<double> sigma_;  // cell shift per column
};

struct StepReport {
  VectorXd phi;  // potential at the half step
  double imag_residual = 0.0;
  double mass_before_correction = 0.0;
  // Ranks after stages 1, 3, 4 (adaptive) and cross ranks before truncation.
  std::array<Index, 3> stage_ranks{0, 0, 0};
  std::array<Index, 3> cross_ranks{0, 0, 0};
  Index partners_skipped = 0;
  bool hit_max_rank = false;
};

StepReport step_full(MatrixXd& f, const SolverConfig& cfg,
                     const PhaseSpaceGrid& grid, double dt);

StepReport step_adaptive(LowRankFactors<double>& f, const SolverConfig& cfg,
                         const PhaseSpaceGrid& grid, double dt,
                         std::uint64_t step_index);

// Time loop state for either mode, with per-step diagnostics.
class Simulation {
 public:
  explicit Simulation(SolverConfig cfg);

  const SolverConfig& config() const { return cfg_; }
  const PhaseSpaceGrid& grid() const { return grid_; }
  double time() const { return t_; }
  long steps_taken() const { return step_; }
  double nominal_dt() const { return dt_; }
  bool done() const;

  // Advances one step (the last one is shortened to land on t_final).
  const StepReport& advance();

  MatrixXd dense_solution() const;
  const LowRankFactors<double>& factors() const { return lr_; }
  const MatrixXd& full_solution() const { return full_; }
  const std::vector<DiagnosticsRecord>& history() const { return history_; }
  // Number of stages that reached max_rank so far.
  long max_rank_hits() const { return max_rank_hits_; }

 private:
  DiagnosticsRecord measure(double imag_residual) const;

  SolverConfig cfg_;
  PhaseSpaceGrid grid_;
  double dt_ = 0.0;
  double t_ = 0.0;
  long step_ = 0;
  MatrixXd full_;
  LowRankFactors<double> lr_;
  double p0_ = 0.0;
  double p_norm_ = 1.0;
  StepReport last_;
  std::vector<DiagnosticsRecord> history_;
  long max_rank_hits_ = 0;
};

void set_num_threads(int n);

}  // namespace wigner
