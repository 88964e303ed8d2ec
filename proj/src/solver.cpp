#include "wigner/solver.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wigner/errors.hpp"
#include "wigner/poisson.hpp"
#include "wigner/wigner.hpp"

namespace wigner {

namespace {

constexpr std::uint64_t kStageAdvectFirst = 1;
constexpr std::uint64_t kStageFourier = 3;
constexpr std::uint64_t kStageAdvectSecond = 4;

SlOptions sl_options(const SolverConfig& cfg) {
  SlOptions opt;
  opt.order = cfg.weno_order;
  return opt;
}

CompressOptions compress_options(const SolverConfig& cfg, std::uint64_t seed) {
  CompressOptions opt;
  opt.eps_s = cfg.eps_s;
  opt.aca.eps_c = cfg.eps_c;
  opt.aca.stop = cfg.aca_stop;
  opt.aca.candidates = cfg.candidates;
  opt.aca.max_rank = cfg.max_rank;
  opt.aca.seed = seed;
  return opt;
}

}  // namespace

double SolverConfig::domain_length() const {
  if (lx) return *lx;
  return problem == Problem::TwoStream ? 4.0 * std::numbers::pi
                                       : 5.0 * std::numbers::pi;
}

double SolverConfig::velocity_bound() const {
  return lv ? *lv : 2.0 * std::numbers::pi;
}

PhaseSpaceGrid make_grid(const SolverConfig& cfg) {
  return build_grid(cfg.domain_length(), cfg.velocity_bound(), cfg.nx, cfg.nv);
}

InitialCondition init_distribution(Problem problem, const PhaseSpaceGrid& grid) {
  VectorXd gx(grid.nx);
  VectorXd hv(grid.nv);
  const double pi = std::numbers::pi;
  for (Index j = 0; j < grid.nv; ++j) {
    const double v = grid.v[j];
    hv[j] = problem == Problem::TwoStream
                ? v * v / std::sqrt(8.0 * pi) * std::exp(-0.5 * v * v)
                : std::exp(-0.5 * v * v) / std::sqrt(2.0 * pi);
  }
  for (Index i = 0; i < grid.nx; ++i) {
    const double x = grid.x[i];
    gx[i] = problem == Problem::TwoStream ? 2.0 + std::cos(0.5 * x)
                                          : 1.0 + 0.2 * std::cos(0.4 * x);
  }
  InitialCondition ic;
  const double ng = gx.norm();
  const double nh = hv.norm();
  ic.factors.u = gx / ng;
  ic.factors.v = hv / nh;
  ic.factors.sigma = VectorXd::Constant(1, ng * nh);
  ic.dense = gx * hv.transpose();
  return ic;
}

double timestep(double cfl, const PhaseSpaceGrid& grid) {
  return cfl * grid.dx / grid.lv;
}

double timestep(const SolverConfig& cfg, const PhaseSpaceGrid& grid) {
  if (cfg.dt) return *cfg.dt;
  if (cfg.cfl) return timestep(*cfg.cfl, grid);
  throw std::invalid_argument("timestep: neither dt nor cfl given");
}

void mass_correct(MatrixXd& f, const PhaseSpaceGrid& grid) {
  const double m = total_mass(f, grid);
  if (!(m > 0.0))
    throw NumericalError("mass correction: nonpositive total mass " +
                         std::to_string(m));
  f *= grid.lx / m;
}

void mass_correct(LowRankFactors<double>& f, const PhaseSpaceGrid& grid) {
  const double m = total_mass(f, grid);
  if (!(m > 0.0))
    throw NumericalError("mass correction: nonpositive total mass " +
                         std::to_string(m));
  f.sigma *= grid.lx / m;
}

AdvectionAccessor::AdvectionAccessor(const LowRankFactors<double>& f,
                                     double tau, const PhaseSpaceGrid& grid,
                                     const SlOptions& opt)
    : f_(&f), grid_(&grid), opt_(opt) {
  weighted_v_ = f.v * f.sigma.asDiagonal();
  sigma_.resize(static_cast<std::size_t>(grid.nv));
  for (Index j = 0; j < grid.nv; ++j) sigma_[j] = grid.v[j] * tau / grid.dx;
}

double AdvectionAccessor::entry(Index i, Index j) const {
  if (f_->rank() == 0) return 0.0;
  const CellShift c = cell_shift(sigma_[j]);
  const int t0 = -(opt_.order + 1) / 2;
  std::array<double, 6> h{};
  const Index b = i - c.offset;
  for (int q = t0; q <= -t0 - 1; ++q)
    h[static_cast<std::size_t>(q - t0)] =
        source(wrap_index(b + c.dir * q, grid_->nx), j);
  return sl_stencil_update(std::span<const double>(h.data(), opt_.order + 1),
                           c.s, opt_);
}

void AdvectionAccessor::column(Index j, VectorXd& out) const {
  out.resize(grid_->nx);
  if (f_->rank() == 0) {
    out.setZero();
    return;
  }
  const VectorXd src = f_->u * weighted_v_.row(j).transpose();
  sl_line(std::span<const double>(src.data(), src.size()),
          std::span<double>(out.data(), out.size()), sigma_[j], opt_);
}

void AdvectionAccessor::row(Index i, VectorXd& out) const {
  out.resize(grid_->nv);
  for (Index j = 0; j < grid_->nv; ++j) out[j] = entry(i, j);
}

StepReport step_full(MatrixXd& f, const SolverConfig& cfg,
                     const PhaseSpaceGrid& grid, double dt) {
  const SlOptions sl = sl_options(cfg);
  StepReport rep;
  MatrixXd half = sl_full(f, 0.5 * dt, grid, sl);
  rep.phi = solve_poisson(density_full(half, grid), grid);
  FourierStageReport fr;
  half = fourier_update_full(half, rep.phi, cfg.h, dt, grid, &fr);
  rep.imag_residual = fr.imag_residual;
  f = sl_full(half, 0.5 * dt, grid, sl);
  rep.mass_before_correction = total_mass(f, grid);
  mass_correct(f, grid);
  const Index full_rank = std::min(grid.nx, grid.nv);
  rep.stage_ranks = {full_rank, full_rank, full_rank};
  rep.cross_ranks = rep.stage_ranks;
  return rep;
}

StepReport step_adaptive(LowRankFactors<double>& f, const SolverConfig& cfg,
                         const PhaseSpaceGrid& grid, double dt,
                         std::uint64_t step_index) {
  const SlOptions sl = sl_options(cfg);
  StepReport rep;
  CompressStats cs;

  // Step 1: half-step advection.
  LowRankFactors<double> half;
  {
    const AdvectionAccessor acc(f, 0.5 * dt, grid, sl);
    half = compress(acc,
                    compress_options(cfg, stream_seed(cfg.seed, step_index,
                                                      kStageAdvectFirst)),
                    &cs);
    rep.stage_ranks[0] = half.rank();
    rep.cross_ranks[0] = cs.cross_rank;
    rep.hit_max_rank |= cs.aca.hit_max_rank;
  }

  // Step 2: potential.
  rep.phi = solve_poisson(density_lowrank(half, grid), grid);

  // Step 3: Fourier update with paired columns.
  LowRankFactors<double> updated;
  {
    const FourierFactors ff = to_fourier(half);
    const FourierUpdateAccessor acc(ff, rep.phi, cfg.h, dt, grid);
    CompressOptions opt =
        compress_options(cfg, stream_seed(cfg.seed, step_index, kStageFourier));
    opt.aca.pairing = true;
    opt.aca.pair_map.resize(static_cast<std::size_t>(grid.nv));
    for (Index j = 0; j < grid.nv; ++j)
      opt.aca.pair_map[j] = opposite_index(j, grid.nv);
    const LowRankFactors<Complex> spectral = compress(acc, opt, &cs);
    FourierStageReport fr;
    updated = from_fourier(spectral, grid, &fr);
    rep.imag_residual = fr.imag_residual;
    rep.stage_ranks[1] = updated.rank();
    rep.cross_ranks[1] = cs.cross_rank;
    rep.partners_skipped = cs.aca.partners_skipped;
    rep.hit_max_rank |= cs.aca.hit_max_rank;
  }

  // Step 4: second half-step advection.
  {
    const AdvectionAccessor acc(updated, 0.5 * dt, grid, sl);
    f = compress(acc,
                 compress_options(cfg, stream_seed(cfg.seed, step_index,
                                                   kStageAdvectSecond)),
                 &cs);
    rep.stage_ranks[2] = f.rank();
    rep.cross_ranks[2] = cs.cross_rank;
    rep.hit_max_rank |= cs.aca.hit_max_rank;
  }

  // Step 5: mass correction.
  rep.mass_before_correction = total_mass(f, grid);
  mass_correct(f, grid);
  return rep;
}

Simulation::Simulation(SolverConfig cfg)
    : cfg_(std::move(cfg)), grid_(make_grid(cfg_)) {
  if (!(cfg_.h > 0.0)) throw std::invalid_argument("simulation: H must be positive");
  if (cfg_.weno_order != 3 && cfg_.weno_order != 5)
    throw std::invalid_argument("simulation: weno_order must be 3 or 5");
  if (cfg_.threads > 0) set_num_threads(cfg_.threads);
  dt_ = timestep(cfg_, grid_);
  if (!(dt_ > 0.0)) throw std::invalid_argument("simulation: dt must be positive");
  InitialCondition ic = init_distribution(cfg_.problem, grid_);
  if (cfg_.mode == Mode::Full) {
    full_ = std::move(ic.dense);
    mass_correct(full_, grid_);
    p0_ = momentum(full_, grid_);
    p_norm_ = abs_velocity_moment(full_, grid_);
  } else {
    lr_ = std::move(ic.factors);
    mass_correct(lr_, grid_);
    p0_ = momentum(lr_, grid_);
    p_norm_ = abs_velocity_moment(lr_, grid_);
  }
  history_.push_back(measure(0.0));
}

bool Simulation::done() const {
  return !(t_ < cfg_.t_final - 1e-12 * std::max(1.0, cfg_.t_final));
}

const StepReport& Simulation::advance() {
  const double t_next =
      std::min(cfg_.t_final, static_cast<double>(step_ + 1) * dt_);
  const double dt = t_next - t_;
  if (cfg_.mode == Mode::Full) {
    last_ = step_full(full_, cfg_, grid_, dt);
  } else {
    last_ = step_adaptive(lr_, cfg_, grid_, dt, static_cast<std::uint64_t>(step_));
    if (last_.hit_max_rank) ++max_rank_hits_;
  }
  ++step_;
  t_ = t_next;
  history_.push_back(measure(last_.imag_residual));
  return last_;
}

MatrixXd Simulation::dense_solution() const {
  return cfg_.mode == Mode::Full ? full_ : lr_.expand();
}

DiagnosticsRecord Simulation::measure(double imag_residual) const {
  DiagnosticsRecord r;
  r.t = t_;
  VectorXd rho;
  VectorXd singular;
  bool have_singular = false;
  if (cfg_.mode == Mode::Full) {
    r.mass = total_mass(full_, grid_);
    r.momentum = momentum(full_, grid_);
    rho = density_full(full_, grid_);
    if (cfg_.svd_every > 0 && step_ % cfg_.svd_every == 0) {
      Eigen::BDCSVD<MatrixXd> svd(full_);
      singular = svd.singularValues();
      have_singular = true;
    }
  } else {
    r.mass = total_mass(lr_, grid_);
    r.momentum = momentum(lr_, grid_);
    rho = density_lowrank(lr_, grid_);
    singular = lr_.sigma;
    have_singular = true;
  }
  r.mass_rel_err = std::abs(r.mass - grid_.lx) / grid_.lx;
  r.momentum_err = std::abs(r.momentum - p0_) / p_norm_;
  const VectorXd e = electric_field(solve_poisson(rho, grid_), grid_);
  r.ee_norm = electrostatic_energy(e, grid_);
  if (have_singular) {
    if (cfg_.mode == Mode::Adaptive) {
      r.rank = static_cast<long>(singular.size());
    } else {
      long count = 0;
      for (Index m = 0; m < singular.size(); ++m)
        if (singular[m] >= cfg_.eps_s) ++count;
      r.rank = count;
    }
    for (std::size_t q = 0; q < kEnergyThresholds.size(); ++q)
      r.ranks_at_thresholds[q] = rank_at_energy(singular, kEnergyThresholds[q]);
  }
  r.imag_residual = imag_residual;
  return r;
}

void set_num_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace wigner
