#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wigner/lowrank.hpp"
#include "wigner/poisson.hpp"
#include "wigner/solver.hpp"

using namespace wigner;

namespace {

constexpr double pi = std::numbers::pi;

double max_phi_error(Index nx) {
  const double lx = 4 * pi;
  const auto g = build_grid(lx, 2 * pi, nx, 16);
  VectorXd rho(nx);
  for (Index i = 0; i < nx; ++i) rho[i] = 1.0 + std::cos(2 * pi * g.x[i] / lx);
  const VectorXd phi = solve_poisson(rho, g);
  double err = 0.0;
  const double a = (lx / (2 * pi)) * (lx / (2 * pi));
  for (Index i = 0; i < nx; ++i)
    err = std::max(err, std::abs(phi[i] - a * std::cos(2 * pi * g.x[i] / lx)));
  return err;
}

// -phi'' applied with the five-point fourth-order stencil.
VectorXd apply_stencil(const VectorXd& phi, double dx) {
  const Index n = phi.size();
  VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    auto at = [&](Index k) { return phi[((i + k) % n + n) % n]; };
    out[i] = -(-at(-2) / 12 + 4 * at(-1) / 3 - 2.5 * at(0) + 4 * at(1) / 3 -
               at(2) / 12) /
             (dx * dx);
  }
  return out;
}

}  // namespace

TEST(Density, ZeroAndConstant) {
  const auto g = build_grid(2 * pi, 3.0, 16, 20);
  EXPECT_EQ(density_full(MatrixXd::Zero(16, 20), g).cwiseAbs().maxCoeff(), 0.0);
  const VectorXd rho = density_full(MatrixXd::Ones(16, 20), g);
  for (Index i = 0; i < 16; ++i) EXPECT_NEAR(rho[i], 6.0, 1e-13);
  EXPECT_THROW(density_full(MatrixXd::Ones(16, 18), g), std::invalid_argument);
}

TEST(Density, TwoStreamInitialCondition) {
  const auto g = build_grid(4 * pi, 2 * pi, 256, 256);
  const auto ic = init_distribution(Problem::TwoStream, g);
  const VectorXd rho = density_full(ic.dense, g);
  // int v^2 exp(-v^2/2) dv / sqrt(8 pi) over the real line is 1/2; the
  // truncated tail beyond |v| = 2 pi is below 1e-7.
  for (Index i = 0; i < 256; ++i)
    EXPECT_NEAR(rho[i], 0.5 * (2 + std::cos(g.x[i] / 2)), 1e-6);
}

TEST(Density, LowRankMatchesDense) {
  const auto g = build_grid(2 * pi, 2.0, 64, 64);
  EXPECT_EQ(density_lowrank(LowRankFactors<double>::zero(64, 64), g)
                .cwiseAbs()
                .maxCoeff(),
            0.0);
  LowRankFactors<double> one{MatrixXd::Ones(64, 1), VectorXd::Ones(1),
                             MatrixXd::Ones(64, 1)};
  const VectorXd r1 = density_lowrank(one, g);
  for (Index i = 0; i < 64; ++i) EXPECT_NEAR(r1[i], 4.0, 1e-13);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  LowRankFactors<double> f{MatrixXd(64, 3), VectorXd(3), MatrixXd(64, 3)};
  for (Index k = 0; k < f.u.size(); ++k) f.u.data()[k] = n(rng);
  for (Index k = 0; k < f.v.size(); ++k) f.v.data()[k] = n(rng);
  f.sigma << 3.0, 2.0, 0.5;
  const VectorXd a = density_lowrank(f, g);
  const VectorXd b = density_full(f.expand(), g);
  EXPECT_LE((a - b).norm(), 1e-13 * b.norm());
}

TEST(Poisson, UniformDensityGivesZero) {
  const auto g = build_grid(4 * pi, 2 * pi, 64, 16);
  const VectorXd phi = solve_poisson(VectorXd::Ones(64), g);
  EXPECT_LE(phi.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Poisson, CosineSourceAndFourthOrder) {
  const double e32 = max_phi_error(32);
  const double e64 = max_phi_error(64);
  const double e128 = max_phi_error(128);
  EXPECT_LT(e64, 1e-3);
  EXPECT_GE(std::log2(e32 / e64), 3.7);
  EXPECT_GE(std::log2(e64 / e128), 3.7);
  EXPECT_NEAR(e32 / e64, 16.0, 1.0);
  EXPECT_NEAR(e64 / e128, 16.0, 1.0);
}

TEST(Poisson, StencilResidualAndGauge) {
  const auto g = build_grid(5 * pi, 2 * pi, 96, 16);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  VectorXd rho(96);
  for (auto& r : rho) r = u(rng);
  const VectorXd phi = solve_poisson(rho, g);
  EXPECT_LE(std::abs(phi.mean()), 1e-14);
  const VectorXd src = rho.array() - rho.mean();
  const VectorXd res = apply_stencil(phi, g.dx) - src;
  EXPECT_LE(res.cwiseAbs().maxCoeff(), 1e-12 * src.cwiseAbs().maxCoeff());
}

TEST(ElectricField, ZeroAndCosine) {
  const double lx = 4 * pi;
  EXPECT_EQ(electric_field(VectorXd::Zero(32), build_grid(lx, 1.0, 32, 8))
                .cwiseAbs()
                .maxCoeff(),
            0.0);
  double prev = 0.0;
  for (Index nx : {32, 64, 128}) {
    const auto g = build_grid(lx, 1.0, nx, 8);
    VectorXd phi(nx);
    for (Index i = 0; i < nx; ++i) phi[i] = std::cos(2 * pi * g.x[i] / lx);
    const VectorXd e = electric_field(phi, g);
    double err = 0.0;
    for (Index i = 0; i < nx; ++i)
      err = std::max(err, std::abs(e[i] - (2 * pi / lx) * std::sin(2 * pi * g.x[i] / lx)));
    if (prev > 0.0) EXPECT_GE(std::log2(prev / err), 3.7);
    prev = err;
  }
}

TEST(ElectricField, InvariantUnderConstantShift) {
  const auto g = build_grid(2 * pi, 1.0, 40, 8);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  VectorXd phi(40);
  for (auto& p : phi) p = n(rng);
  const VectorXd e1 = electric_field(phi, g);
  const VectorXd e2 = electric_field((phi.array() + 3.25).matrix(), g);
  EXPECT_LE((e1 - e2).cwiseAbs().maxCoeff(), 1e-13);
}
