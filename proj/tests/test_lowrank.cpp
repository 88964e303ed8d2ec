#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wigner/lowrank.hpp"
#include "wigner/solver.hpp"
#include "wigner/wigner.hpp"

using namespace wigner;

namespace {

MatrixXd orthonormal(Index n, Index r, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  MatrixXd a(n, r);
  for (Index k = 0; k < a.size(); ++k) a.data()[k] = nd(rng);
  Eigen::HouseholderQR<MatrixXd> qr(a);
  return qr.householderQ() * MatrixXd::Identity(n, r);
}

MatrixXd with_spectrum(Index n, const VectorXd& s, std::mt19937_64& rng) {
  const MatrixXd u = orthonormal(n, s.size(), rng);
  const MatrixXd v = orthonormal(n, s.size(), rng);
  return u * s.asDiagonal() * v.transpose();
}

std::vector<Index> opposite_map(Index n) {
  std::vector<Index> m(n);
  for (Index j = 0; j < n; ++j) m[j] = opposite_index(j, n);
  return m;
}

// Rows are DFTs of a real low-rank matrix: A(:, j) = conj(A(:, opp(j))).
MatrixXcd conjugate_symmetric_columns(Index nx, Index nv, Index r, std::mt19937_64& rng) {
  VectorXd s(r);
  for (Index m = 0; m < r; ++m) s[m] = std::pow(0.5, static_cast<double>(m));
  const MatrixXd real = orthonormal(nx, r, rng) * s.asDiagonal() * orthonormal(nv, r, rng).transpose();
  return dft_columns(MatrixXd(real.transpose())).transpose();
}

}  // namespace

TEST(Aca, RankOne) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  VectorXd u(40), v(30);
  for (auto& x : u) x = n(rng);
  for (auto& x : v) x = n(rng);
  const MatrixXd a = u * v.transpose();
  DenseAccessor<double> acc(a);
  AcaOptions opt;
  opt.seed = 7;
  const auto cross = aca(acc, opt);
  EXPECT_GE(cross.rank(), 1);
  EXPECT_LE(cross.rank(), 2);
  EXPECT_LE((cross.expand() - a).norm(), 1e-12 * a.norm());
  for (Index l = 0; l < cross.rank(); ++l) EXPECT_NE(cross.pivots[l], 0.0);
}

TEST(Aca, ZeroMatrix) {
  const MatrixXd a = MatrixXd::Zero(20, 20);
  DenseAccessor<double> acc(a);
  EXPECT_EQ(aca(acc, {}).rank(), 0);
  EXPECT_EQ(compress(acc, {}).rank(), 0);
}

TEST(Aca, ExactRankFive) {
  std::mt19937_64 rng(2);
  VectorXd s(5);
  s << 5.0, 3.0, 2.0, 1.0, 0.5;
  const MatrixXd a = with_spectrum(64, s, rng);
  DenseAccessor<double> acc(a);
  for (AcaStop stop : {AcaStop::Absolute, AcaStop::Relative}) {
    AcaOptions opt;
    opt.stop = stop;
    opt.seed = 3;
    const auto cross = aca(acc, opt);
    EXPECT_LE(cross.rank(), 8);
    EXPECT_LE((cross.expand() - a).norm(), opt.eps_c * a.norm());
  }
}

TEST(Aca, InterpolatesSelectedRowsAndColumns) {
  std::mt19937_64 rng(4);
  VectorXd s(20);
  for (Index m = 0; m < 20; ++m) s[m] = std::pow(0.6, static_cast<double>(m));
  const MatrixXd a = with_spectrum(80, s, rng);
  DenseAccessor<double> acc(a);
  for (Index cap : {1, 3, 6, 10}) {
    AcaOptions opt;
    opt.max_rank = cap;
    opt.eps_c = 0.0;
    AcaStats st;
    const auto cross = aca(acc, opt, &st);
    EXPECT_EQ(cross.rank(), cap);
    EXPECT_TRUE(st.hit_max_rank);
    const MatrixXd ak = cross.expand();
    for (Index i : cross.rows) EXPECT_LE((ak.row(i) - a.row(i)).cwiseAbs().maxCoeff(), 1e-13);
    for (Index j : cross.cols) EXPECT_LE((ak.col(j) - a.col(j)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Aca, EntryEvaluationsLinearInSize) {
  std::mt19937_64 rng(5);
  VectorXd s(4);
  s << 1.0, 0.5, 0.25, 0.125;
  const MatrixXd a = with_spectrum(256, s, rng);
  DenseAccessor<double> acc(a);
  AcaStats st;
  const auto cross = aca(acc, {}, &st);
  EXPECT_LE(st.entry_evaluations, (cross.rank() + 4) * (3 * 256 + 12));
}

TEST(Aca, DeterministicForFixedSeed) {
  std::mt19937_64 rng(6);
  VectorXd s(12);
  for (Index m = 0; m < 12; ++m) s[m] = std::pow(0.3, static_cast<double>(m));
  const MatrixXd a = with_spectrum(64, s, rng);
  DenseAccessor<double> acc(a);
  AcaOptions opt;
  opt.seed = 99;
  const auto c1 = aca(acc, opt);
  const auto c2 = aca(acc, opt);
  EXPECT_EQ(c1.rows, c2.rows);
  EXPECT_EQ(c1.cols, c2.cols);
  EXPECT_TRUE((c1.col_stack.array() == c2.col_stack.array()).all());
  EXPECT_NE(stream_seed(1, 2, 3), stream_seed(1, 2, 4));
  EXPECT_NE(stream_seed(1, 2, 3), stream_seed(1, 3, 3));
  EXPECT_EQ(stream_seed(1, 2, 3), stream_seed(1, 2, 3));
}

TEST(Aca, PairingKeepsColumnConjugateSymmetry) {
  std::mt19937_64 rng(8);
  const Index nv = 32;
  const MatrixXcd a = conjugate_symmetric_columns(48, nv, 6, rng);
  for (Index j = 0; j < nv; ++j)
    ASSERT_LE((a.col(j) - a.col(opposite_index(j, nv)).conjugate()).norm(), 1e-12);
  DenseAccessor<Complex> acc(a);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    AcaOptions opt;
    opt.pairing = true;
    opt.pair_map = opposite_map(nv);
    opt.seed = seed;
    opt.eps_c = 1e-3;
    const auto cross = aca(acc, opt);
    const MatrixXcd ak = cross.expand();
    for (Index j = 0; j < nv; ++j)
      EXPECT_LE((ak.col(j) - ak.col(opposite_index(j, nv)).conjugate()).cwiseAbs().maxCoeff(), 1e-12);

    CompressOptions co;
    co.aca = opt;
    const auto lr = compress(acc, co);
    const MatrixXcd e = lr.expand();
    for (Index j = 0; j < nv; ++j)
      EXPECT_LE((e.col(j) - e.col(opposite_index(j, nv)).conjugate()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Aca, PairingNeedsMap) {
  const MatrixXd a = MatrixXd::Ones(4, 4);
  DenseAccessor<double> acc(a);
  AcaOptions opt;
  opt.pairing = true;
  EXPECT_THROW(aca(acc, opt), std::invalid_argument);
}

TEST(SvdTruncate, RankOneCross) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  VectorXd u(30), v(25);
  for (auto& x : u) x = n(rng);
  for (auto& x : v) x = n(rng);
  const MatrixXd a = u * v.transpose();
  DenseAccessor<double> acc(a);
  const auto lr = svd_truncate(aca(acc, {}), 1e-3);
  ASSERT_EQ(lr.rank(), 1);
  EXPECT_NEAR(lr.sigma[0], u.norm() * v.norm(), 1e-12 * u.norm() * v.norm());
}

TEST(SvdTruncate, DependentStacks) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n;
  CrossFactors<double> cross;
  cross.n_rows = 20;
  cross.n_cols = 15;
  cross.rows = {0, 1, 2};
  cross.cols = {0, 1, 2};
  VectorXd c(20);
  for (auto& x : c) x = n(rng);
  cross.col_stack.resize(20, 3);
  cross.col_stack << c, c, c;
  cross.row_stack.resize(3, 15);
  for (Index k = 0; k < cross.row_stack.size(); ++k) cross.row_stack.data()[k] = n(rng);
  cross.pivots = VectorXd::Ones(3);
  const auto lr = svd_truncate(cross, 1e-3);
  EXPECT_LT(lr.rank(), 3);
  EXPECT_EQ(lr.rank(), 1);
  EXPECT_LE((lr.u.transpose() * lr.u - MatrixXd::Identity(lr.rank(), lr.rank())).norm(), 1e-12);
  EXPECT_LE((lr.v.transpose() * lr.v - MatrixXd::Identity(lr.rank(), lr.rank())).norm(), 1e-12);
  EXPECT_LE((lr.expand() - cross.expand()).norm(), std::sqrt(3.0) * 1e-3);
  EXPECT_EQ(svd_truncate(CrossFactors<double>{}, 1e-3).rank(), 0);
}

TEST(SvdTruncate, MatchesDenseSpectrum) {
  std::mt19937_64 rng(11);
  VectorXd s(5);
  s << 4.0, 2.0, 1.0, 0.1, 0.01;
  const MatrixXd a = with_spectrum(64, s, rng);
  DenseAccessor<double> acc(a);
  AcaOptions opt;
  opt.eps_c = 1e-12;
  const auto cross = aca(acc, opt);
  const auto lr = svd_truncate(cross, 1e-3);
  ASSERT_EQ(lr.rank(), 5);
  const VectorXd dense = Eigen::BDCSVD<MatrixXd>(a).singularValues();
  for (Index m = 0; m < 5; ++m) EXPECT_NEAR(lr.sigma[m], dense[m], 1e-10);
  for (Index m = 1; m < 5; ++m) EXPECT_GE(lr.sigma[m - 1], lr.sigma[m]);
  EXPECT_LE((lr.expand() - cross.expand()).norm(), std::sqrt(static_cast<double>(cross.rank())) * 1e-3);
}

TEST(Compress, GeometricSpectrum) {
  std::mt19937_64 rng(12);
  VectorXd s(10);
  for (Index m = 0; m < 10; ++m) s[m] = std::pow(10.0, -static_cast<double>(m + 1));
  const MatrixXd a = with_spectrum(512, s, rng);
  DenseAccessor<double> acc(a);
  CompressOptions opt;
  opt.aca.eps_c = 1e-8;
  const auto lr = compress(acc, opt);
  EXPECT_GE(lr.rank(), 2);
  EXPECT_LE(lr.rank(), 3);
  for (Index m = 0; m < lr.rank(); ++m) EXPECT_NEAR(lr.sigma[m], s[m], 1e-9);
}

TEST(Compress, SeparableInitialConditionIsRankOne) {
  const auto g = build_grid(4 * std::numbers::pi, 2 * std::numbers::pi, 128, 128);
  const auto ic = init_distribution(Problem::TwoStream, g);
  auto acc = make_entry_accessor<double>(128, 128, [&](Index i, Index j) { return ic.dense(i, j); });
  const auto lr = compress(acc, {});
  EXPECT_EQ(lr.rank(), 1);
  EXPECT_LE((lr.expand() - ic.dense).norm(), 1e-12 * ic.dense.norm());
}

TEST(Recompress, OrthonormalAndCapped) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n;
  MatrixXd u(30, 6), v(20, 6);
  for (Index k = 0; k < u.size(); ++k) u.data()[k] = n(rng);
  for (Index k = 0; k < v.size(); ++k) v.data()[k] = n(rng);
  VectorXd s = VectorXd::Ones(6);
  const MatrixXd dense = u * v.transpose();
  const auto full = recompress<double>(u, s, v, 10, 1e-14);
  EXPECT_EQ(full.rank(), 6);
  EXPECT_LE((full.expand() - dense).norm(), 1e-12 * dense.norm());
  const auto capped = recompress<double>(u, s, v, 2, 1e-14);
  EXPECT_EQ(capped.rank(), 2);
  const VectorXd ds = Eigen::BDCSVD<MatrixXd>(dense).singularValues();
  EXPECT_NEAR(capped.sigma[1], ds[1], 1e-10 * ds[0]);
}

TEST(EvaluateEntry, Cases) {
  EXPECT_EQ(evaluate_entry(LowRankFactors<double>::zero(5, 5), 2, 3), 0.0);
  LowRankFactors<double> e{MatrixXd::Zero(6, 1), VectorXd::Constant(1, 2.5), MatrixXd::Zero(7, 1)};
  e.u(2, 0) = 1.0;
  e.v(4, 0) = 1.0;
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 7; ++j) EXPECT_EQ(evaluate_entry(e, i, j), i == 2 && j == 4 ? 2.5 : 0.0);

  std::mt19937_64 rng(14);
  LowRankFactors<double> f{orthonormal(40, 4, rng), VectorXd(4), orthonormal(30, 4, rng)};
  f.sigma << 3.0, 2.0, 1.0, 0.5;
  const MatrixXd d = f.expand();
  for (int t = 0; t < 100; ++t) {
    const Index i = static_cast<Index>(rng() % 40), j = static_cast<Index>(rng() % 30);
    EXPECT_NEAR(evaluate_entry(f, i, j), d(i, j), 1e-13);
  }
}
