#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/SVD>

#include "wigner/types.hpp"

namespace wigner {

// A = u * diag(sigma) * v^T (plain transpose, no conjugation).
template <typename Scalar>
struct LowRankFactors {
  Matrix<Scalar> u;
  VectorXd sigma;
  Matrix<Scalar> v;

  Index rank() const { return sigma.size(); }
  Index rows() const { return u.rows(); }
  Index cols() const { return v.rows(); }

  static LowRankFactors zero(Index rows, Index cols) {
    return {Matrix<Scalar>(rows, 0), VectorXd(0), Matrix<Scalar>(cols, 0)};
  }

  Scalar operator()(Index i, Index j) const {
    Scalar acc{0};
    for (Index m = 0; m < rank(); ++m) acc += u(i, m) * sigma[m] * v(j, m);
    return acc;
  }

  Matrix<Scalar> expand() const {
    if (rank() == 0) return Matrix<Scalar>::Zero(rows(), cols());
    return u * sigma.template cast<Scalar>().asDiagonal() * v.transpose();
  }
};

template <typename Scalar>
Scalar evaluate_entry(const LowRankFactors<Scalar>& f, Index i, Index j) {
  return f(i, j);
}

// Output of adaptive cross approximation. Column l of col_stack is the
// residual column R_{l-1}(:, cols[l]), row l of row_stack the residual row
// R_{l-1}(rows[l], :), and pivots[l] = R_{l-1}(rows[l], cols[l]).
template <typename Scalar>
struct CrossFactors {
  Index n_rows = 0;
  Index n_cols = 0;
  std::vector<Index> rows;
  std::vector<Index> cols;
  Matrix<Scalar> col_stack;
  Matrix<Scalar> row_stack;
  Vector<Scalar> pivots;

  Index rank() const { return static_cast<Index>(rows.size()); }

  Matrix<Scalar> expand() const {
    if (rank() == 0) return Matrix<Scalar>::Zero(n_rows, n_cols);
    return col_stack * pivots.cwiseInverse().asDiagonal() * row_stack;
  }
};

template <typename A>
concept MatrixAccessor = requires(const A& a, Index i, Index j,
                                  Vector<typename A::Scalar>& out) {
  typename A::Scalar;
  { a.rows() } -> std::convertible_to<Index>;
  { a.cols() } -> std::convertible_to<Index>;
  { a.entry(i, j) } -> std::convertible_to<typename A::Scalar>;
  a.column(j, out);
  a.row(i, out);
};

// Wraps an (i, j) -> value callable; rows and columns are filled entrywise.
template <typename S, typename F>
class EntryAccessor {
 public:
  using Scalar = S;
  EntryAccessor(Index rows, Index cols, F f)
      : rows_(rows), cols_(cols), f_(std::move(f)) {}
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Scalar entry(Index i, Index j) const { return f_(i, j); }
  void column(Index j, Vector<Scalar>& out) const {
    out.resize(rows_);
    for (Index i = 0; i < rows_; ++i) out[i] = f_(i, j);
  }
  void row(Index i, Vector<Scalar>& out) const {
    out.resize(cols_);
    for (Index j = 0; j < cols_; ++j) out[j] = f_(i, j);
  }

 private:
  Index rows_;
  Index cols_;
  F f_;
};

template <typename S, typename F>
EntryAccessor<S, F> make_entry_accessor(Index rows, Index cols, F f) {
  return EntryAccessor<S, F>(rows, cols, std::move(f));
}

template <typename S>
class DenseAccessor {
 public:
  using Scalar = S;
  explicit DenseAccessor(const Matrix<S>& m) : m_(&m) {}
  Index rows() const { return m_->rows(); }
  Index cols() const { return m_->cols(); }
  Scalar entry(Index i, Index j) const { return (*m_)(i, j); }
  void column(Index j, Vector<S>& out) const { out = m_->col(j); }
  void row(Index i, Vector<S>& out) const { out = m_->row(i).transpose(); }

 private:
  const Matrix<S>* m_;
};

enum class AcaStop { Absolute, Relative };

struct AcaOptions {
  double eps_c = 1e-4;
  // Absolute: stop once ||update||_F < eps_c. Relative: once
  // ||update||_F < eps_c * ||A_k||_F.
  AcaStop stop = AcaStop::Absolute;
  int candidates = 12;
  Index max_rank = 0;  // 0: min(rows, cols)
  std::uint64_t seed = 0;
  bool pairing = false;
  // pair_map[j] is the column processed right after j when pairing is on.
  std::vector<Index> pair_map;
};

struct AcaStats {
  Index entry_evaluations = 0;
  Index partners_skipped = 0;
  bool hit_max_rank = false;
};

// Independent RNG stream per (run seed, step, stage).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t step,
                          std::uint64_t stage);

namespace detail {

template <typename S>
double magnitude(const S& x) {
  return std::abs(x);
}

// Index set supporting O(1) removal and uniform sampling.
class ActiveSet {
 public:
  explicit ActiveSet(Index n) : items_(n), where_(n) {
    for (Index i = 0; i < n; ++i) items_[i] = where_[i] = i;
  }
  bool contains(Index i) const { return where_[i] >= 0; }
  bool empty() const { return items_.empty(); }
  Index size() const { return static_cast<Index>(items_.size()); }
  Index sample(std::mt19937_64& rng) const {
    return items_[static_cast<std::size_t>(rng() % items_.size())];
  }
  void remove(Index i) {
    const Index pos = where_[i];
    if (pos < 0) return;
    const Index last = items_.back();
    items_[pos] = last;
    where_[last] = pos;
    items_.pop_back();
    where_[i] = -1;
  }

 private:
  std::vector<Index> items_;
  std::vector<Index> where_;
};

template <typename S>
Index argmax_active(const Vector<S>& x, const ActiveSet& active) {
  Index best = -1;
  double best_val = -1.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (!active.contains(i)) continue;
    const double m = magnitude(x[i]);
    if (m > best_val) {
      best_val = m;
      best = i;
    }
  }
  return best;
}

}  // namespace detail

// Adaptive cross approximation with random candidate sampling, one column
// then one row greedy refinement, and rank-one residual updates. With
// pairing on, every selected column j is followed by pair_map[j].
template <MatrixAccessor Acc>
CrossFactors<typename Acc::Scalar> aca(const Acc& a, const AcaOptions& opt,
                                       AcaStats* stats = nullptr) {
  using S = typename Acc::Scalar;
  const Index nr = a.rows();
  const Index nc = a.cols();
  const Index max_rank =
      opt.max_rank > 0 ? std::min(opt.max_rank, std::min(nr, nc)) : std::min(nr, nc);

  if (opt.pairing && static_cast<Index>(opt.pair_map.size()) != nc)
    throw std::invalid_argument("aca: pairing needs a pair map over all columns");

  AcaStats local;
  AcaStats& st = stats ? *stats : local;
  st = AcaStats{};

  std::vector<Vector<S>> cols;  // residual columns c_l
  std::vector<Vector<S>> rows;  // residual rows r_l
  std::vector<S> pivots;
  std::vector<Index> row_idx;
  std::vector<Index> col_idx;
  std::vector<Vector<S>> scaled;  // c_l / p_l

  detail::ActiveSet free_rows(nr);
  detail::ActiveSet free_cols(nc);
  std::mt19937_64 rng(opt.seed);

  auto residual_column = [&](Index j, Vector<S>& out) {
    a.column(j, out);
    st.entry_evaluations += nr;
    for (std::size_t l = 0; l < rows.size(); ++l) out -= scaled[l] * rows[l][j];
  };
  auto residual_row = [&](Index i, Vector<S>& out) {
    a.row(i, out);
    st.entry_evaluations += nc;
    for (std::size_t l = 0; l < rows.size(); ++l) out -= scaled[l][i] * rows[l];
  };
  auto residual_entry = [&](Index i, Index j) {
    S val = a.entry(i, j);
    ++st.entry_evaluations;
    for (std::size_t l = 0; l < rows.size(); ++l) val -= scaled[l][i] * rows[l][j];
    return val;
  };

  double frob2 = 0.0;
  double max_pivot = 0.0;
  auto is_zero = [&](double m) {
    return max_pivot == 0.0 ? !(m > 0.0) : m <= 1e-13 * max_pivot;
  };
  // Appends a rank-one term and returns its Frobenius norm squared.
  auto push = [&](Index i, Index j, Vector<S>&& c, Vector<S>&& r) {
    const S p = r[j];
    Vector<S> u = c / p;
    const double uu = u.squaredNorm();
    const double rr = r.squaredNorm();
    double cross = 0.0;
    for (std::size_t l = 0; l < rows.size(); ++l)
      cross += std::real(scaled[l].dot(u) * rows[l].dot(r));
    frob2 += uu * rr + 2.0 * cross;
    max_pivot = std::max(max_pivot, detail::magnitude(p));
    cols.push_back(std::move(c));
    rows.push_back(std::move(r));
    scaled.push_back(std::move(u));
    pivots.push_back(p);
    row_idx.push_back(i);
    col_idx.push_back(j);
    free_rows.remove(i);
    free_cols.remove(j);
    return uu * rr;
  };

  Vector<S> col;
  Vector<S> row;
  int failures = 0;
  while (static_cast<Index>(pivots.size()) < max_rank && !free_rows.empty() &&
         !free_cols.empty()) {
    // Phase I: best of p random candidates, then column and row refinement.
    Index jstar = -1;
    double best = -1.0;
    for (int c = 0; c < opt.candidates; ++c) {
      const Index i = free_rows.sample(rng);
      const Index j = free_cols.sample(rng);
      const double m = detail::magnitude(residual_entry(i, j));
      if (m > best) {
        best = m;
        jstar = j;
      }
    }
    residual_column(jstar, col);
    const Index ik = detail::argmax_active(col, free_rows);
    if (is_zero(detail::magnitude(col[ik]))) {
      free_cols.remove(jstar);
      if (++failures >= 3) break;
      continue;
    }
    residual_row(ik, row);
    const Index jk = detail::argmax_active(row, free_cols);
    if (is_zero(detail::magnitude(row[jk]))) {
      free_cols.remove(jstar);
      if (++failures >= 3) break;
      continue;
    }
    failures = 0;
    if (jk != jstar) residual_column(jk, col);

    // Phase II: rank-one update.
    double update2 = push(ik, jk, std::move(col), std::move(row));
    col = Vector<S>();
    row = Vector<S>();

    if (opt.pairing) {
      const Index jo = opt.pair_map[static_cast<std::size_t>(jk)];
      if (jo != jk && free_cols.contains(jo)) {
        residual_column(jo, col);
        const Index io = detail::argmax_active(col, free_rows);
        if (io < 0 || is_zero(detail::magnitude(col[io]))) {
          free_cols.remove(jo);
          ++st.partners_skipped;
        } else {
          residual_row(io, row);
          update2 += push(io, jo, std::move(col), std::move(row));
          col = Vector<S>();
          row = Vector<S>();
        }
      }
    }

    const double scale =
        opt.stop == AcaStop::Relative ? std::sqrt(std::max(frob2, 0.0)) : 1.0;
    if (std::sqrt(update2) < opt.eps_c * scale) break;
  }
  st.hit_max_rank = static_cast<Index>(pivots.size()) >= max_rank &&
                    max_rank < std::min(nr, nc);

  CrossFactors<S> out;
  out.n_rows = nr;
  out.n_cols = nc;
  out.rows = row_idx;
  out.cols = col_idx;
  const Index k = static_cast<Index>(pivots.size());
  out.col_stack.resize(nr, k);
  out.row_stack.resize(k, nc);
  out.pivots.resize(k);
  for (Index l = 0; l < k; ++l) {
    out.col_stack.col(l) = cols[l];
    out.row_stack.row(l) = rows[l].transpose();
    out.pivots[l] = pivots[l];
  }
  return out;
}

// QR of both stacks, SVD of the k x k core, truncation at the smallest r_s
// with sigma_{r_s + 1} < eps_s.
template <typename S>
LowRankFactors<S> svd_truncate(const CrossFactors<S>& cross, double eps_s) {
  const Index k = cross.rank();
  if (k == 0) return LowRankFactors<S>::zero(cross.n_rows, cross.n_cols);

  Eigen::HouseholderQR<Matrix<S>> qr1(cross.col_stack);
  Eigen::HouseholderQR<Matrix<S>> qr2(cross.row_stack.transpose());
  const Matrix<S> q1 = qr1.householderQ() * Matrix<S>::Identity(cross.n_rows, k);
  const Matrix<S> q2 = qr2.householderQ() * Matrix<S>::Identity(cross.n_cols, k);
  const Matrix<S> r1 =
      qr1.matrixQR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const Matrix<S> r2 =
      qr2.matrixQR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const Matrix<S> core =
      r1 * cross.pivots.cwiseInverse().asDiagonal() * r2.transpose();

  Eigen::JacobiSVD<Matrix<S>> svd(core, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& s = svd.singularValues();
  Index r = 0;
  while (r < s.size() && s[r] >= eps_s) ++r;

  LowRankFactors<S> out;
  out.u = q1 * svd.matrixU().leftCols(r);
  out.sigma = s.head(r);
  out.v = q2 * svd.matrixV().leftCols(r).conjugate();
  return out;
}

struct CompressOptions {
  AcaOptions aca;
  double eps_s = 1e-3;
};

struct CompressStats {
  AcaStats aca;
  Index cross_rank = 0;
};

template <MatrixAccessor Acc>
LowRankFactors<typename Acc::Scalar> compress(const Acc& a,
                                              const CompressOptions& opt,
                                              CompressStats* stats = nullptr) {
  CompressStats local;
  CompressStats& st = stats ? *stats : local;
  const auto cross = aca(a, opt.aca, &st.aca);
  st.cross_rank = cross.rank();
  return svd_truncate(cross, opt.eps_s);
}

// Recompress u * diag(sigma) * v^T into orthonormal form, keeping at most
// max_rank terms and dropping singular values below rel_tol * sigma_1.
template <typename S>
LowRankFactors<S> recompress(const Matrix<S>& u, const VectorXd& sigma,
                             const Matrix<S>& v, Index max_rank,
                             double rel_tol) {
  const Index k = sigma.size();
  if (k == 0) return LowRankFactors<S>::zero(u.rows(), v.rows());
  Eigen::HouseholderQR<Matrix<S>> qr1(u);
  Eigen::HouseholderQR<Matrix<S>> qr2(v);
  const Index k1 = std::min(k, u.rows());
  const Index k2 = std::min(k, v.rows());
  const Matrix<S> q1 = qr1.householderQ() * Matrix<S>::Identity(u.rows(), k1);
  const Matrix<S> q2 = qr2.householderQ() * Matrix<S>::Identity(v.rows(), k2);
  const Matrix<S> r1 =
      qr1.matrixQR().topRows(k1).template triangularView<Eigen::Upper>();
  const Matrix<S> r2 =
      qr2.matrixQR().topRows(k2).template triangularView<Eigen::Upper>();
  const Matrix<S> core =
      r1 * sigma.template cast<S>().asDiagonal() * r2.transpose();
  Eigen::JacobiSVD<Matrix<S>> svd(core, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& s = svd.singularValues();
  Index r = 0;
  const Index cap = std::min<Index>(max_rank, s.size());
  while (r < cap && s[r] > rel_tol * s[0]) ++r;
  LowRankFactors<S> out;
  out.u = q1 * svd.matrixU().leftCols(r);
  out.sigma = s.head(r);
  out.v = q2 * svd.matrixV().leftCols(r).conjugate();
  return out;
}

}  // namespace wigner
