#pragma once

// Dense two-phase primal simplex over a standard-form problem
//
//   min c'y   s.t.   A y = b,  y >= 0,  b >= 0
//
// Rows whose initial basic column is known (a +1 slack) start from it; every
// other row gets an artificial column driven out in phase one. Entering and
// leaving variables follow Bland's rule, which rules out cycling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace nearopt::simplex {

enum class Status { Optimal, Infeasible, Unbounded };

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct StandardForm {
  MatrixX<Scalar> A;
  VectorX<Scalar> b;
  VectorX<Scalar> c;
  // Column already forming a unit vector in row r, or -1 if row r needs an
  // artificial variable.
  std::vector<Eigen::Index> initial_basis;
};

template <typename Scalar>
struct Options {
  Scalar pivot_tolerance = Scalar(1e-9);
  Scalar cost_tolerance = Scalar(1e-9);       // relative to max|c|
  Scalar feasibility_tolerance = Scalar(1e-7);  // relative to max(1, max|b|)
  std::size_t max_pivots = 1'000'000;
};

template <typename Scalar>
struct Result {
  Status status = Status::Infeasible;
  VectorX<Scalar> y;
  Scalar value = Scalar(0);
  std::vector<Eigen::Index> basis;
  std::size_t pivots = 0;
};

template <typename Scalar>
class DenseTableau {
 public:
  DenseTableau(const StandardForm<Scalar>& form, const Options<Scalar>& options)
      : form_(form), options_(options) {}

  Result<Scalar> run() {
    const Eigen::Index m = form_.A.rows();
    const Eigen::Index n = form_.A.cols();
    if (form_.b.size() != m || form_.c.size() != n ||
        static_cast<Eigen::Index>(form_.initial_basis.size()) != m) {
      throw std::invalid_argument("simplex: inconsistent standard form dimensions");
    }
    if ((form_.b.array() < Scalar(0)).any()) {
      throw std::invalid_argument("simplex: standard form requires b >= 0");
    }

    std::vector<Eigen::Index> artificial_rows;
    for (Eigen::Index r = 0; r < m; ++r) {
      if (form_.initial_basis[r] < 0) artificial_rows.push_back(r);
    }
    const Eigen::Index num_art = static_cast<Eigen::Index>(artificial_rows.size());
    num_structural_ = n;
    rhs_ = n + num_art;

    tableau_ = MatrixX<Scalar>::Zero(m + 1, rhs_ + 1);
    tableau_.topLeftCorner(m, n) = form_.A;
    tableau_.col(rhs_).head(m) = form_.b;
    basis_.assign(m, -1);
    for (Eigen::Index r = 0; r < m; ++r) basis_[r] = form_.initial_basis[r];
    for (Eigen::Index a = 0; a < num_art; ++a) {
      const Eigen::Index r = artificial_rows[a];
      tableau_(r, n + a) = Scalar(1);
      basis_[r] = n + a;
    }

    const Scalar b_scale = std::max(Scalar(1), form_.b.size() ? form_.b.cwiseAbs().maxCoeff() : Scalar(0));
    Result<Scalar> result;

    if (num_art > 0) {
      // Phase one: minimise the sum of artificials.
      tableau_.row(m).setZero();
      for (Eigen::Index a = 0; a < num_art; ++a) tableau_(m, n + a) = Scalar(1);
      for (Eigen::Index r : artificial_rows) tableau_.row(m) -= tableau_.row(r);
      enterable_ = rhs_;
      if (iterate() == Status::Unbounded) {
        throw std::logic_error("simplex: phase one cannot be unbounded");
      }
      const Scalar infeasibility = -tableau_(m, rhs_);
      if (infeasibility > options_.feasibility_tolerance * b_scale) {
        result.status = Status::Infeasible;
        result.pivots = pivots_;
        return result;
      }
      drive_out_artificials();
    }

    // Phase two over structural columns only.
    enterable_ = num_structural_;
    const Eigen::Index rows = static_cast<Eigen::Index>(basis_.size());
    tableau_.row(rows).setZero();
    tableau_.row(rows).head(n) = form_.c.transpose();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Scalar cb = form_.c(basis_[r]);
      if (cb != Scalar(0)) tableau_.row(rows) -= cb * tableau_.row(r);
    }
    cost_scale_ = std::max(Scalar(1), form_.c.size() ? form_.c.cwiseAbs().maxCoeff() : Scalar(0));

    result.status = iterate();
    result.pivots = pivots_;
    if (result.status != Status::Optimal) return result;

    result.y = VectorX<Scalar>::Zero(n);
    for (Eigen::Index r = 0; r < rows; ++r) result.y(basis_[r]) = tableau_(r, rhs_);
    refine(result.y);
    result.value = form_.c.dot(result.y);
    result.basis = basis_;
    return result;
  }

 private:
  Eigen::Index objective_row() const { return static_cast<Eigen::Index>(basis_.size()); }

  Status iterate() {
    const Scalar cost_tol = options_.cost_tolerance * (enterable_ == rhs_ ? Scalar(1) : cost_scale_);
    const Eigen::Index obj = objective_row();
    while (true) {
      // Bland: lowest-index column with a negative reduced cost enters.
      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < enterable_; ++j) {
        if (tableau_(obj, j) < -cost_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return Status::Optimal;

      // Ratio test; ties go to the basic variable with the lowest index.
      Eigen::Index leaving = -1;
      Scalar best = std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index r = 0; r < obj; ++r) {
        const Scalar a = tableau_(r, entering);
        if (a <= options_.pivot_tolerance) continue;
        const Scalar ratio = tableau_(r, rhs_) / a;
        if (leaving < 0) {
          best = ratio;
          leaving = r;
          continue;
        }
        const Scalar tie = Scalar(1e-12) * std::max(Scalar(1), std::abs(best));
        if (ratio < best - tie) {
          best = ratio;
          leaving = r;
        } else if (ratio <= best + tie && basis_[r] < basis_[leaving]) {
          best = std::min(best, ratio);
          leaving = r;
        }
      }
      if (leaving < 0) return Status::Unbounded;
      pivot(leaving, entering);
      if (++pivots_ > options_.max_pivots) {
        throw std::runtime_error("simplex: pivot limit exceeded");
      }
    }
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    tableau_.row(row) /= tableau_(row, col);
    const VectorX<Scalar> column = tableau_.col(col);
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> pivot_row = tableau_.row(row);
    for (Eigen::Index r = 0; r < tableau_.rows(); ++r) {
      if (r == row || column(r) == Scalar(0)) continue;
      tableau_.row(r).noalias() -= column(r) * pivot_row;
    }
    // Clean up round-off on the rhs of basic rows.
    for (Eigen::Index r = 0; r + 1 < tableau_.rows(); ++r) {
      if (tableau_(r, rhs_) < Scalar(0) && tableau_(r, rhs_) > -options_.pivot_tolerance) {
        tableau_(r, rhs_) = Scalar(0);
      }
    }
    basis_[row] = col;
  }

  void drive_out_artificials() {
    std::vector<Eigen::Index> redundant;
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(basis_.size()); ++r) {
      if (basis_[r] < num_structural_) continue;
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < num_structural_; ++j) {
        if (std::abs(tableau_(r, j)) > options_.pivot_tolerance) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(r, col);
      } else {
        redundant.push_back(r);
      }
    }
    if (redundant.empty()) return;
    MatrixX<Scalar> kept(tableau_.rows() - static_cast<Eigen::Index>(redundant.size()), tableau_.cols());
    std::vector<Eigen::Index> basis;
    Eigen::Index out = 0;
    for (Eigen::Index r = 0; r < tableau_.rows(); ++r) {
      if (std::find(redundant.begin(), redundant.end(), r) != redundant.end()) continue;
      kept.row(out++) = tableau_.row(r);
      if (r < static_cast<Eigen::Index>(basis_.size())) basis.push_back(basis_[r]);
    }
    tableau_ = std::move(kept);
    basis_ = std::move(basis);
    kept_rows_.clear();
    for (Eigen::Index r = 0; r < form_.A.rows(); ++r) {
      if (std::find(redundant.begin(), redundant.end(), r) == redundant.end()) kept_rows_.push_back(r);
    }
  }

  // One solve of B y_B = b against the original data to shed accumulated
  // tableau round-off. Kept only if it does not make things worse.
  void refine(VectorX<Scalar>& y) const {
    const Eigen::Index rows = static_cast<Eigen::Index>(basis_.size());
    if (rows == 0) return;
    std::vector<Eigen::Index> row_ids = kept_rows_;
    if (row_ids.empty()) {
      for (Eigen::Index r = 0; r < form_.A.rows(); ++r) row_ids.push_back(r);
    }
    MatrixX<Scalar> basis_matrix(rows, rows);
    VectorX<Scalar> rhs(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      rhs(i) = form_.b(row_ids[i]);
      for (Eigen::Index k = 0; k < rows; ++k) basis_matrix(i, k) = form_.A(row_ids[i], basis_[k]);
    }
    Eigen::FullPivLU<MatrixX<Scalar>> lu(basis_matrix);
    if (!lu.isInvertible()) return;
    const VectorX<Scalar> yb = lu.solve(rhs);
    if (!yb.allFinite()) return;

    VectorX<Scalar> candidate = VectorX<Scalar>::Zero(y.size());
    for (Eigen::Index k = 0; k < rows; ++k) candidate(basis_[k]) = std::max(Scalar(0), yb(k));
    const Scalar before = (form_.A * y - form_.b).cwiseAbs().maxCoeff();
    const Scalar after = (form_.A * candidate - form_.b).cwiseAbs().maxCoeff();
    if (after <= before) y = candidate;
  }

  const StandardForm<Scalar>& form_;
  Options<Scalar> options_;
  MatrixX<Scalar> tableau_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> kept_rows_;
  Eigen::Index num_structural_ = 0;
  Eigen::Index rhs_ = 0;
  Eigen::Index enterable_ = 0;
  Scalar cost_scale_ = Scalar(1);
  std::size_t pivots_ = 0;
};

template <typename Scalar>
Result<Scalar> solve(const StandardForm<Scalar>& form, const Options<Scalar>& options = {}) {
  return DenseTableau<Scalar>(form, options).run();
}

}  // namespace nearopt::simplex
