#pragma once

// Small dense two-phase simplex for the standard-form programs that arise in
// polytope gauge evaluation and hull-membership tests:
//
//     minimize c^T x  subject to  A x = b,  x >= 0.
//
// Problems here have a handful of rows (the ambient dimension) and at most a
// few thousand columns (the vertex count), so a tableau with Bland's rule is
// adequate. After the pivoting settles on a basis the basic variables are
// re-solved from the original data to strip accumulated tableau rounding.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "logmeasure/linalg.hpp"

namespace logmeasure::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Result {
  Status status = Status::Infeasible;
  double value = std::numeric_limits<double>::quiet_NaN();
  Vector x;
};

namespace detail {

class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b)
      : rows_(a.rows()), cols_(a.cols()), t_(a.rows() + 1, a.cols() + a.rows() + 1),
        basis_(static_cast<std::size_t>(a.rows())) {
    t_.setZero();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(cols_) = sign * a.row(i);
      t_(i, cols_ + i) = 1.0;
      t_(i, rhs()) = sign * b(i);
      basis_[static_cast<std::size_t>(i)] = cols_ + i;
    }
    scale_ = std::max(1.0, a.cwiseAbs().maxCoeff());
    scale_ = std::max(scale_, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  }

  Eigen::Index rhs() const { return cols_ + rows_; }
  Eigen::Index obj() const { return rows_; }
  double tol() const { return 1e-12 * scale_; }

  // Phase-1 objective: sum of artificials, expressed in the nonbasic columns.
  void load_phase1() {
    t_.row(obj()).setZero();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      t_.row(obj()).head(cols_) -= t_.row(i).head(cols_);
      t_(obj(), rhs()) -= t_(i, rhs());
    }
  }

  void load_phase2(const Vector& c) {
    t_.row(obj()).setZero();
    t_.row(obj()).head(cols_) = c.transpose();
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index bcol = basis_[static_cast<std::size_t>(i)];
      if (bcol < cols_ && c(bcol) != 0.0) t_.row(obj()) -= c(bcol) * t_.row(i);
    }
  }

  // Runs Bland-rule pivots over columns [0, allowed). Returns final status.
  Status run(Eigen::Index allowed, int max_iter) {
    for (int iter = 0; iter < max_iter; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (t_(obj(), j) < -tol()) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return Status::Optimal;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double piv = t_(i, enter);
        if (piv > tol()) best = std::min(best, t_(i, rhs()) / piv);
      }
      if (!std::isfinite(best)) return Status::Unbounded;
      Eigen::Index leave = -1;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const double piv = t_(i, enter);
        if (piv <= tol() || t_(i, rhs()) / piv > best + tol()) continue;
        if (leave < 0 || basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) leave = i;
      }
      pivot(leave, enter);
    }
    return Status::IterationLimit;
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Pivot zero-level artificials out of the basis where an original column allows it.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < cols_) continue;
      for (Eigen::Index j = 0; j < cols_; ++j) {
        if (std::abs(t_(i, j)) > 1e3 * tol()) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double objective_value() const { return -t_(obj(), rhs()); }

  Vector solution() const {
    Vector x = Vector::Zero(cols_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index bcol = basis_[static_cast<std::size_t>(i)];
      if (bcol < cols_) x(bcol) = std::max(0.0, t_(i, rhs()));
    }
    return x;
  }

  std::vector<Eigen::Index> original_basis() const {
    std::vector<Eigen::Index> out;
    for (auto b : basis_)
      if (b < cols_) out.push_back(b);
    return out;
  }

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
  Matrix t_;
  std::vector<Eigen::Index> basis_;
  double scale_ = 1.0;
};

inline int iteration_cap(const Matrix& a) { return 200 * static_cast<int>(a.rows() + a.cols()) + 1000; }

}  // namespace detail

/// Feasibility of {x >= 0 : A x = b}, decided by phase 1.
inline bool feasible(const Matrix& a, const Vector& b, double feas_tol = 1e-9) {
  detail::Tableau tab(a, b);
  tab.load_phase1();
  const Status st = tab.run(a.cols(), detail::iteration_cap(a));
  if (st != Status::Optimal) return false;
  return tab.objective_value() <= feas_tol * (1.0 + b.cwiseAbs().sum());
}

inline Result minimize(const Matrix& a, const Vector& b, const Vector& c, double feas_tol = 1e-9) {
  Result out;
  detail::Tableau tab(a, b);
  tab.load_phase1();
  Status st = tab.run(a.cols(), detail::iteration_cap(a));
  if (st != Status::Optimal || tab.objective_value() > feas_tol * (1.0 + b.cwiseAbs().sum())) {
    out.status = st == Status::IterationLimit ? st : Status::Infeasible;
    return out;
  }
  tab.expel_artificials();
  tab.load_phase2(c);
  st = tab.run(a.cols(), detail::iteration_cap(a));
  out.status = st;
  if (st != Status::Optimal) return out;

  out.x = tab.solution();
  // Re-solve the basic variables against the untouched data.
  const auto basic = tab.original_basis();
  if (!basic.empty()) {
    Matrix bmat(a.rows(), static_cast<Eigen::Index>(basic.size()));
    for (std::size_t k = 0; k < basic.size(); ++k) bmat.col(static_cast<Eigen::Index>(k)) = a.col(basic[k]);
    const Vector xb = bmat.colPivHouseholderQr().solve(b);
    const double resid = (bmat * xb - b).cwiseAbs().maxCoeff();
    if (xb.allFinite() && resid <= 1e-12 * (1.0 + b.cwiseAbs().maxCoeff()) &&
        (xb.array() >= -1e-12).all()) {
      out.x.setZero();
      for (std::size_t k = 0; k < basic.size(); ++k) out.x(basic[k]) = std::max(0.0, xb(static_cast<Eigen::Index>(k)));
    }
  }
  out.value = c.dot(out.x);
  return out;
}

}  // namespace logmeasure::lp
