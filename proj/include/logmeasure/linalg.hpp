#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "logmeasure/errors.hpp"

namespace logmeasure {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Seed used by every sampled procedure unless the caller overrides it.
inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

/// Explicitly passed random source; there is no global generator.
using Rng = std::mt19937_64;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::InvalidSpec, std::string(what) + " has non-finite entries");
}

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be a non-empty square matrix");
}

inline bool is_diagonal(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

inline bool is_nonnegative_diagonal(const Matrix& m) {
  return is_diagonal(m) && (m.diagonal().array() >= 0.0).all();
}

/// Off-diagonal entries nonnegative.
inline bool is_metzler(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) < 0.0) return false;
  return true;
}

inline Matrix diag(const Vector& d) { return d.asDiagonal(); }

/// Sign-diagonal matrix whose i-th entry is -1 iff bit i of `mask` is set.
inline Matrix sign_diagonal(Eigen::Index n, std::uint64_t mask) {
  Vector s = Vector::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (mask >> i & 1u) s(i) = -1.0;
  return s.asDiagonal();
}

/// Diagonal projection that zeroes coordinate j.
inline Matrix coordinate_projection(Eigen::Index n, Eigen::Index j) {
  Matrix p = Matrix::Identity(n, n);
  p(j, j) = 0.0;
  return p;
}

/// 0/1 diagonal selecting the coordinates whose bit is set in `mask`.
inline Matrix subset_diagonal(Eigen::Index n, std::uint64_t mask) {
  Vector d = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (mask >> i & 1u) d(i) = 1.0;
  return d.asDiagonal();
}

/// Sign-pattern enumeration is exponential; beyond this the exact paths refuse.
// Small sizes use Eigen's cofactor inverse, which is exact for integer
// matrices with unit determinant; larger ones go through full-pivot LU.
inline Matrix accurate_inverse(const Matrix& t) {
  switch (t.rows()) {
    case 1: return Matrix::Constant(1, 1, 1.0 / t(0, 0));
    case 2: return Matrix(Eigen::Matrix2d(t).inverse());
    case 3: return Matrix(Eigen::Matrix3d(t).inverse());
    case 4: return Matrix(Eigen::Matrix4d(t).inverse());
    default: return t.fullPivLu().inverse();
  }
}

inline constexpr Eigen::Index kMaxEnumerationDim = 20;

inline void require_enumerable(Eigen::Index n) {
  if (n > kMaxEnumerationDim)
    throw Error(ErrorCode::UnsupportedDimension,
                "sign enumeration needs n <= " + std::to_string(kMaxEnumerationDim));
}

inline Vector uniform_vector(Rng& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

inline Matrix uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

inline Matrix integer_matrix(Rng& rng, Eigen::Index n, int lo, int hi) {
  std::uniform_int_distribution<int> u(lo, hi);
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = u(rng);
  return m;
}

/// Nonnegative diagonal with log-uniform entries in [1e-3, hi]; each entry is
/// exactly zero with probability `zero_prob`.
inline Matrix random_nonnegative_diagonal(Rng& rng, Eigen::Index n, double hi = 10.0,
                                          double zero_prob = 0.1) {
  std::uniform_real_distribution<double> u(std::log(1e-3), std::log(hi));
  std::bernoulli_distribution zero(zero_prob);
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = zero(rng) ? 0.0 : std::exp(u(rng));
  return d.asDiagonal();
}

}  // namespace logmeasure
