#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace rlasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Observed design x (n x K) and response y (n). Construction does not check
/// anything; pass the value through validate() before fitting.
class RegressionData {
 public:
  RegressionData() = default;
  RegressionData(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y)) {}

  const Matrix& x() const noexcept { return x_; }
  const Vector& y() const noexcept { return y_; }
  Index n() const noexcept { return y_.size(); }
  Index k() const noexcept { return x_.cols(); }

 private:
  Matrix x_;
  Vector y_;
};

/// Checks row agreement, n > K >= 1 and finiteness. Returns the data unchanged.
/// Throws Error{kDimensionMismatch} or Error{kNonFinite}. Rank is not checked
/// here; LeastSquares does that.
RegressionData validate(RegressionData data);

/// Householder QR of a tall design, kept around so that repeated solves
/// against the same x (the beta-step of every iteration, every Monte-Carlo
/// draw of the penalty calibrator) cost O(nK) each.
///
/// The constructor rejects designs whose numerical rank is below K, using
/// tol = eps * max(n, K) * s_max on the singular values of x (computed from
/// the K x K triangular factor, which shares them).
class LeastSquares {
 public:
  explicit LeastSquares(const Matrix& x);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }

  /// argmin_b ||z - x b||_2.
  Vector solve(const Vector& z) const;

  /// M_X z = z - P_X z, applied through the orthogonal factor. The n x n
  /// projector is never formed.
  Vector residual(const Vector& z) const;

  /// (x^T x)^{-1} from the triangular factor.
  Matrix gram_inverse() const;

  const Vector& singular_values() const noexcept { return singular_values_; }
  double rank_tolerance() const noexcept { return rank_tol_; }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Eigen::HouseholderQR<Matrix> qr_;
  Matrix r_;
  Vector singular_values_;
  double rank_tol_ = 0.0;
};

/// One-shot convenience wrapper around LeastSquares.
Vector least_squares(const Matrix& x, const Vector& z);

/// splitmix64 finaliser applied to (master, index); used wherever an
/// independent stream per replication or per draw is needed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

}  // namespace rlasso
