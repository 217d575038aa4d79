#include "rlasso/model.hpp"

#include "rlasso/error.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace rlasso {

RegressionData validate(RegressionData data) {
  const Index n = data.n();
  const Index k = data.k();
  if (data.x().rows() != n) {
    std::ostringstream msg;
    msg << "x has " << data.x().rows() << " rows but y has length " << n;
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
  if (k < 1 || n < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "need at least one observation and one regressor");
  }
  if (n <= k) {
    std::ostringstream msg;
    msg << "need more observations than regressors (n=" << n << ", K=" << k << ")";
    throw Error(ErrorCode::kDimensionMismatch, msg.str());
  }
  if (!data.x().allFinite()) {
    throw Error(ErrorCode::kNonFinite, "design matrix contains NaN or Inf");
  }
  if (!data.y().allFinite()) {
    throw Error(ErrorCode::kNonFinite, "response contains NaN or Inf");
  }
  return data;
}

LeastSquares::LeastSquares(const Matrix& x) : rows_(x.rows()), cols_(x.cols()) {
  if (cols_ < 1 || rows_ < cols_) {
    throw Error(ErrorCode::kDimensionMismatch, "least squares needs a tall design with K >= 1");
  }
  qr_.compute(x);
  r_ = qr_.matrixQR().topRows(cols_).triangularView<Eigen::Upper>();

  Eigen::JacobiSVD<Matrix> svd(r_);
  singular_values_ = svd.singularValues();
  const double s_max = singular_values_.size() > 0 ? singular_values_(0) : 0.0;
  rank_tol_ = std::numeric_limits<double>::epsilon() *
              static_cast<double>(std::max(rows_, cols_)) * s_max;
  const Index rank = (singular_values_.array() > rank_tol_).count();
  if (rank < cols_ || !(s_max > 0.0)) {
    std::ostringstream msg;
    msg << "design has numerical rank " << rank << " < K=" << cols_
        << " (collinear regressors?)";
    throw Error(ErrorCode::kRankDeficient, msg.str());
  }
}

Vector LeastSquares::solve(const Vector& z) const {
  if (z.size() != rows_) {
    throw Error(ErrorCode::kDimensionMismatch, "right-hand side length differs from design rows");
  }
  Vector qtz = qr_.householderQ().transpose() * z;
  return r_.triangularView<Eigen::Upper>().solve(qtz.head(cols_));
}

Vector LeastSquares::residual(const Vector& z) const {
  if (z.size() != rows_) {
    throw Error(ErrorCode::kDimensionMismatch, "vector length differs from design rows");
  }
  Vector c = qr_.householderQ().transpose() * z;
  c.head(cols_).setZero();
  return qr_.householderQ() * c;
}

Matrix LeastSquares::gram_inverse() const {
  Matrix r_inv = r_.triangularView<Eigen::Upper>().solve(Matrix::Identity(cols_, cols_));
  return r_inv * r_inv.transpose();
}

Vector least_squares(const Matrix& x, const Vector& z) {
  return LeastSquares(x).solve(z);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rlasso
