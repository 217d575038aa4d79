#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rlasso::oracle {

Vector pinv_solve(const Matrix& x, const Vector& z) {
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double tol = std::numeric_limits<double>::epsilon() *
                     static_cast<double>(std::max(x.rows(), x.cols())) * s(0);
  Vector uz = svd.matrixU().leftCols(s.size()).transpose() * z;
  for (Index i = 0; i < s.size(); ++i) uz(i) = s(i) > tol ? uz(i) / s(i) : 0.0;
  return svd.matrixV() * uz;
}

Matrix residual_maker(const Matrix& x) {
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU);
  const Index r = x.cols();
  const Matrix u = svd.matrixU().leftCols(r);
  return Matrix::Identity(x.rows(), x.rows()) - u * u.transpose();
}

namespace {

double concentrated(const Matrix& m, const Vector& y, const Vector& a, double lambda) {
  const double n = static_cast<double>(y.size());
  return (m * (y - a)).norm() / std::sqrt(n) + lambda / n * a.lpNorm<1>();
}

Vector min_norm_subgradient(const Matrix& m, const Vector& y, const Vector& a, double lambda) {
  const double n = static_cast<double>(y.size());
  const Vector u = m * (y - a);
  const double un = u.norm();
  Vector g(y.size());
  const double w = lambda / n;
  for (Index i = 0; i < y.size(); ++i) {
    const double smooth = un > 0.0 ? -u(i) / (std::sqrt(n) * un) : 0.0;
    if (a(i) != 0.0) {
      g(i) = smooth + w * (a(i) > 0.0 ? 1.0 : -1.0);
    } else if (smooth > w) {
      g(i) = smooth - w;
    } else if (smooth < -w) {
      g(i) = smooth + w;
    } else {
      g(i) = 0.0;
    }
  }
  return g;
}

struct Descent {
  Vector best;
  double best_obj;
  int iters;
};

Descent subgradient_descent(const Matrix& m, const Vector& y, Vector a, double lambda,
                            double step0) {
  constexpr int kMaxIters = 400000;
  constexpr int kWindow = 2000;
  Descent d{a, concentrated(m, y, a, lambda), 0};
  double window_start = d.best_obj;
  int t = 1;
  for (; t <= kMaxIters; ++t) {
    const Vector g = min_norm_subgradient(m, y, a, lambda);
    const double gn = g.norm();
    if (gn == 0.0) break;
    a -= (step0 / std::sqrt(static_cast<double>(t))) * g / gn;
    const double obj = concentrated(m, y, a, lambda);
    if (obj < d.best_obj) {
      d.best_obj = obj;
      d.best = a;
    }
    if (t % kWindow == 0) {
      if (window_start - d.best_obj < 1e-10) break;
      window_start = d.best_obj;
    }
  }
  d.iters = t;
  return d;
}

// Solves the optimality system exactly for a given support S and signs s:
//   u = M(y - alpha),  u_S = tau s,  tau = lambda ||u|| / sqrt(n).
bool solve_on_support(const Matrix& m, const Vector& y, double lambda,
                      const std::vector<Index>& support, const std::vector<double>& signs,
                      Vector& alpha, Vector& u, double& tau) {
  const Index n = y.size();
  const double nn = static_cast<double>(n);
  const Vector my = m * y;
  alpha = Vector::Zero(n);
  if (support.empty()) {
    u = my;
    tau = lambda * u.norm() / std::sqrt(nn);
    return true;
  }
  const auto s = static_cast<Index>(support.size());
  Matrix a_ss(s, s);
  Matrix m_cols(n, s);
  Vector my_s(s);
  Vector sg(s);
  for (Index p = 0; p < s; ++p) {
    m_cols.col(p) = m.col(support[static_cast<std::size_t>(p)]);
    my_s(p) = my(support[static_cast<std::size_t>(p)]);
    sg(p) = signs[static_cast<std::size_t>(p)];
    for (Index q = 0; q < s; ++q) {
      a_ss(p, q) = m(support[static_cast<std::size_t>(p)], support[static_cast<std::size_t>(q)]);
    }
  }
  Eigen::FullPivLU<Matrix> lu(a_ss);
  if (!lu.isInvertible()) return false;
  const Vector a0 = lu.solve(my_s);
  const Vector a1 = lu.solve(sg);
  const Vector u0 = my - m_cols * a0;
  const Vector v = m_cols * a1;  // u = u0 + tau v
  const double qa = nn / (lambda * lambda) - v.squaredNorm();
  const double qb = u0.dot(v);
  const double qc = u0.squaredNorm();
  if (!(qa > 0.0)) return false;
  tau = (qb + std::sqrt(qb * qb + qa * qc)) / qa;
  const Vector a_s = a0 - tau * a1;
  for (Index p = 0; p < s; ++p) alpha(support[static_cast<std::size_t>(p)]) = a_s(p);
  u = u0 + tau * v;
  return true;
}

bool active_set_polish(const Matrix& m, const Vector& y, double lambda, const Vector& start,
                       Vector& alpha_out) {
  const Index n = y.size();
  const double scale = std::max(1.0, y.lpNorm<Eigen::Infinity>());
  std::vector<Index> support;
  std::vector<double> signs;
  for (Index i = 0; i < n; ++i) {
    if (std::abs(start(i)) > 1e-4 * scale) {
      support.push_back(i);
      signs.push_back(start(i) > 0.0 ? 1.0 : -1.0);
    }
  }
  for (int round = 0; round < 4 * static_cast<int>(n) + 10; ++round) {
    Vector alpha, u;
    double tau = 0.0;
    if (!solve_on_support(m, y, lambda, support, signs, alpha, u, tau)) return false;

    // Sign consistency on the support.
    Index worst_sign = -1;
    double worst_sign_val = 0.0;
    for (std::size_t p = 0; p < support.size(); ++p) {
      const double v = alpha(support[p]) * signs[p];
      if (v <= 0.0 && (worst_sign < 0 || v < worst_sign_val)) {
        worst_sign = static_cast<Index>(p);
        worst_sign_val = v;
      }
    }
    if (worst_sign >= 0) {
      support.erase(support.begin() + worst_sign);
      signs.erase(signs.begin() + worst_sign);
      continue;
    }
    // Dual feasibility off the support.
    Index worst = -1;
    double worst_excess = 1e-12 * std::max(1.0, tau);
    for (Index i = 0; i < n; ++i) {
      if (alpha(i) != 0.0) continue;
      const double excess = std::abs(u(i)) - tau;
      if (excess > worst_excess) {
        worst = i;
        worst_excess = excess;
      }
    }
    if (worst >= 0) {
      const auto pos = std::lower_bound(support.begin(), support.end(), worst);
      signs.insert(signs.begin() + (pos - support.begin()), u(worst) > 0.0 ? 1.0 : -1.0);
      support.insert(pos, worst);
      continue;
    }
    alpha_out = alpha;
    return true;
  }
  return false;
}

}  // namespace

ConvexSolution minimise_concentrated(const RegressionData& data, double lambda,
                                     std::uint64_t seed, int starts) {
  const Matrix m = residual_maker(data.x());
  const Vector& y = data.y();
  const Index n = y.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double step0 = 0.5 * std::max(1e-3, (m * y).lpNorm<Eigen::Infinity>());

  ConvexSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    Vector a0 = Vector::Zero(n);
    if (s == 1) a0 = m * y;
    if (s >= 2) {
      for (Index i = 0; i < n; ++i) a0(i) = step0 * normal(rng);
    }
    const Descent d = subgradient_descent(m, y, a0, lambda, step0);
    if (d.best_obj < best.objective) {
      best.alpha = d.best;
      best.objective = d.best_obj;
      best.subgradient_iters = d.iters;
    }
  }

  Vector polished;
  if (active_set_polish(m, y, lambda, best.alpha, polished)) {
    const double obj = concentrated(m, y, polished, lambda);
    if (obj <= best.objective + 1e-12) {
      best.alpha = polished;
      best.objective = obj;
      best.polished = true;
    }
  }
  best.beta = pinv_solve(data.x(), y - best.alpha);
  return best;
}

double kkt_violation(const RegressionData& data, const Vector& beta, const Vector& alpha,
                     double lambda) {
  const double n = static_cast<double>(data.n());
  const Vector partial = data.y() - data.x() * beta;
  const Vector resid = partial - alpha;
  const double tau = lambda * resid.norm() / std::sqrt(n);
  double worst = 0.0;
  for (Index i = 0; i < data.n(); ++i) {
    if (alpha(i) != 0.0) {
      const double target = alpha(i) > 0.0 ? tau : -tau;
      worst = std::max(worst, std::abs(resid(i) - target));
    } else {
      worst = std::max(worst, std::abs(partial(i)) - tau);
    }
  }
  return worst;
}

RegressionData random_instance(std::mt19937_64& rng, Index n, Index k, int outliers) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> shift(5.0, 10.0);
  Matrix x(n, k);
  x.col(0).setOnes();
  for (Index j = 1; j < k; ++j) {
    for (Index i = 0; i < n; ++i) x(i, j) = normal(rng);
  }
  Vector beta(k);
  for (Index j = 0; j < k; ++j) beta(j) = normal(rng);
  Vector y = x * beta;
  for (Index i = 0; i < n; ++i) y(i) += normal(rng);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  for (int o = 0; o < outliers && o < n; ++o) {
    y(idx[static_cast<std::size_t>(o)]) += (normal(rng) > 0.0 ? 1.0 : -1.0) * shift(rng);
  }
  return RegressionData(std::move(x), std::move(y));
}

}  // namespace rlasso::oracle
