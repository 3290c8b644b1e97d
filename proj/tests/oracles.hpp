// Brute-force reference implementations used to check the library. They are
// written from the defining formulas with explicit loops and dense inverses,
// sharing no code with the implementation under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double matern52(const Eigen::VectorXd &a, const Eigen::VectorXd &b,
                       double scale, const Eigen::VectorXd &ls) {
  double r2 = 0.0;
  for (int d = 0; d < a.size(); ++d) {
    const double z = (a[d] - b[d]) / ls[d];
    r2 += z * z;
  }
  const double r = std::sqrt(r2);
  const double s5 = std::sqrt(5.0);
  return scale * (1.0 + s5 * r + 5.0 * r2 / 3.0) * std::exp(-s5 * r);
}

inline Eigen::MatrixXd gram(const Eigen::MatrixXd &A, const Eigen::MatrixXd &B,
                            double scale, const Eigen::VectorXd &ls) {
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < B.rows(); ++j)
      K(i, j) = matern52(A.row(i).transpose(), B.row(j).transpose(), scale, ls);
  return K;
}

struct DensePosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Exact GP posterior of the latent function via an explicit inverse.
inline DensePosterior posterior(const Eigen::MatrixXd &X, const Eigen::VectorXd &y,
                                const Eigen::MatrixXd &Xq, double mean_c,
                                double scale, const Eigen::VectorXd &ls,
                                double noise) {
  Eigen::MatrixXd K = gram(X, X, scale, ls);
  K += noise * Eigen::MatrixXd::Identity(X.rows(), X.rows());
  const Eigen::MatrixXd Kinv = K.inverse();
  const Eigen::MatrixXd Ks = gram(Xq, X, scale, ls);
  DensePosterior p;
  p.mean = Eigen::VectorXd::Constant(Xq.rows(), mean_c) +
           Ks * Kinv * (y - Eigen::VectorXd::Constant(y.size(), mean_c));
  p.cov = gram(Xq, Xq, scale, ls) - Ks * Kinv * Ks.transpose();
  return p;
}

/// log N(y | c, K + noise I) via determinant and explicit inverse.
inline double mll(const Eigen::MatrixXd &X, const Eigen::VectorXd &y, double mean_c,
                  double scale, const Eigen::VectorXd &ls, double noise) {
  Eigen::MatrixXd K = gram(X, X, scale, ls);
  K += noise * Eigen::MatrixXd::Identity(X.rows(), X.rows());
  const Eigen::VectorXd r = y - Eigen::VectorXd::Constant(y.size(), mean_c);
  const double n = static_cast<double>(y.size());
  return -0.5 * r.dot(K.inverse() * r) - 0.5 * std::log(K.determinant()) -
         0.5 * n * std::log(2.0 * M_PI);
}

/// Closed-form expected improvement of N(mu, s^2) over best.
inline double expected_improvement(double mu, double s, double best) {
  if (s <= 0.0)
    return std::max(mu - best, 0.0);
  const double z = (mu - best) / s;
  const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  return (mu - best) * cdf + s * pdf;
}

/// One agent's swarm increment evaluated term by term:
/// 1/(2 sum_j V_ij) sum_j V_ij (D'_ij - D_ij) (x_i - x_j)/|x_i - x_j|.
struct Vec2 {
  double x, y;
};
inline Vec2 swarm_increment(int i, const std::vector<Vec2> &pos,
                            const std::vector<std::vector<double>> &W,
                            const std::vector<std::vector<bool>> &V,
                            double sigma) {
  double vis = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t j = 0; j < pos.size(); ++j) {
    if (static_cast<int>(j) == i || !V[i][j])
      continue;
    vis += 1.0;
    const double dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y;
    const double d = std::sqrt(dx * dx + dy * dy);
    const double pref = -sigma * std::log(W[i][j]);
    sx += (pref - d) * dx / d;
    sy += (pref - d) * dy / d;
  }
  if (vis == 0.0)
    return {0.0, 0.0};
  return {sx / (2.0 * vis), sy / (2.0 * vis)};
}

/// Number of points within radius of c (inclusive).
template <class P>
std::size_t count_within(const std::vector<P> &pts, double cx, double cy, double radius) {
  std::size_t n = 0;
  for (const auto &p : pts)
    if (std::hypot(p.x - cx, p.y - cy) <= radius)
      ++n;
  return n;
}

/// Negated, shifted Ackley function on the unit cube, scaled into [-1, 0].
/// Maximum 0 at u = shift.
inline double shifted_ackley(const Eigen::VectorXd &u) {
  static const double shift[9] = {0.62, 0.31, 0.45, 0.71, 0.38, 0.57, 0.66, 0.29, 0.52};
  double s2 = 0.0, sc = 0.0;
  const int n = static_cast<int>(u.size());
  for (int d = 0; d < n; ++d) {
    const double z = 4.0 * (u[d] - shift[d % 9]);
    s2 += z * z;
    sc += std::cos(2.0 * M_PI * z);
  }
  const double a = -20.0 * std::exp(-0.2 * std::sqrt(s2 / n)) - std::exp(sc / n) +
                   20.0 + std::exp(1.0);
  return -std::clamp(a / (20.0 + std::exp(1.0)), 0.0, 1.0);
}

}  // namespace oracle
