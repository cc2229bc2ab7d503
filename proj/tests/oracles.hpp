#pragma once

// Independent reference implementations used only by tests. These routes are
// deliberately different from the library code paths: explicit two-pass
// loops for moments, a hand-rolled cyclic Jacobi sweep for symmetric
// eigenproblems, and central finite differences for gradients.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

namespace oracles {

// Two-pass mean/covariance with explicit loops. divide_by_rows=false divides
// by the column count (sample count), true divides by the row count.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> two_pass_covariance(
    const Eigen::MatrixXd& x, double eps, bool divide_by_channels = false) {
  const Eigen::Index c = x.rows(), b = x.cols();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(c);
  for (Eigen::Index i = 0; i < c; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < b; ++j) acc += x(i, j);
    mean(i) = acc / static_cast<double>(b);
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(c, c);
  const double denom = divide_by_channels ? static_cast<double>(c)
                                          : static_cast<double>(b);
  for (Eigen::Index p = 0; p < c; ++p) {
    for (Eigen::Index q = 0; q < c; ++q) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < b; ++j) {
        acc += (x(p, j) - mean(p)) * (x(q, j) - mean(q));
      }
      cov(p, q) = acc / denom;
    }
  }
  for (Eigen::Index p = 0; p < c; ++p) cov(p, p) += eps;
  return {mean, cov};
}

// Cyclic Jacobi eigendecomposition for symmetric matrices. Returns
// eigenvalues sorted descending and matching eigenvector columns.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> jacobi_symmetric_eig(
    Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-28) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = 0.5 * (a(q, q) - a(p, p)) / a(p, q);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cos_r = 1.0 / std::sqrt(t * t + 1.0);
        const double sin_r = t * cos_r;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = cos_r * akp - sin_r * akq;
          a(k, q) = sin_r * akp + cos_r * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = cos_r * apk - sin_r * aqk;
          a(q, k) = sin_r * apk + cos_r * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = cos_r * vkp - sin_r * vkq;
          v(k, q) = sin_r * vkp + cos_r * vkq;
        }
      }
    }
  }
  Eigen::VectorXd values = a.diagonal();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index i, Eigen::Index j) { return values(i) > values(j); });
  Eigen::VectorXd sorted_values(n);
  Eigen::MatrixXd sorted_vectors(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sorted_values(i) = values(order[static_cast<std::size_t>(i)]);
    sorted_vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return {sorted_values, sorted_vectors};
}

// Inverse matrix square root of a symmetric positive matrix via the Jacobi
// route, with the same eigenvalue clamp the library documents.
inline Eigen::MatrixXd inverse_sqrt_via_jacobi(const Eigen::MatrixXd& m,
                                               double eps) {
  auto [values, vectors] = jacobi_symmetric_eig(m);
  Eigen::VectorXd scale(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double clamped = std::max(values(i), eps);
    scale(i) = clamped > 0.0 ? 1.0 / std::sqrt(clamped) : 0.0;
  }
  return vectors * scale.asDiagonal() * vectors.transpose();
}

// Central finite differences of a scalar function of a matrix.
inline Eigen::MatrixXd finite_diff_grad(
    const std::function<double(const Eigen::MatrixXd&)>& loss,
    Eigen::MatrixXd x, double h = 1e-4) {
  Eigen::MatrixXd grad(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double orig = x(i, j);
      x(i, j) = orig + h;
      const double up = loss(x);
      x(i, j) = orig - h;
      const double down = loss(x);
      x(i, j) = orig;
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

// Worst per-entry relative error, with a scale-aware floor so entries that
// are incidentally near zero do not dominate.
inline double max_rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  const double floor = std::max(1e-12, 1e-6 * scale);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double denom =
          std::max({std::abs(a(i, j)), std::abs(b(i, j)), floor});
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / denom);
    }
  }
  return worst;
}

}  // namespace oracles
