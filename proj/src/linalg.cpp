#include "shortcut/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace shortcut {

namespace {

double offdiag_norm(const Matrix& a) {
  double sum = 0.0;
  const auto n = a.rows();
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = p + 1; q < n; ++q) sum += a(p, q) * a(p, q);
  return std::sqrt(2.0 * sum);
}

void fix_sign(Matrix& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      const double x = v(r, c);
      if (std::abs(x) > 1e-12) {
        if (x < 0.0) v.col(c) = -v.col(c);
        break;
      }
    }
  }
}

}  // namespace

SymmetricEigen symmetric_eig(const Matrix& input) {
  if (input.rows() != input.cols())
    throw std::invalid_argument("symmetric_eig: matrix must be square");
  const Eigen::Index n = input.rows();
  if (n == 0) return {Vector(0), Matrix(0, 0)};

  const double asym = (input - input.transpose()).cwiseAbs().maxCoeff();
  if (asym >= 1e-8)
    throw std::invalid_argument("symmetric_eig: matrix is not symmetric (|A - A^T|_max = " +
                                std::to_string(asym) + ")");

  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double scale = a.norm();
  const double tol = 1e-12 * std::max(scale, 1e-300);

  constexpr int kMaxSweeps = 100;
  double off = offdiag_norm(a);
  for (int sweep = 0; sweep < kMaxSweeps && off > tol; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= tol / double(n * n)) continue;

        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        a(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    off = offdiag_norm(a);
  }
  if (off > tol)
    throw ConvergenceError("symmetric_eig: Jacobi sweeps exhausted, off-diagonal norm " +
                               std::to_string(off) + " > tolerance " + std::to_string(tol),
                           off);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  fix_sign(out.vectors);
  return out;
}

double eig_residual(const Matrix& a, const SymmetricEigen& e) {
  const double denom = std::max(a.norm(), 1e-300);
  return (a * e.vectors - e.vectors * e.values.asDiagonal()).norm() / denom;
}

Vector solve_spd(const Matrix& a, const Vector& b) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw SingularMatrixError("solve_spd: matrix is not positive definite");
  return llt.solve(b);
}

}  // namespace shortcut
