#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace shortcut {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Jacobi sweeps did not reach the off-diagonal tolerance within the cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved_residual)
      : std::runtime_error(what), achieved_residual_(achieved_residual) {}
  double achieved_residual() const { return achieved_residual_; }

 private:
  double achieved_residual_;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // column i pairs with values[i]; orthonormal
};

// Cyclic Jacobi eigensolver for dense symmetric matrices.
//
// Requires |A - A^T|_max < 1e-8. Runs threshold-free cyclic sweeps until the
// off-diagonal Frobenius norm drops below 1e-12 * |A|_F (cap: 100 sweeps,
// then ConvergenceError carrying the achieved residual). Eigenvalues are
// sorted descending; each eigenvector is oriented so its first nonzero
// coordinate is positive.
SymmetricEigen symmetric_eig(const Matrix& a);

// |A V - V diag(lambda)|_F / |A|_F.
double eig_residual(const Matrix& a, const SymmetricEigen& e);

// Cholesky solve for symmetric positive definite systems; throws
// SingularMatrixError when the factorization breaks down.
Vector solve_spd(const Matrix& a, const Vector& b);

}  // namespace shortcut
