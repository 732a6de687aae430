#pragma once

#include <vector>

#include "shortcut/network.hpp"

namespace shortcut {

struct KernelMatrix {
  Matrix entries;               // n x n symmetric PSD
  std::vector<int> sample_ids;  // dataset row indices the kernel was built from
};

struct KernelSpectrum {
  Vector values;   // descending
  Matrix vectors;  // orthonormal columns
};

// Gram matrix of per-sample parameter gradients, K[a][b] =
// <grad_w f(x_a), grad_w f(x_b)>, assembled from gradient blocks of
// `grad_block` rows so peak memory stays at O(grad_block * n_params).
// For Linear models this is exactly X X^T.
KernelMatrix empirical_ntk(const NetworkModel& model, const Matrix& x, int grad_block = 64);

// Cross-kernel K(Xa, Xb) between two sample sets under the same model.
Matrix cross_ntk(const NetworkModel& model, const Matrix& xa, const Matrix& xb,
                 int grad_block = 64);

// Kernel row K(x, X) for a single probe point.
Vector kernel_row(const NetworkModel& model, const Matrix& x_train, const Vector& x);

KernelSpectrum kernel_eig(const KernelMatrix& k);

// Lazy-regime closed-form predictor
//   f = K_cross K_train^-1 (I - exp(-eta K_train t)) Y
// through the spectral form, assuming zero network output at t = 0. Throws
// SingularMatrixError (with the condition number) when
// min lambda <= 1e-10 * max lambda.
Vector lazy_predict(const KernelMatrix& k_train, const Matrix& k_cross, const Vector& y,
                    double eta, double t);

// <v_i, Y - f_t> for every eigenvector.
Vector spectral_residual(const KernelSpectrum& spectrum, const Vector& y, const Vector& f_t);

// One additive component of the converged kernel predictor:
//   f_i(x) = K(x, X) alpha_i,  alpha_i = v_i <v_i, Y> / lambda_i.
struct FeatureComponent {
  int index = 0;
  double eigenvalue = 0.0;
  Vector alpha;  // n coefficients
  double evaluate(const Vector& kernel_row_at_x) const { return kernel_row_at_x.dot(alpha); }
};

// Components for all modes above the relative eigenvalue floor; modes below
// it are truncated and their indices reported.
struct FeatureDecomposition {
  std::vector<FeatureComponent> components;
  std::vector<int> truncated;
};
FeatureDecomposition feature_components(const KernelSpectrum& spectrum, const Vector& y,
                                        double relative_floor = 1e-10);

// Component values at one probe point plus their sum (the ridgeless kernel
// prediction up to the truncation).
struct FeatureValues {
  std::vector<int> indices;
  Vector values;
  double total = 0.0;
};
FeatureValues feature_decompose(const KernelSpectrum& spectrum, const Vector& y,
                                const Vector& kernel_row_at_x, double relative_floor = 1e-10);

// Coordinate-wise |d/dx of the MSE loss of component i against label y|,
// differentiating the kernel row at the frozen parameters (ReLU indicator
// derivative taken as 0 almost everywhere).
Vector feature_saliency(const NetworkModel& model, const Matrix& x_train,
                        const KernelSpectrum& spectrum, const Vector& y_train,
                        int component_index, const Vector& x, double y_label,
                        double relative_floor = 1e-10);

// Smallest eigenvalue must satisfy min_eig >= -1e-6 * trace / n; used by
// tests and assertions on computed kernels.
double min_eigenvalue(const KernelMatrix& k);

}  // namespace shortcut
