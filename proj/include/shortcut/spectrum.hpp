#pragma once

#include <vector>

#include "shortcut/gmm.hpp"
#include "shortcut/linalg.hpp"

namespace shortcut {

// One eigenpair of the linear kernel on a mixture: eigenvalue, unit
// direction, the moment-matrix eigenvalue a it came from, and the
// eigenfunction normalizer c = sqrt(value).
struct EigenPair {
  double value = 0.0;
  Vector direction;
  double moment_eigenvalue = 0.0;
  double normalizer = 0.0;
};

struct SpectralDecomposition {
  std::vector<EigenPair> pairs;  // sorted by value descending, d entries
  int rank = 0;                  // m = rank(sum pi mu mu^T); pairs past m share value
};

struct FeatureWeights {
  Matrix directions;  // d x m, orthonormal columns
  Vector values;      // weight per column
};

// Closed-form eigenpairs of k(x, y) = <x, y> on the mixture: directions in
// the mean span get value = variance_sum + a_i, the orthogonal complement
// gets value = variance_sum exactly. Degenerate moment eigenvalues return an
// orthonormal basis of the eigenspace; ties are ordered by ascending
// coordinate-lexicographic comparison with first nonzero entry positive.
SpectralDecomposition linear_kernel_eigens(const MixtureSpec& spec);

// phi(x) = x . v / c. Rejects pairs with zero normalizer (value == 0).
double eigenfunction_eval(const EigenPair& pair, const Vector& x);

struct HY {
  Matrix h;     // m x m, H_jk = variance_sum * delta_jk + v_j . M v_k
  Vector yvec;  // m, y_j = sum_{k in C} pi_k mu_k.v_j - sum_{k not in C} pi_k mu_k.v_j
};

// positive_set holds 0-based cluster indices labeled +1; it must be a
// nonempty proper subset of the clusters.
HY build_H_y(const MixtureSpec& spec, const Matrix& directions,
             const std::vector<int>& positive_set);

// Converged feature weights from the full linear solve w = H^-1 y. Reduces
// to the per-direction quotient exactly when H is diagonal.
FeatureWeights converged_weights_general(const MixtureSpec& spec, const Matrix& directions,
                                         const std::vector<int>& positive_set);

// Closed form for pairwise-orthogonal nonzero means: direction mu_k/|mu_k|,
// weight +-pi_k |mu_k| / (variance_sum + pi_k |mu_k|^2) signed by membership
// in the positive set.
FeatureWeights converged_weights_orthogonal(const MixtureSpec& spec,
                                            const std::vector<int>& positive_set);

// w_i / w_j of the converged MSE weights: the invariant of MSE+SD for any
// lambda and the limit of CE+SD as lambda -> infinity.
double weight_ratio_mse(const MixtureSpec& spec, const Matrix& directions,
                        const std::vector<int>& positive_set, int i, int j);

// True when all pairs of cluster means are orthogonal within 1e-10 (relative)
// and no mean is zero, i.e. the orthogonal closed form applies.
bool means_orthogonal(const MixtureSpec& spec);

// The first `rank` eigendirections (mean span) as matrix columns.
Matrix span_directions(const SpectralDecomposition& decomposition);

}  // namespace shortcut
