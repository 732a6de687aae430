#include "shortcut/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace shortcut {

namespace {

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

void check_directions(const Matrix& directions, int dim) {
  if (directions.rows() != dim)
    throw std::invalid_argument("directions: dimension mismatch with mixture");
  if (directions.cols() < 1) throw std::invalid_argument("directions: need at least one column");
  const Matrix gram = directions.transpose() * directions;
  const double err = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-8)
    throw std::invalid_argument("directions: columns are not orthonormal (max deviation " +
                                std::to_string(err) + ")");
}

std::set<int> check_positive_set(const std::vector<int>& positive_set, std::size_t n_clusters) {
  std::set<int> c(positive_set.begin(), positive_set.end());
  if (c.empty()) throw std::invalid_argument("positive_set: must be nonempty");
  if (c.size() >= n_clusters)
    throw std::invalid_argument("positive_set: must be a proper subset of the clusters");
  if (*c.begin() < 0 || *c.rbegin() >= static_cast<int>(n_clusters))
    throw std::invalid_argument("positive_set: cluster index out of range");
  return c;
}

}  // namespace

SpectralDecomposition linear_kernel_eigens(const MixtureSpec& spec) {
  const int d = spec.dim();
  const double varsum = variance_sum(spec);
  const Matrix m = second_moment(spec);
  const SymmetricEigen eig = symmetric_eig(m);

  const double a_max = eig.values.size() > 0 ? std::max(eig.values[0], 0.0) : 0.0;
  const double rank_tol = std::max(a_max * 1e-12, 1e-300);

  SpectralDecomposition out;
  out.pairs.resize(static_cast<std::size_t>(d));
  out.rank = 0;
  for (int i = 0; i < d; ++i) {
    EigenPair& p = out.pairs[static_cast<std::size_t>(i)];
    p.direction = eig.vectors.col(i);
    if (eig.values[i] > rank_tol) {
      p.moment_eigenvalue = eig.values[i];
      p.value = varsum + eig.values[i];
      ++out.rank;
    } else {
      // orthogonal complement of the mean span: a = 0 exactly
      p.moment_eigenvalue = 0.0;
      p.value = varsum;
    }
    p.normalizer = std::sqrt(p.value);
  }

  // Deterministic order inside degenerate blocks.
  const double tie_tol = 1e-12 * std::max(1.0, varsum + a_max);
  std::size_t start = 0;
  while (start < out.pairs.size()) {
    std::size_t end = start + 1;
    while (end < out.pairs.size() &&
           std::abs(out.pairs[end].value - out.pairs[start].value) <= tie_tol)
      ++end;
    std::sort(out.pairs.begin() + static_cast<std::ptrdiff_t>(start),
              out.pairs.begin() + static_cast<std::ptrdiff_t>(end),
              [](const EigenPair& a, const EigenPair& b) { return lex_less(a.direction, b.direction); });
    start = end;
  }
  return out;
}

double eigenfunction_eval(const EigenPair& pair, const Vector& x) {
  if (x.size() != pair.direction.size())
    throw std::invalid_argument("eigenfunction_eval: dimension mismatch");
  if (!(pair.normalizer > 0.0))
    throw std::domain_error("eigenfunction_eval: eigenpair has zero eigenvalue, "
                            "no normalized eigenfunction exists");
  return x.dot(pair.direction) / pair.normalizer;
}

HY build_H_y(const MixtureSpec& spec, const Matrix& directions,
             const std::vector<int>& positive_set) {
  check_directions(directions, spec.dim());
  const std::set<int> c = check_positive_set(positive_set, spec.cluster_count());

  const double varsum = variance_sum(spec);
  const Matrix m = second_moment(spec);
  const Eigen::Index n_dir = directions.cols();

  HY out;
  out.h = varsum * Matrix::Identity(n_dir, n_dir) + directions.transpose() * m * directions;
  out.yvec = Vector::Zero(n_dir);
  for (std::size_t k = 0; k < spec.cluster_count(); ++k) {
    const auto& cl = spec.clusters()[k];
    const double sign = c.count(static_cast<int>(k)) ? 1.0 : -1.0;
    out.yvec += sign * cl.weight * (directions.transpose() * cl.mean);
  }
  return out;
}

FeatureWeights converged_weights_general(const MixtureSpec& spec, const Matrix& directions,
                                         const std::vector<int>& positive_set) {
  const HY hy = build_H_y(spec, directions, positive_set);
  FeatureWeights out;
  out.directions = directions;
  try {
    out.values = solve_spd(hy.h, hy.yvec);
  } catch (const SingularMatrixError&) {
    throw SingularMatrixError(
        "converged_weights_general: H is singular (variance_sum = 0 with directions "
        "outside the mean span)");
  }
  return out;
}

FeatureWeights converged_weights_orthogonal(const MixtureSpec& spec,
                                            const std::vector<int>& positive_set) {
  const std::size_t n = spec.cluster_count();
  const std::set<int> c = check_positive_set(positive_set, n);

  for (std::size_t k = 0; k < n; ++k)
    if (spec.clusters()[k].mean.norm() <= 0.0)
      throw std::invalid_argument("converged_weights_orthogonal: cluster " + std::to_string(k) +
                                  " has a zero mean, direction mu/|mu| is undefined");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = spec.clusters()[i].mean;
      const auto& b = spec.clusters()[j].mean;
      if (std::abs(a.dot(b)) > 1e-10 * a.norm() * b.norm())
        throw std::invalid_argument("converged_weights_orthogonal: means of clusters " +
                                    std::to_string(i) + " and " + std::to_string(j) +
                                    " are not orthogonal");
    }
  }

  const double varsum = variance_sum(spec);
  FeatureWeights out;
  out.directions.resize(spec.dim(), static_cast<Eigen::Index>(n));
  out.values.resize(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto& cl = spec.clusters()[k];
    const double norm = cl.mean.norm();
    const double magnitude = cl.weight * norm / (varsum + cl.weight * norm * norm);
    out.directions.col(static_cast<Eigen::Index>(k)) = cl.mean / norm;
    out.values[static_cast<Eigen::Index>(k)] =
        c.count(static_cast<int>(k)) ? magnitude : -magnitude;
  }
  return out;
}

double weight_ratio_mse(const MixtureSpec& spec, const Matrix& directions,
                        const std::vector<int>& positive_set, int i, int j) {
  const FeatureWeights w = converged_weights_general(spec, directions, positive_set);
  if (i < 0 || j < 0 || i >= w.values.size() || j >= w.values.size())
    throw std::invalid_argument("weight_ratio_mse: index out of range");
  if (std::abs(w.values[j]) <= 1e-12)
    throw std::domain_error("weight_ratio_mse: denominator weight w_j is zero (|w_j| <= 1e-12)");
  return w.values[i] / w.values[j];
}

bool means_orthogonal(const MixtureSpec& spec) {
  const std::size_t n = spec.cluster_count();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = spec.clusters()[i].mean;
    if (a.norm() <= 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b = spec.clusters()[j].mean;
      if (std::abs(a.dot(b)) > 1e-10 * a.norm() * b.norm()) return false;
    }
  }
  return true;
}

Matrix span_directions(const SpectralDecomposition& decomposition) {
  if (decomposition.rank == 0)
    throw std::invalid_argument("span_directions: decomposition has rank 0");
  const Eigen::Index d = decomposition.pairs.front().direction.size();
  Matrix out(d, decomposition.rank);
  for (int i = 0; i < decomposition.rank; ++i)
    out.col(i) = decomposition.pairs[static_cast<std::size_t>(i)].direction;
  return out;
}

}  // namespace shortcut
