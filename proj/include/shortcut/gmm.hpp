#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shortcut/linalg.hpp"

namespace shortcut {

// Cluster roles: Biased clusters carry the shortcut attribute aligned with
// their label, Conflicting clusters carry it misaligned.
enum class ClusterRole { Biased, Conflicting };

struct GaussianCluster {
  Vector mean;
  double sigma = 1.0;   // isotropic standard deviation, > 0
  double weight = 1.0;  // mixture weight, > 0
  int label = +1;       // in {-1, +1}
  ClusterRole role = ClusterRole::Biased;
};

// A labeled isotropic Gaussian mixture. Immutable after construction;
// construction validates all invariants loudly instead of renormalizing.
class MixtureSpec {
 public:
  MixtureSpec(int dim, std::vector<GaussianCluster> clusters);

  int dim() const { return dim_; }
  const std::vector<GaussianCluster>& clusters() const { return clusters_; }
  std::size_t cluster_count() const { return clusters_.size(); }

 private:
  int dim_;
  std::vector<GaussianCluster> clusters_;
};

struct LabeledDataset {
  Matrix inputs;                     // n x d
  std::vector<int> labels;           // +1 / -1 per row
  std::vector<int> cluster_ids;      // generating cluster (or group id) per row
  std::vector<int> shortcut_labels;  // empty when the dataset has no shortcut labeling

  Eigen::Index n() const { return inputs.rows(); }
  Eigen::Index dim() const { return inputs.cols(); }
  Vector label_vector() const;
  Vector shortcut_vector() const;
};

// Draws n rows. Row i uses its own derived RNG stream, so the result is a
// pure function of (spec, n, seed) and rows could be produced in any order.
LabeledDataset sample(const MixtureSpec& spec, int n, std::uint64_t seed);

// M = sum_k pi_k mu_k mu_k^T (symmetric PSD).
Matrix second_moment(const MixtureSpec& spec);

// sum_k pi_k sigma_k^2, the additive term shared by every eigenvalue.
double variance_sum(const MixtureSpec& spec);

// The four-cluster 2-D toy geometry: shortcut pair at (+-1, 0) carrying
// total weight pi0, conflicting pair at (0, +-1) carrying the rest. All
// means unit-norm, all sigmas equal.
MixtureSpec toy_four_cluster(double sigma, double pi0);

// Indices of clusters labeled +1; requires both labels to be present.
std::vector<int> positive_label_set(const MixtureSpec& spec);

const char* role_name(ClusterRole role);
ClusterRole role_from_name(const std::string& name);

}  // namespace shortcut
