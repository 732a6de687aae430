#include "shortcut/gmm.hpp"

#include <cmath>
#include <stdexcept>

#include "shortcut/rng.hpp"

namespace shortcut {

MixtureSpec::MixtureSpec(int dim, std::vector<GaussianCluster> clusters)
    : dim_(dim), clusters_(std::move(clusters)) {
  if (dim_ < 1) throw std::invalid_argument("MixtureSpec: dim must be >= 1");
  if (clusters_.empty()) throw std::invalid_argument("MixtureSpec: needs at least one cluster");
  double weight_sum = 0.0;
  for (std::size_t k = 0; k < clusters_.size(); ++k) {
    const auto& c = clusters_[k];
    const std::string where = "MixtureSpec: cluster " + std::to_string(k);
    if (c.mean.size() != dim_) throw std::invalid_argument(where + ": mean dimension mismatch");
    if (!c.mean.allFinite()) throw std::invalid_argument(where + ": mean has non-finite entries");
    if (!(c.sigma > 0.0)) throw std::invalid_argument(where + ": sigma must be > 0");
    if (!(c.weight > 0.0)) throw std::invalid_argument(where + ": weight must be > 0");
    if (c.label != 1 && c.label != -1)
      throw std::invalid_argument(where + ": label must be +1 or -1");
    weight_sum += c.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12)
    throw std::invalid_argument("MixtureSpec: weights sum to " + std::to_string(weight_sum) +
                                ", expected 1 within 1e-12");
}

Vector LabeledDataset::label_vector() const {
  Vector y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) y[static_cast<Eigen::Index>(i)] = labels[i];
  return y;
}

Vector LabeledDataset::shortcut_vector() const {
  Vector g(shortcut_labels.size());
  for (std::size_t i = 0; i < shortcut_labels.size(); ++i)
    g[static_cast<Eigen::Index>(i)] = shortcut_labels[i];
  return g;
}

LabeledDataset sample(const MixtureSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  const int d = spec.dim();
  const auto& clusters = spec.clusters();

  LabeledDataset out;
  out.inputs.resize(n, d);
  out.labels.resize(static_cast<std::size_t>(n));
  out.cluster_ids.resize(static_cast<std::size_t>(n));
  out.shortcut_labels.resize(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    SplitMix64 rng(derive_stream(seed, static_cast<std::uint64_t>(i)));
    const double u = rng.next_double();
    std::size_t k = 0;
    double cdf = 0.0;
    for (; k < clusters.size(); ++k) {
      cdf += clusters[k].weight;
      if (u < cdf) break;
    }
    if (k == clusters.size()) k = clusters.size() - 1;  // guard for u ~ 1

    const auto& c = clusters[k];
    for (int j = 0; j < d; ++j) out.inputs(i, j) = c.mean[j] + c.sigma * rng.next_gaussian();
    out.labels[static_cast<std::size_t>(i)] = c.label;
    out.cluster_ids[static_cast<std::size_t>(i)] = static_cast<int>(k);
    out.shortcut_labels[static_cast<std::size_t>(i)] =
        c.role == ClusterRole::Biased ? c.label : -c.label;
  }
  return out;
}

Matrix second_moment(const MixtureSpec& spec) {
  Matrix m = Matrix::Zero(spec.dim(), spec.dim());
  for (const auto& c : spec.clusters()) m += c.weight * (c.mean * c.mean.transpose());
  return m;
}

double variance_sum(const MixtureSpec& spec) {
  double s = 0.0;
  for (const auto& c : spec.clusters()) s += c.weight * c.sigma * c.sigma;
  return s;
}

MixtureSpec toy_four_cluster(double sigma, double pi0) {
  if (!(pi0 > 0.0 && pi0 < 1.0))
    throw std::invalid_argument("toy_four_cluster: pi0 must lie in (0, 1)");
  if (!(sigma > 0.0)) throw std::invalid_argument("toy_four_cluster: sigma must be > 0");

  auto cluster = [&](double x, double y, double weight, int label, ClusterRole role) {
    GaussianCluster c;
    c.mean = Vector(2);
    c.mean << x, y;
    c.sigma = sigma;
    c.weight = weight;
    c.label = label;
    c.role = role;
    return c;
  };
  std::vector<GaussianCluster> clusters;
  clusters.push_back(cluster(+1.0, 0.0, pi0 / 2.0, +1, ClusterRole::Biased));
  clusters.push_back(cluster(-1.0, 0.0, pi0 / 2.0, -1, ClusterRole::Biased));
  clusters.push_back(cluster(0.0, +1.0, (1.0 - pi0) / 2.0, +1, ClusterRole::Conflicting));
  clusters.push_back(cluster(0.0, -1.0, (1.0 - pi0) / 2.0, -1, ClusterRole::Conflicting));
  return MixtureSpec(2, std::move(clusters));
}

std::vector<int> positive_label_set(const MixtureSpec& spec) {
  std::vector<int> set;
  bool any_negative = false;
  for (std::size_t k = 0; k < spec.cluster_count(); ++k) {
    if (spec.clusters()[k].label > 0)
      set.push_back(static_cast<int>(k));
    else
      any_negative = true;
  }
  if (set.empty() || !any_negative)
    throw std::invalid_argument("positive_label_set: mixture needs clusters of both labels");
  return set;
}

const char* role_name(ClusterRole role) {
  return role == ClusterRole::Biased ? "biased" : "conflicting";
}

ClusterRole role_from_name(const std::string& name) {
  if (name == "biased") return ClusterRole::Biased;
  if (name == "conflicting") return ClusterRole::Conflicting;
  throw std::invalid_argument("unknown cluster role '" + name + "'");
}

}  // namespace shortcut
