#pragma once

#include <string>
#include <utility>
#include <vector>

#include "shortcut/entk.hpp"
#include "shortcut/network.hpp"

namespace shortcut {

// y^T g / n for +-1 label vectors; symmetric in its arguments, in [-1, 1].
double predictability(const std::vector<int>& y, const std::vector<int>& g);

// g^T K g / (|g|^2 |K|_F). Accepts any real g with |g| > 0; lies in [0, 1]
// for PSD K. Equals sum_i lambda_i / sqrt(sum_j lambda_j^2) <v_i, g/|g|>^2.
double availability(const KernelMatrix& k, const Vector& g);

struct MetricRecord {
  long step = 0;
  std::string metric;  // "availability", "availability_gap", "accuracy", ...
  std::string label;   // "ground_truth", "shortcut", or a custom name
  double value = 0.0;
};

struct MetricSeries {
  std::vector<MetricRecord> records;
  void add(long step, const std::string& metric, const std::string& label, double value) {
    records.push_back({step, metric, label, value});
  }
};

// For each snapshot, recomputes the eNTK of the (fixed) sample and evaluates
// the availability of every named label vector. When both "ground_truth" and
// "shortcut" are present, also emits the availability_gap (shortcut minus
// ground truth) per step.
MetricSeries availability_series(const std::vector<std::pair<long, NetworkModel>>& snapshots,
                                 const Matrix& sample_inputs,
                                 const std::vector<std::pair<std::string, Vector>>& labels,
                                 int grad_block = 64);

// Trailing moving average per (metric, label) stream; window <= 1 is identity.
MetricSeries moving_average(const MetricSeries& series, int window);

}  // namespace shortcut
