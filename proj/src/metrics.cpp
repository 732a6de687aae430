#include "shortcut/metrics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace shortcut {

double predictability(const std::vector<int>& y, const std::vector<int>& g) {
  if (y.size() != g.size() || y.empty())
    throw std::invalid_argument("predictability: label vectors must be nonempty and equal-length");
  long dot = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if ((y[i] != 1 && y[i] != -1) || (g[i] != 1 && g[i] != -1))
      throw std::invalid_argument("predictability: entries must be +1 or -1");
    dot += y[i] * g[i];
  }
  return double(dot) / double(y.size());
}

double availability(const KernelMatrix& k, const Vector& g) {
  if (k.entries.rows() != g.size())
    throw std::invalid_argument("availability: label length mismatch with kernel");
  const double g_norm2 = g.squaredNorm();
  if (!(g_norm2 > 0.0)) throw std::invalid_argument("availability: g must be nonzero");
  const double k_fro = k.entries.norm();
  if (!(k_fro > 0.0)) throw std::invalid_argument("availability: kernel must be nonzero");
  return g.dot(k.entries * g) / (g_norm2 * k_fro);
}

MetricSeries availability_series(const std::vector<std::pair<long, NetworkModel>>& snapshots,
                                 const Matrix& sample_inputs,
                                 const std::vector<std::pair<std::string, Vector>>& labels,
                                 int grad_block) {
  if (snapshots.empty()) throw std::invalid_argument("availability_series: no snapshots");
  MetricSeries series;
  for (const auto& [step, model] : snapshots) {
    const KernelMatrix k = empirical_ntk(model, sample_inputs, grad_block);
    double truth = std::nan(""), shortcut_value = std::nan("");
    for (const auto& [name, g] : labels) {
      const double a = availability(k, g);
      series.add(step, "availability", name, a);
      if (name == "ground_truth") truth = a;
      if (name == "shortcut") shortcut_value = a;
    }
    if (!std::isnan(truth) && !std::isnan(shortcut_value))
      series.add(step, "availability_gap", "shortcut-ground_truth", shortcut_value - truth);
  }
  return series;
}

MetricSeries moving_average(const MetricSeries& series, int window) {
  if (window <= 1) return series;
  std::map<std::pair<std::string, std::string>, std::vector<double>> history;
  MetricSeries out;
  for (const auto& r : series.records) {
    auto& h = history[{r.metric, r.label}];
    h.push_back(r.value);
    const std::size_t take = std::min<std::size_t>(h.size(), static_cast<std::size_t>(window));
    double sum = 0.0;
    for (std::size_t i = h.size() - take; i < h.size(); ++i) sum += h[i];
    out.add(r.step, r.metric, r.label, sum / double(take));
  }
  return out;
}

}  // namespace shortcut
