#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "shortcut/network.hpp"

namespace shortcut {

struct LossSpec {
  enum class Base { MSE, CE };
  Base base = Base::MSE;
  double sd_lambda = 0.0;  // 0 disables the squared-output penalty
};

struct TrainConfig {
  double learning_rate = 0.001;
  double weight_decay = 0.0;
  long steps = 0;
  std::optional<int> batch_size;  // nullopt = full batch
  std::uint64_t seed = 0;         // batch shuffling stream
  bool zero_init_output = true;   // echoed into run metadata by callers
};

struct TrainTrace {
  std::vector<double> losses;                        // loss at step t, pre-update
  std::vector<std::pair<long, Vector>> snapshots;    // (step, params after that many updates)
};

class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(long step, double loss, TrainTrace trace)
      : std::runtime_error("training diverged at step " + std::to_string(step) +
                           " (loss = " + std::to_string(loss) + ")"),
        step(step),
        trace(std::move(trace)) {}
  long step;
  TrainTrace trace;
};

// Batch-mean loss and exact analytic gradient w.r.t. the flat parameter
// vector. MSE: 0.5 (f - y)^2. CE: log(1 + exp(-y f)). The SD penalty adds
// 0.5 * sd_lambda * f^2 per sample, i.e. sd_lambda * f to the output
// derivative. ReLU subgradient at 0 is taken as 0.
struct LossGrad {
  double loss = 0.0;
  Vector grad;
};
LossGrad loss_and_grad(const NetworkModel& model, const Matrix& x, const Vector& y,
                       const LossSpec& loss);

// Plain (mini)batch gradient descent with additive weight decay. Minibatches
// walk a reshuffled index permutation per epoch, driven by config.seed.
// Snapshot step s stores the parameters after s updates (0 = initial).
// Throws TrainingDivergedError (carrying the trace) when the loss leaves
// [0, 1e12] or stops being finite.
std::pair<NetworkModel, TrainTrace> train(NetworkModel model, const Matrix& x, const Vector& y,
                                          const TrainConfig& config, const LossSpec& loss,
                                          std::span<const long> snapshot_steps = {});

// Runs full-batch descent until the loss changes by less than `tol` over a
// trailing window of `window` steps, or `max_steps` is hit.
struct ConvergedTraining {
  NetworkModel model;
  long steps_run = 0;
  bool converged = false;
  double final_loss = 0.0;
};
ConvergedTraining train_to_convergence(NetworkModel model, const Matrix& x, const Vector& y,
                                       double learning_rate, const LossSpec& loss,
                                       long max_steps, long window = 1000, double tol = 1e-9);

struct BoundingBox {
  double xmin, xmax, ymin, ymax;
};

// Sign of the logit over cell centers of a resolution x resolution grid,
// row-major with the top row at ymax. Ties map to 0. Requires d = 2.
Eigen::MatrixXi decision_boundary_raster(const NetworkModel& model, const BoundingBox& bbox,
                                         int resolution);

// Midpoints of sign changes between horizontally/vertically adjacent raster
// cells, in data coordinates.
std::vector<std::pair<double, double>> boundary_points(const Eigen::MatrixXi& raster,
                                                       const BoundingBox& bbox);

// Total-least-squares line through the boundary points; returns the slope
// dy/dx of the principal direction. Throws when fewer than two points or the
// boundary is vertical.
double fit_boundary_slope(const std::vector<std::pair<double, double>>& points);

// Fraction of rows with y * f(x) > 0.
double accuracy(const NetworkModel& model, const Matrix& x, const Vector& y);

}  // namespace shortcut
