#pragma once

#include <cstdint>

#include "shortcut/linalg.hpp"

namespace shortcut {

enum class Arch { Linear, TwoLayerReLU };

// Scalar-output network with no bias terms anywhere. Parameter layout is
// layer-major, row-major within a layer:
//   Linear:       [w]                          (d entries)
//   TwoLayerReLU: [W1 row 0, ..., W1 row h-1, w2]   (h*d + h entries)
struct NetworkModel {
  Arch arch = Arch::Linear;
  int input_dim = 0;
  int width = 0;  // hidden units; 0 for Linear
  Vector params;

  int param_count() const {
    return arch == Arch::Linear ? input_dim : width * input_dim + width;
  }

  // W1 as a width x input_dim view (TwoLayerReLU only).
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
  hidden_weights() const {
    return {params.data(), width, input_dim};
  }
  Eigen::Map<const Vector> output_weights() const {
    if (arch == Arch::Linear) return {params.data(), input_dim};
    return {params.data() + static_cast<std::ptrdiff_t>(width) * input_dim, width};
  }
};

// Hidden weights ~ N(0, 1/fan_in); output layer zero when zero_init_output,
// otherwise also fan-in Gaussian. Deterministic in seed (stream 1 for the
// hidden layer, stream 2 for the output layer).
NetworkModel init_network(Arch arch, int input_dim, int width, std::uint64_t seed,
                          bool zero_init_output);

// Logits for each row of X. Linear: X w; TwoLayerReLU: ReLU(X W1^T) w2.
Vector forward(const NetworkModel& model, const Matrix& x);

// Hidden activations ReLU(X W1^T), n x width (TwoLayerReLU only).
Matrix hidden_activations(const NetworkModel& model, const Matrix& x);

// Per-direction coefficients w . v_k of a Linear model: the empirical
// counterpart of the converged feature weights.
Vector linear_projections(const NetworkModel& model, const Matrix& directions);

}  // namespace shortcut
