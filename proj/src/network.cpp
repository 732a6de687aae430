#include "shortcut/network.hpp"

#include <cmath>
#include <stdexcept>

#include "shortcut/rng.hpp"

namespace shortcut {

NetworkModel init_network(Arch arch, int input_dim, int width, std::uint64_t seed,
                          bool zero_init_output) {
  if (input_dim < 1) throw std::invalid_argument("init_network: input_dim must be >= 1");
  if (arch == Arch::TwoLayerReLU && width < 1)
    throw std::invalid_argument("init_network: width must be >= 1");

  NetworkModel model;
  model.arch = arch;
  model.input_dim = input_dim;
  model.width = arch == Arch::Linear ? 0 : width;
  model.params = Vector::Zero(model.param_count());

  if (arch == Arch::Linear) {
    if (!zero_init_output) {
      SplitMix64 rng(derive_stream(seed, 2));
      const double scale = 1.0 / std::sqrt(double(input_dim));
      for (int j = 0; j < input_dim; ++j) model.params[j] = scale * rng.next_gaussian();
    }
    return model;
  }

  SplitMix64 hidden_rng(derive_stream(seed, 1));
  const double hidden_scale = 1.0 / std::sqrt(double(input_dim));
  for (int i = 0; i < width * input_dim; ++i)
    model.params[i] = hidden_scale * hidden_rng.next_gaussian();

  if (!zero_init_output) {
    SplitMix64 out_rng(derive_stream(seed, 2));
    const double out_scale = 1.0 / std::sqrt(double(width));
    for (int i = 0; i < width; ++i)
      model.params[width * input_dim + i] = out_scale * out_rng.next_gaussian();
  }
  return model;
}

Vector forward(const NetworkModel& model, const Matrix& x) {
  if (x.cols() != model.input_dim)
    throw std::invalid_argument("forward: input dimension mismatch");
  if (model.arch == Arch::Linear) return x * model.output_weights();
  return hidden_activations(model, x) * model.output_weights();
}

Matrix hidden_activations(const NetworkModel& model, const Matrix& x) {
  if (model.arch != Arch::TwoLayerReLU)
    throw std::invalid_argument("hidden_activations: model has no hidden layer");
  if (x.cols() != model.input_dim)
    throw std::invalid_argument("hidden_activations: input dimension mismatch");
  return (x * model.hidden_weights().transpose()).cwiseMax(0.0);
}

Vector linear_projections(const NetworkModel& model, const Matrix& directions) {
  if (model.arch != Arch::Linear)
    throw std::invalid_argument("linear_projections: model must be Linear");
  if (directions.rows() != model.input_dim)
    throw std::invalid_argument("linear_projections: direction dimension mismatch");
  return directions.transpose() * model.output_weights();
}

}  // namespace shortcut
