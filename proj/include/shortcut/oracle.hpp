#pragma once

#include <cstdint>
#include <vector>

#include "shortcut/gmm.hpp"
#include "shortcut/train.hpp"

namespace shortcut {
namespace oracle {

struct MCEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::int64_t samples = 0;
};

// Monte-Carlo estimate of E[<probe, s> (s . phi_direction)] over s ~ spec,
// i.e. the unnormalized integral-operator image of the candidate
// eigenfunction at the probe point. For an eigendirection this converges to
// eigenvalue * <probe, direction>. Work is split into fixed shards with
// derived seeds and reduced over a pairwise tree, so the result does not
// depend on how many workers execute the shards.
MCEstimate mc_integral_operator(const MixtureSpec& spec, const Vector& phi_direction,
                                const Vector& probe_x, std::int64_t n_samples, std::uint64_t seed,
                                int shards = 64);

// Ordinary least squares of the exact per-cluster label (+1 on the positive
// set) on the features x . v_k, over a fresh sample of the mixture. The
// empirical counterpart of the converged-weight closed form.
struct MCWeights {
  Vector weights;
  Vector standard_errors;
  std::int64_t samples = 0;
};
MCWeights mc_least_squares(const MixtureSpec& spec, const Matrix& directions,
                           const std::vector<int>& positive_set, std::int64_t n_samples,
                           std::uint64_t seed, int shards = 64);

// Central finite differences of the batch loss per parameter coordinate.
Vector finite_diff_grad(const NetworkModel& model, const Matrix& x, const Vector& y,
                        const LossSpec& loss, double epsilon = 1e-5);

// Closed-form discrete-time gradient descent for linear regression under the
// batch-mean MSE loss, from w_0 = 0: per eigenpair (lambda_i, v_i) of
// X^T X / n the parameter reads sum_i v_i <v_i, X^T Y / n> / lambda_i *
// (1 - (1 - eta lambda_i)^t) and the training residual contracts by
// (1 - eta lambda_i) per step. `stable` is false when eta >= 2 / lambda_max.
struct LinearDynamics {
  std::vector<Vector> weights_at_steps;  // one per requested step
  bool stable = true;
};
LinearDynamics exact_linear_dynamics(const Matrix& x, const Vector& y, double eta,
                                     const std::vector<long>& steps);

}  // namespace oracle
}  // namespace shortcut
