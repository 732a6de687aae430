#include "shortcut/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "shortcut/rng.hpp"

namespace shortcut {

namespace {

void check_labels(const Matrix& x, const Vector& y) {
  if (x.rows() != y.size()) throw std::invalid_argument("labels: row count mismatch");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 1.0 && y[i] != -1.0)
      throw std::invalid_argument("labels: entries must be +1 or -1");
}

// d(base loss)/df per sample, before batch averaging.
Vector output_derivative(const Vector& f, const Vector& y, const LossSpec& loss) {
  Vector df(f.size());
  if (loss.base == LossSpec::Base::MSE) {
    df = f - y;
  } else {
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double z = -y[i] * f[i];
      // sigmoid(z), evaluated stably on both tails
      const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
      df[i] = -y[i] * s;
    }
  }
  if (loss.sd_lambda > 0.0) df += loss.sd_lambda * f;
  return df;
}

double batch_loss(const Vector& f, const Vector& y, const LossSpec& loss) {
  double total = 0.0;
  if (loss.base == LossSpec::Base::MSE) {
    total = 0.5 * (f - y).squaredNorm();
  } else {
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double z = -y[i] * f[i];
      total += z > 30.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
  }
  if (loss.sd_lambda > 0.0) total += 0.5 * loss.sd_lambda * f.squaredNorm();
  return total / double(f.size());
}

}  // namespace

LossGrad loss_and_grad(const NetworkModel& model, const Matrix& x, const Vector& y,
                       const LossSpec& loss) {
  check_labels(x, y);
  if (x.cols() != model.input_dim)
    throw std::invalid_argument("loss_and_grad: input dimension mismatch");
  const double inv_n = 1.0 / double(x.rows());

  LossGrad out;
  out.grad = Vector::Zero(model.param_count());

  if (model.arch == Arch::Linear) {
    const Vector f = x * model.output_weights();
    out.loss = batch_loss(f, y, loss);
    out.grad = inv_n * (x.transpose() * output_derivative(f, y, loss));
    return out;
  }

  const auto w1 = model.hidden_weights();
  const auto w2 = model.output_weights();
  const Matrix pre = x * w1.transpose();              // n x h
  const Matrix hidden = pre.cwiseMax(0.0);            // ReLU
  const Vector f = hidden * w2;
  out.loss = batch_loss(f, y, loss);

  const Vector df = inv_n * output_derivative(f, y, loss);
  // dL/dw2 = H^T df; dL/dW1 = (mask .* (df w2^T))^T X
  const Matrix mask = (pre.array() > 0.0).cast<double>();
  const Matrix back = mask.array() * (df * w2.transpose()).array();  // n x h
  const Matrix grad_w1 = back.transpose() * x;                        // h x d
  const int h = model.width, d = model.input_dim;
  for (int r = 0; r < h; ++r)
    out.grad.segment(static_cast<Eigen::Index>(r) * d, d) = grad_w1.row(r).transpose();
  out.grad.tail(h) = hidden.transpose() * df;
  return out;
}

std::pair<NetworkModel, TrainTrace> train(NetworkModel model, const Matrix& x, const Vector& y,
                                          const TrainConfig& config, const LossSpec& loss,
                                          std::span<const long> snapshot_steps) {
  check_labels(x, y);
  if (!(config.learning_rate > 0.0))
    throw std::invalid_argument("train: learning_rate must be > 0");
  if (config.weight_decay < 0.0) throw std::invalid_argument("train: weight_decay must be >= 0");
  if (config.batch_size && *config.batch_size < 1)
    throw std::invalid_argument("train: batch_size must be >= 1");

  const long n = x.rows();
  const int batch = config.batch_size ? std::min<long>(*config.batch_size, n) : n;
  const bool full_batch = batch == n;

  TrainTrace trace;
  trace.losses.reserve(static_cast<std::size_t>(config.steps));
  const std::set<long> snap(snapshot_steps.begin(), snapshot_steps.end());
  if (snap.count(0)) trace.snapshots.emplace_back(0, model.params);

  SplitMix64 shuffle_rng(derive_stream(config.seed, 0x5ba7c));
  std::vector<long> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  long cursor = n;  // forces a shuffle before the first minibatch

  Matrix xb;
  Vector yb;
  for (long step = 0; step < config.steps; ++step) {
    LossGrad lg;
    if (full_batch) {
      lg = loss_and_grad(model, x, y, loss);
    } else {
      if (cursor + batch > n) {
        seeded_shuffle(order, shuffle_rng);
        cursor = 0;
      }
      xb.resize(batch, x.cols());
      yb.resize(batch);
      for (int i = 0; i < batch; ++i) {
        xb.row(i) = x.row(order[static_cast<std::size_t>(cursor + i)]);
        yb[i] = y[order[static_cast<std::size_t>(cursor + i)]];
      }
      cursor += batch;
      lg = loss_and_grad(model, xb, yb, loss);
    }

    if (!std::isfinite(lg.loss) || lg.loss > 1e12)
      throw TrainingDivergedError(step, lg.loss, std::move(trace));
    trace.losses.push_back(lg.loss);

    if (config.weight_decay > 0.0) lg.grad += config.weight_decay * model.params;
    model.params -= config.learning_rate * lg.grad;

    if (snap.count(step + 1)) trace.snapshots.emplace_back(step + 1, model.params);
  }
  return {std::move(model), std::move(trace)};
}

ConvergedTraining train_to_convergence(NetworkModel model, const Matrix& x, const Vector& y,
                                       double learning_rate, const LossSpec& loss,
                                       long max_steps, long window, double tol) {
  check_labels(x, y);
  ConvergedTraining out;
  double window_anchor = std::numeric_limits<double>::infinity();
  long last_anchor_step = 0;
  double current = 0.0;
  for (long step = 0; step < max_steps; ++step) {
    LossGrad lg = loss_and_grad(model, x, y, loss);
    current = lg.loss;
    if (!std::isfinite(current) || current > 1e12)
      throw TrainingDivergedError(step, current, TrainTrace{});
    if (step - last_anchor_step >= window) {
      if (std::abs(window_anchor - current) < tol) {
        out.model = std::move(model);
        out.steps_run = step;
        out.converged = true;
        out.final_loss = current;
        return out;
      }
      window_anchor = current;
      last_anchor_step = step;
    }
    model.params -= learning_rate * lg.grad;
  }
  out.model = std::move(model);
  out.steps_run = max_steps;
  out.converged = false;
  out.final_loss = current;
  return out;
}

Eigen::MatrixXi decision_boundary_raster(const NetworkModel& model, const BoundingBox& bbox,
                                         int resolution) {
  if (model.input_dim != 2)
    throw std::invalid_argument("decision_boundary_raster: requires input_dim = 2");
  if (resolution < 2) throw std::invalid_argument("decision_boundary_raster: resolution >= 2");
  if (!(bbox.xmax > bbox.xmin && bbox.ymax > bbox.ymin))
    throw std::invalid_argument("decision_boundary_raster: empty bounding box");

  const double dx = (bbox.xmax - bbox.xmin) / resolution;
  const double dy = (bbox.ymax - bbox.ymin) / resolution;
  Matrix grid(static_cast<Eigen::Index>(resolution) * resolution, 2);
  for (int r = 0; r < resolution; ++r) {
    const double yc = bbox.ymax - (r + 0.5) * dy;
    for (int cidx = 0; cidx < resolution; ++cidx) {
      grid(static_cast<Eigen::Index>(r) * resolution + cidx, 0) = bbox.xmin + (cidx + 0.5) * dx;
      grid(static_cast<Eigen::Index>(r) * resolution + cidx, 1) = yc;
    }
  }
  const Vector f = forward(model, grid);
  Eigen::MatrixXi signs(resolution, resolution);
  for (int r = 0; r < resolution; ++r)
    for (int cidx = 0; cidx < resolution; ++cidx) {
      const double v = f[static_cast<Eigen::Index>(r) * resolution + cidx];
      signs(r, cidx) = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    }
  return signs;
}

std::vector<std::pair<double, double>> boundary_points(const Eigen::MatrixXi& raster,
                                                       const BoundingBox& bbox) {
  const Eigen::Index res_y = raster.rows(), res_x = raster.cols();
  const double dx = (bbox.xmax - bbox.xmin) / double(res_x);
  const double dy = (bbox.ymax - bbox.ymin) / double(res_y);
  auto cx = [&](Eigen::Index c) { return bbox.xmin + (double(c) + 0.5) * dx; };
  auto cy = [&](Eigen::Index r) { return bbox.ymax - (double(r) + 0.5) * dy; };

  std::vector<std::pair<double, double>> points;
  for (Eigen::Index r = 0; r < res_y; ++r)
    for (Eigen::Index c = 0; c < res_x; ++c) {
      if (c + 1 < res_x && raster(r, c) * raster(r, c + 1) < 0)
        points.emplace_back(0.5 * (cx(c) + cx(c + 1)), cy(r));
      if (r + 1 < res_y && raster(r, c) * raster(r + 1, c) < 0)
        points.emplace_back(cx(c), 0.5 * (cy(r) + cy(r + 1)));
    }
  return points;
}

double fit_boundary_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2)
    throw std::invalid_argument("fit_boundary_slope: need at least two boundary points");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= double(points.size());
  my /= double(points.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  // principal axis of the 2x2 scatter matrix
  const double trace_half = 0.5 * (sxx + syy);
  const double det = sxx * syy - sxy * sxy;
  const double lambda = trace_half + std::sqrt(std::max(trace_half * trace_half - det, 0.0));
  double vx, vy;
  if (std::abs(sxy) > 1e-300) {
    vx = lambda - syy;
    vy = sxy;
  } else {
    vx = sxx >= syy ? 1.0 : 0.0;
    vy = sxx >= syy ? 0.0 : 1.0;
  }
  if (std::abs(vx) < 1e-12 * std::abs(vy))
    throw std::domain_error("fit_boundary_slope: boundary is vertical");
  return vy / vx;
}

double accuracy(const NetworkModel& model, const Matrix& x, const Vector& y) {
  check_labels(x, y);
  const Vector f = forward(model, x);
  long correct = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] * f[i] > 0.0) ++correct;
  return double(correct) / double(y.size());
}

}  // namespace shortcut
