#include "shortcut/entk.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace shortcut {

namespace {

// Rows [begin, end) of the per-sample gradient matrix (one flat gradient per
// row). This is the exact backpropagation of a scalar output per sample.
Matrix gradient_block(const NetworkModel& model, const Matrix& x, Eigen::Index begin,
                      Eigen::Index end) {
  const Eigen::Index rows = end - begin;
  if (model.arch == Arch::Linear) return x.middleRows(begin, rows);

  const int h = model.width, d = model.input_dim;
  const auto w2 = model.output_weights();
  const Matrix pre = x.middleRows(begin, rows) * model.hidden_weights().transpose();
  Matrix block(rows, model.param_count());
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (int j = 0; j < h; ++j) {
      const bool active = pre(i, j) > 0.0;
      const double gate = active ? w2[j] : 0.0;
      block.row(i).segment(static_cast<Eigen::Index>(j) * d, d) = gate * x.row(begin + i);
      block(i, static_cast<Eigen::Index>(h) * d + j) = active ? pre(i, j) : 0.0;
    }
  }
  return block;
}

void check_block(int grad_block) {
  if (grad_block < 1) throw std::invalid_argument("empirical_ntk: grad_block must be >= 1");
}

}  // namespace

KernelMatrix empirical_ntk(const NetworkModel& model, const Matrix& x, int grad_block) {
  check_block(grad_block);
  if (x.rows() < 1) throw std::invalid_argument("empirical_ntk: need at least one sample");
  if (x.cols() != model.input_dim)
    throw std::invalid_argument("empirical_ntk: input dimension mismatch");

  const Eigen::Index n = x.rows();
  KernelMatrix k;
  k.entries.resize(n, n);
  k.sample_ids.resize(static_cast<std::size_t>(n));
  std::iota(k.sample_ids.begin(), k.sample_ids.end(), 0);

  for (Eigen::Index a = 0; a < n; a += grad_block) {
    const Eigen::Index a_end = std::min<Eigen::Index>(a + grad_block, n);
    const Matrix ga = gradient_block(model, x, a, a_end);
    k.entries.block(a, a, a_end - a, a_end - a) = ga * ga.transpose();
    for (Eigen::Index b = a_end; b < n; b += grad_block) {
      const Eigen::Index b_end = std::min<Eigen::Index>(b + grad_block, n);
      const Matrix gb = gradient_block(model, x, b, b_end);
      const Matrix tile = ga * gb.transpose();
      k.entries.block(a, b, a_end - a, b_end - b) = tile;
      k.entries.block(b, a, b_end - b, a_end - a) = tile.transpose();
    }
  }
  return k;
}

Matrix cross_ntk(const NetworkModel& model, const Matrix& xa, const Matrix& xb, int grad_block) {
  check_block(grad_block);
  if (xa.cols() != model.input_dim || xb.cols() != model.input_dim)
    throw std::invalid_argument("cross_ntk: input dimension mismatch");
  Matrix out(xa.rows(), xb.rows());
  for (Eigen::Index a = 0; a < xa.rows(); a += grad_block) {
    const Eigen::Index a_end = std::min<Eigen::Index>(a + grad_block, xa.rows());
    const Matrix ga = gradient_block(model, xa, a, a_end);
    for (Eigen::Index b = 0; b < xb.rows(); b += grad_block) {
      const Eigen::Index b_end = std::min<Eigen::Index>(b + grad_block, xb.rows());
      const Matrix gb = gradient_block(model, xb, b, b_end);
      out.block(a, b, a_end - a, b_end - b) = ga * gb.transpose();
    }
  }
  return out;
}

Vector kernel_row(const NetworkModel& model, const Matrix& x_train, const Vector& x) {
  Matrix probe(1, x.size());
  probe.row(0) = x.transpose();
  return cross_ntk(model, probe, x_train).row(0).transpose();
}

KernelSpectrum kernel_eig(const KernelMatrix& k) {
  const SymmetricEigen e = symmetric_eig(k.entries);
  return {e.values, e.vectors};
}

Vector lazy_predict(const KernelMatrix& k_train, const Matrix& k_cross, const Vector& y,
                    double eta, double t) {
  if (k_train.entries.rows() != y.size())
    throw std::invalid_argument("lazy_predict: label count mismatch");
  if (k_cross.cols() != k_train.entries.rows())
    throw std::invalid_argument("lazy_predict: cross-kernel column count mismatch");
  if (eta <= 0.0) throw std::invalid_argument("lazy_predict: eta must be > 0");
  if (t < 0.0) throw std::invalid_argument("lazy_predict: t must be >= 0");

  const KernelSpectrum s = kernel_eig(k_train);
  const double lambda_max = s.values[0];
  const double lambda_min = s.values[s.values.size() - 1];
  if (lambda_min <= 1e-10 * lambda_max)
    throw SingularMatrixError("lazy_predict: K_train is ill-conditioned (condition number " +
                              std::to_string(lambda_max / std::max(lambda_min, 1e-300)) + ")");

  // K_cross V diag((1 - exp(-eta lambda t)) / lambda) V^T Y
  Vector coeffs = s.vectors.transpose() * y;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    coeffs[i] *= -std::expm1(-eta * s.values[i] * t) / s.values[i];
  return k_cross * (s.vectors * coeffs);
}

Vector spectral_residual(const KernelSpectrum& spectrum, const Vector& y, const Vector& f_t) {
  if (y.size() != f_t.size() || y.size() != spectrum.vectors.rows())
    throw std::invalid_argument("spectral_residual: dimension mismatch");
  return spectrum.vectors.transpose() * (y - f_t);
}

FeatureDecomposition feature_components(const KernelSpectrum& spectrum, const Vector& y,
                                        double relative_floor) {
  if (y.size() != spectrum.vectors.rows())
    throw std::invalid_argument("feature_components: label count mismatch");
  const double floor = relative_floor * std::max(spectrum.values[0], 0.0);

  FeatureDecomposition out;
  for (Eigen::Index i = 0; i < spectrum.values.size(); ++i) {
    if (spectrum.values[i] <= floor) {
      out.truncated.push_back(static_cast<int>(i));
      continue;
    }
    FeatureComponent c;
    c.index = static_cast<int>(i);
    c.eigenvalue = spectrum.values[i];
    c.alpha = spectrum.vectors.col(i) * (spectrum.vectors.col(i).dot(y) / spectrum.values[i]);
    out.components.push_back(std::move(c));
  }
  return out;
}

FeatureValues feature_decompose(const KernelSpectrum& spectrum, const Vector& y,
                                const Vector& kernel_row_at_x, double relative_floor) {
  const FeatureDecomposition d = feature_components(spectrum, y, relative_floor);
  FeatureValues out;
  out.values.resize(static_cast<Eigen::Index>(d.components.size()));
  for (std::size_t i = 0; i < d.components.size(); ++i) {
    out.indices.push_back(d.components[i].index);
    out.values[static_cast<Eigen::Index>(i)] = d.components[i].evaluate(kernel_row_at_x);
  }
  out.total = out.values.sum();
  return out;
}

Vector feature_saliency(const NetworkModel& model, const Matrix& x_train,
                        const KernelSpectrum& spectrum, const Vector& y_train,
                        int component_index, const Vector& x, double y_label,
                        double relative_floor) {
  if (component_index < 0 || component_index >= spectrum.values.size())
    throw std::invalid_argument("feature_saliency: component index out of range");
  const double lambda = spectrum.values[component_index];
  const double floor = relative_floor * std::max(spectrum.values[0], 0.0);
  if (lambda <= floor)
    throw std::domain_error("feature_saliency: component " + std::to_string(component_index) +
                            " is below the eigenvalue floor");

  const Vector v = spectrum.vectors.col(component_index);
  const double coef = v.dot(y_train) / lambda;
  const Vector row = kernel_row(model, x_train, x);
  const double f_i = row.dot(v) * coef;

  // grad_x of sum_a v[a] k(x, x_a)
  Vector grad_row_v;
  if (model.arch == Arch::Linear) {
    grad_row_v = x_train.transpose() * v;
  } else {
    const auto w1 = model.hidden_weights();
    const auto w2 = model.output_weights();
    const Vector pre_x = w1 * x;
    Vector mask_x(model.width), s_x(model.width);
    for (int j = 0; j < model.width; ++j) {
      mask_x[j] = pre_x[j] > 0.0 ? 1.0 : 0.0;
      s_x[j] = mask_x[j] * w2[j];
    }
    const Matrix pre = x_train * w1.transpose();
    const Matrix hidden = pre.cwiseMax(0.0);
    const Matrix gates =
        (pre.array() > 0.0).cast<double>().matrix() * w2.asDiagonal();  // rows s_a
    // d/dx [h(x).h(xa)] = W1^T (mask_x .* h_a); d/dx [(x.xa) s(x).s(xa)] = (s_x.s_a) xa
    const Vector hv = hidden.transpose() * v;                 // sum_a v_a h_a
    grad_row_v = w1.transpose() * mask_x.cwiseProduct(hv);
    grad_row_v += x_train.transpose() * v.cwiseProduct(gates * s_x);
  }

  return ((f_i - y_label) * coef * grad_row_v).cwiseAbs();
}

double min_eigenvalue(const KernelMatrix& k) {
  const SymmetricEigen e = symmetric_eig(k.entries);
  return e.values[e.values.size() - 1];
}

}  // namespace shortcut
