#include <algorithm>
#include <cmath>
#include <limits>

#include "crl/core/error.hpp"
#include "crl/eval/fewshot.hpp"

namespace crl::eval {

double logreg_objective(std::span<const double> params, const EmbeddingMatrix& x, std::span<const int> y,
                        std::size_t classes, double l2, std::vector<double>* grad) {
  const std::size_t d = x.dims();
  const std::size_t wsize = classes * d;
  const double* w = params.data();
  const double* b = params.data() + wsize;
  if (grad) grad->assign(params.size(), 0.0);

  double loss = 0.0;
  std::vector<double> logits(classes);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto xi = x.row(i);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes; ++c) {
      double z = b[c];
      for (std::size_t j = 0; j < d; ++j) z += w[c * d + j] * xi[j];
      logits[c] = z;
      max_logit = std::max(max_logit, z);
    }
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - max_logit);
    const double log_norm = max_logit + std::log(sum);
    const auto yi = static_cast<std::size_t>(y[i]);
    loss += log_norm - logits[yi];
    if (grad) {
      for (std::size_t c = 0; c < classes; ++c) {
        const double residual = std::exp(logits[c] - log_norm) - (c == yi ? 1.0 : 0.0);
        for (std::size_t j = 0; j < d; ++j) (*grad)[c * d + j] += residual * xi[j];
        (*grad)[wsize + c] += residual;
      }
    }
  }
  double wsq = 0.0;
  for (std::size_t k = 0; k < wsize; ++k) wsq += w[k] * w[k];
  loss += 0.5 * l2 * wsq;
  if (grad) {
    for (std::size_t k = 0; k < wsize; ++k) (*grad)[k] += l2 * w[k];
  }
  return loss;
}

int LogRegModel::predict(std::span<const float> x) const {
  int best = 0;
  double best_z = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < classes; ++c) {
    double z = bias[c];
    for (std::size_t j = 0; j < dims; ++j) z += weights[c * dims + j] * x[j];
    if (z > best_z) {
      best_z = z;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::vector<int> LogRegModel::predict(const EmbeddingMatrix& x) const {
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict(x.row(i));
  return out;
}

double LogRegModel::weight_norm() const {
  double s = 0.0;
  for (double v : weights) s += v * v;
  return std::sqrt(s);
}

LogRegModel train_logreg(const EmbeddingMatrix& x, std::span<const int> y, std::size_t classes,
                         const FewShotConfig& config) {
  if (y.size() != x.rows()) {
    throw ShapeError("have " + std::to_string(y.size()) + " labels for " + std::to_string(x.rows()) + " rows");
  }
  std::vector<bool> present(classes, false);
  std::size_t distinct = 0;
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw Error(ErrorKind::invalid_value, "label " + std::to_string(label) + " outside [0, " +
                                                std::to_string(classes) + ")");
    }
    if (!present[static_cast<std::size_t>(label)]) {
      present[static_cast<std::size_t>(label)] = true;
      ++distinct;
    }
  }
  if (distinct < 2) {
    throw Error(ErrorKind::degenerate_training, "logistic regression needs at least two classes in the support set",
                {{"classes_present", static_cast<std::int64_t>(distinct)}});
  }

  LogRegModel model;
  model.classes = classes;
  model.dims = x.dims();
  std::vector<double> params(classes * x.dims() + classes, 0.0);
  std::vector<double> grad, trial_grad;
  double loss = logreg_objective(params, x, y, classes, config.l2_strength, &grad);
  model.loss_history.push_back(loss);

  constexpr double kArmijo = 1e-4;
  double step = config.lr;
  std::vector<double> trial(params.size());
  for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
    double gsq = 0.0;
    for (double g : grad) gsq += g * g;
    model.grad_norm = std::sqrt(gsq);
    if (model.grad_norm < config.grad_tol) break;

    bool accepted = false;
    double trial_loss = loss;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      for (std::size_t k = 0; k < params.size(); ++k) trial[k] = params[k] - step * grad[k];
      trial_loss = logreg_objective(trial, x, y, classes, config.l2_strength, &trial_grad);
      if (std::isfinite(trial_loss) && trial_loss <= loss - kArmijo * step * gsq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    params.swap(trial);
    grad.swap(trial_grad);
    loss = trial_loss;
    model.loss_history.push_back(loss);
    model.iterations = iter + 1;
    step *= 2.0;
  }
  model.weights.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(classes * x.dims()));
  model.bias.assign(params.begin() + static_cast<std::ptrdiff_t>(classes * x.dims()), params.end());
  return model;
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw ShapeError("prediction and truth lengths differ");
  if (pred.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

}  // namespace crl::eval
