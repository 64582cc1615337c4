#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "crl/core/matrix.hpp"
#include "crl/core/rng.hpp"
#include "crl/core/types.hpp"
#include "crl/eval/cluster.hpp"

namespace crl::eval {

struct FewShotConfig {
  std::vector<std::size_t> shots = {1, 5, 10};
  std::size_t draws = 20;
  double l2_strength = 1.0;
  std::size_t max_iters = 1000;
  /// Initial step of the backtracking line search.
  double lr = 0.1;
  double grad_tol = 1e-5;
  std::uint64_t base_seed = 0;
  std::size_t threads = 0;

  void validate() const;
};

struct SupportSplit {
  std::vector<std::size_t> support;
  std::vector<std::size_t> query;
};

/// Exactly `shots_per_class` rows per class, drawn uniformly without
/// replacement; query is the complement. Both sorted ascending.
/// Throws InsufficientClass naming the first class that is too small.
SupportSplit sample_support(std::span<const int> labels, std::size_t num_classes,
                            std::size_t shots_per_class, Rng& rng);

/// Softmax linear probe: `weights` is classes x dims row-major.
struct LogRegModel {
  std::size_t classes = 0;
  std::size_t dims = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  std::vector<double> loss_history;
  std::size_t iterations = 0;
  double grad_norm = 0.0;

  int predict(std::span<const float> x) const;
  std::vector<int> predict(const EmbeddingMatrix& x) const;
  double weight_norm() const;
};

/// Summed softmax cross-entropy + (l2/2)||W||^2 (bias unpenalized).
/// `params` is [W row-major | b]; `grad` is resized to match.
double logreg_objective(std::span<const double> params, const EmbeddingMatrix& x, std::span<const int> y,
                        std::size_t classes, double l2, std::vector<double>* grad);

/// Full-batch gradient descent with Armijo backtracking from zero weights.
/// Throws DegenerateTraining when fewer than two classes are present.
LogRegModel train_logreg(const EmbeddingMatrix& x, std::span<const int> y, std::size_t classes,
                         const FewShotConfig& config);

double accuracy(std::span<const int> pred, std::span<const int> truth);

struct ShotResult {
  std::size_t shots = 0;
  std::vector<double> accuracies;
  MetricSummary summary;
};

struct FewShotResult {
  std::vector<ShotResult> per_shot;
};

/// For each shot count, `draws` runs of sample -> standardize (fit on
/// support) -> train -> score on the query set.
FewShotResult run_fewshot_eval(const EmbeddingMatrix& features, std::span<const int> labels,
                               std::size_t num_classes, const FewShotConfig& config);
FewShotResult run_fewshot_eval(const ConditionalRepresentation& r, std::span<const int> labels,
                               std::size_t num_classes, const FewShotConfig& config);

}  // namespace crl::eval
