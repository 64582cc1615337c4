#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "crl/core/matrix.hpp"

namespace crl::eval {

struct TripletLossGrad {
  double loss = 0.0;
  std::vector<double> anchor;
  std::vector<double> positive;
  std::vector<double> negative;
};

/// max(0, d(a,p) - d(a,n) + margin) with d the squared Euclidean distance
/// between L2-normalized inputs. Gradients are taken w.r.t. the raw
/// (unnormalized) inputs; at the hinge the zero subgradient is used.
double triplet_loss(std::span<const double> anchor, std::span<const double> positive,
                    std::span<const double> negative, double margin);
TripletLossGrad triplet_loss_grad(std::span<const double> anchor, std::span<const double> positive,
                                  std::span<const double> negative, double margin);

struct Triplet {
  std::size_t anchor;
  std::size_t positive;
  std::size_t negative;
};

struct TripletTrainConfig {
  double margin = 0.3;
  std::size_t epochs = 1000;
  double lr = 1e-4;
  double lr_decay = 0.9;
  std::size_t decay_step = 3;
  /// 0 = same as the input width.
  std::size_t hidden_dim = 0;
  /// 0 = same as the input width.
  std::size_t output_dim = 0;
  std::size_t batch_size = 64;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// y = W2 relu(W1 x + b1) + b2, weights row-major (out x in).
struct Mlp {
  std::size_t in_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> w1, b1, w2, b2;

  static Mlp init(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim, std::uint64_t seed);
  std::vector<double> forward(std::span<const float> x) const;
  EmbeddingMatrix apply(const EmbeddingMatrix& x) const;
  std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
};

struct MlpTrainResult {
  Mlp mlp;
  /// Mean triplet loss over each epoch's mini-batches.
  std::vector<double> loss_curve;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

/// Mean triplet loss of `mlp` over all triplets.
double mean_triplet_loss(const Mlp& mlp, const EmbeddingMatrix& x, std::span<const Triplet> triplets, double margin);

/// Adam on shuffled mini-batches; the learning rate is multiplied by
/// lr_decay every decay_step epochs. Throws DivergenceError on a
/// non-finite loss.
MlpTrainResult train_projection_mlp(const EmbeddingMatrix& x, std::span<const Triplet> triplets,
                                    const TripletTrainConfig& config);

/// JSON lines {anchor, positive, negative} holding row ids of `x`.
std::vector<Triplet> read_triplets(const std::filesystem::path& path, const EmbeddingMatrix& x);

}  // namespace crl::eval
