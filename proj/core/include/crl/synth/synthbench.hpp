#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "crl/core/matrix.hpp"
#include "crl/core/types.hpp"
#include "crl/eval/cluster.hpp"
#include "crl/eval/fewshot.hpp"
#include "crl/transform/transform.hpp"

namespace crl::synth {

struct SynthCriterion {
  std::string name;
  std::size_t n_classes = 4;
  std::size_t block_dims = 16;
  double scale = 1.0;
};

/// Block-concatenation world: each criterion owns a block of dimensions
/// holding its (scaled) class prototype; isotropic noise is added on top.
struct SynthSpec {
  std::size_t n_samples = 400;
  std::vector<SynthCriterion> criteria;
  double noise_std = 0.3;
  std::size_t descriptors_per_class = 16;
  double descriptor_noise_std = 0.03;
  std::uint64_t seed = 0;

  void validate() const;
  /// Index of the criterion with the largest scale (the first on ties).
  std::size_t dominant() const;
  std::size_t total_dims() const;

  /// "shape" (scale 5, 128 dims) dominating "color" (scale 1, 96 dims),
  /// four classes each, 400 samples.
  static SynthSpec two_criteria();
};

struct SynthWorld {
  SynthSpec spec;
  LabeledDataset dataset;
  std::map<std::string, TextBasis> bases;
  /// Orthonormal class prototypes per criterion (n_classes x block_dims).
  std::map<std::string, EmbeddingMatrix> prototypes;
  /// First column of each criterion's block.
  std::map<std::string, std::size_t> block_offset;
};

SynthWorld generate_world(const SynthSpec& spec);

struct ClusterComparison {
  eval::ClusterResult baseline;
  eval::ClusterResult conditional;
};

/// Clusters the raw embeddings and the projection onto the criterion's
/// basis (k = the criterion's class count).
ClusterComparison crl_vs_baseline(const SynthWorld& world, const std::string& criterion,
                                  const eval::ClusterConfig& config,
                                  const transform::TransformOptions& options = {});
ClusterComparison crl_vs_baseline(const SynthWorld& world, const std::string& criterion,
                                  const TextBasis& basis, const eval::ClusterConfig& config,
                                  const transform::TransformOptions& options = {});

struct FewShotComparison {
  eval::FewShotResult baseline;
  eval::FewShotResult conditional;
};

FewShotComparison fewshot_vs_baseline(const SynthWorld& world, const std::string& criterion,
                                      const eval::FewShotConfig& config,
                                      const transform::TransformOptions& options = {});

struct SweepRow {
  std::size_t count = 0;
  ClusterComparison comparison;
};

/// For each count, a seeded random subset of that many descriptors is
/// drawn and crl_vs_baseline is rerun on it. A count equal to the full
/// basis size uses the basis unchanged.
std::vector<SweepRow> text_count_sweep(const SynthWorld& world, const std::string& criterion,
                                       const std::vector<std::size_t>& counts,
                                       const eval::ClusterConfig& config,
                                       const transform::TransformOptions& options = {});

std::string comparison_report(const std::string& criterion, const eval::ClusterConfig& config,
                              const ClusterComparison& comparison);
std::string sweep_report(const std::string& criterion, const eval::ClusterConfig& config,
                         const std::vector<SweepRow>& rows);

struct WorldFiles {
  std::filesystem::path embeddings;
  std::filesystem::path manifest;
  std::map<std::string, std::filesystem::path> bases;
};

/// Writes world.crle + manifest and basis-<criterion>.crle + manifest.
WorldFiles write_world(const SynthWorld& world, const std::filesystem::path& dir);

}  // namespace crl::synth
