#include "crl/core/error.hpp"
#include "crl/core/parallel.hpp"
#include "crl/eval/fewshot.hpp"
#include "crl/transform/transform.hpp"

namespace crl::eval {
namespace {
constexpr std::uint64_t kFewShotSalt = 0x66657773686f74ULL;
}

void FewShotConfig::validate() const {
  if (shots.empty()) throw Error(ErrorKind::config, "at least one shot count is required");
  for (auto s : shots) {
    if (s < 1) throw Error(ErrorKind::config, "shot counts must be at least 1");
  }
  if (draws < 1) throw Error(ErrorKind::config, "draws must be at least 1");
  if (!(l2_strength >= 0.0)) throw Error(ErrorKind::config, "l2_strength must be nonnegative");
  if (!(lr > 0.0)) throw Error(ErrorKind::config, "lr must be positive");
}

SupportSplit sample_support(std::span<const int> labels, std::size_t num_classes, std::size_t shots_per_class,
                            Rng& rng) {
  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
      throw Error(ErrorKind::invalid_value, "label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                                                " outside [0, " + std::to_string(num_classes) + ")");
    }
    members[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  std::vector<bool> in_support(labels.size(), false);
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& m = members[c];
    if (m.size() < shots_per_class) {
      throw Error(ErrorKind::insufficient_class,
                  "class " + std::to_string(c) + " has " + std::to_string(m.size()) + " members, fewer than " +
                      std::to_string(shots_per_class) + " shots",
                  {{"class", static_cast<std::int64_t>(c)},
                   {"members", static_cast<std::int64_t>(m.size())},
                   {"shots", static_cast<std::int64_t>(shots_per_class)}});
    }
    for (std::size_t s = 0; s < shots_per_class; ++s) {
      std::swap(m[s], m[s + rng.uniform_index(m.size() - s)]);
      in_support[m[s]] = true;
    }
  }
  SupportSplit split;
  for (std::size_t i = 0; i < labels.size(); ++i) (in_support[i] ? split.support : split.query).push_back(i);
  return split;
}

FewShotResult run_fewshot_eval(const EmbeddingMatrix& features, std::span<const int> labels,
                               std::size_t num_classes, const FewShotConfig& config) {
  config.validate();
  if (labels.size() != features.rows()) {
    throw ShapeError("have " + std::to_string(labels.size()) + " labels for " + std::to_string(features.rows()) +
                     " feature rows");
  }
  FewShotResult result;
  for (std::size_t shot_index = 0; shot_index < config.shots.size(); ++shot_index) {
    const std::size_t shots = config.shots[shot_index];
    ShotResult shot{shots, std::vector<double>(config.draws, 0.0), {}};
    parallel_for(
        config.draws,
        [&](std::size_t draw) {
          Rng rng(RunSeed{config.base_seed, draw}, kFewShotSalt ^ (static_cast<std::uint64_t>(shots) << 32));
          const SupportSplit split = sample_support(labels, num_classes, shots, rng);
          const auto stats = transform::ColumnStats::fit(features, split.support);
          constexpr double kEps = 1e-8;
          const EmbeddingMatrix train_x = stats.apply(features.select_rows(split.support), kEps);
          const EmbeddingMatrix test_x = stats.apply(features.select_rows(split.query), kEps);
          std::vector<int> train_y, test_y;
          for (auto i : split.support) train_y.push_back(labels[i]);
          for (auto i : split.query) test_y.push_back(labels[i]);
          const LogRegModel model = train_logreg(train_x, train_y, num_classes, config);
          shot.accuracies[draw] = accuracy(model.predict(test_x), test_y);
        },
        config.threads);
    shot.summary = summarize(shot.accuracies);
    result.per_shot.push_back(std::move(shot));
  }
  return result;
}

FewShotResult run_fewshot_eval(const ConditionalRepresentation& r, std::span<const int> labels,
                               std::size_t num_classes, const FewShotConfig& config) {
  return run_fewshot_eval(r.matrix, labels, num_classes, config);
}

}  // namespace crl::eval
