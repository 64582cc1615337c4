#include "crl/synth/synthbench.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "crl/core/error.hpp"
#include "crl/core/linalg.hpp"
#include "crl/core/rng.hpp"
#include "crl/providers/crle.hpp"
#include "crl/providers/manifest.hpp"

namespace crl::synth {
namespace {

constexpr std::uint64_t kPrototypeSalt = 0x70726f746fULL;
constexpr std::uint64_t kLabelSalt = 0x6c6162656cULL;
constexpr std::uint64_t kNoiseSalt = 0x6e6f697365ULL;
constexpr std::uint64_t kDescriptorSalt = 0x6465736372ULL;
constexpr std::uint64_t kSubsetSalt = 0x7375627365ULL;
constexpr const char* kProvider = "synthbench";

std::vector<std::vector<double>> orthonormal_set(std::size_t count, std::size_t dims, Rng& rng) {
  std::vector<std::vector<double>> out;
  while (out.size() < count) {
    std::vector<double> v(dims);
    for (double& e : v) e = rng.normal();
    for (const auto& u : out) {
      double p = 0.0;
      for (std::size_t i = 0; i < dims; ++i) p += u[i] * v[i];
      for (std::size_t i = 0; i < dims; ++i) v[i] -= p * u[i];
    }
    double n = 0.0;
    for (double e : v) n += e * e;
    n = std::sqrt(n);
    if (n < 1e-8) continue;
    for (double& e : v) e /= n;
    out.push_back(std::move(v));
  }
  return out;
}

std::string padded(const std::string& prefix, std::size_t i, std::size_t n) {
  const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
  std::string digits = std::to_string(i);
  return prefix + std::string(width - digits.size(), '0') + digits;
}

const SynthCriterion& find_criterion(const SynthSpec& spec, const std::string& name) {
  for (const auto& c : spec.criteria) {
    if (c.name == name) return c;
  }
  throw Error(ErrorKind::consistency, "synthetic world has no criterion '" + name + "'", {{"criterion", name}});
}

using Json = nlohmann::ordered_json;

Json summary_json(const eval::MetricSummary& s) { return Json{{"mean", s.mean}, {"std", s.stddev}}; }

Json result_json(const eval::ClusterResult& r) {
  return Json{{"nmi", summary_json(r.nmi_summary)}, {"acc", summary_json(r.acc_summary)},
              {"ari", summary_json(r.ari_summary)}};
}

}  // namespace

void SynthSpec::validate() const {
  if (criteria.empty()) throw Error(ErrorKind::config, "synthetic spec needs at least one criterion");
  if (n_samples < 1) throw Error(ErrorKind::config, "n_samples must be at least 1");
  if (descriptors_per_class < 1) throw Error(ErrorKind::config, "descriptors_per_class must be at least 1");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw Error(ErrorKind::config, "noise_std must be finite and >= 0");
  if (!(descriptor_noise_std >= 0.0) || !std::isfinite(descriptor_noise_std)) {
    throw Error(ErrorKind::config, "descriptor_noise_std must be finite and >= 0");
  }
  std::vector<std::string> seen;
  for (const auto& c : criteria) {
    if (c.name.empty()) throw Error(ErrorKind::config, "criterion name must be nonempty");
    if (std::find(seen.begin(), seen.end(), c.name) != seen.end()) {
      throw Error(ErrorKind::config, "duplicate criterion '" + c.name + "'");
    }
    seen.push_back(c.name);
    if (c.n_classes < 1) throw Error(ErrorKind::config, "criterion '" + c.name + "' needs at least one class");
    if (c.block_dims < c.n_classes) {
      throw Error(ErrorKind::config, "criterion '" + c.name + "' has block_dims " + std::to_string(c.block_dims) +
                                         " < n_classes " + std::to_string(c.n_classes));
    }
    if (!(c.scale > 0.0) || !std::isfinite(c.scale)) {
      throw Error(ErrorKind::config, "criterion '" + c.name + "' scale must be positive");
    }
  }
}

std::size_t SynthSpec::dominant() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < criteria.size(); ++i) {
    if (criteria[i].scale > criteria[best].scale) best = i;
  }
  return best;
}

std::size_t SynthSpec::total_dims() const {
  std::size_t d = 0;
  for (const auto& c : criteria) d += c.block_dims;
  return d;
}

SynthSpec SynthSpec::two_criteria() {
  SynthSpec s;
  s.criteria = {{"shape", 4, 128, 5.0}, {"color", 4, 96, 1.0}};
  s.noise_std = 0.3;
  s.descriptor_noise_std = 0.03;
  return s;
}

SynthWorld generate_world(const SynthSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_samples;
  const std::size_t dims = spec.total_dims();

  std::map<std::string, EmbeddingMatrix> prototypes;
  std::map<std::string, std::size_t> offsets;
  std::map<std::string, std::vector<int>> labels;
  std::map<std::string, std::vector<std::string>> class_names;
  std::vector<std::vector<std::vector<double>>> protos(spec.criteria.size());

  std::size_t offset = 0;
  for (std::size_t ci = 0; ci < spec.criteria.size(); ++ci) {
    const auto& c = spec.criteria[ci];
    Rng proto_rng(RunSeed{spec.seed, ci}, kPrototypeSalt);
    protos[ci] = orthonormal_set(c.n_classes, c.block_dims, proto_rng);
    std::vector<float> flat;
    for (const auto& p : protos[ci]) {
      for (double e : p) flat.push_back(static_cast<float>(e));
    }
    prototypes.emplace(c.name, EmbeddingMatrix(c.n_classes, c.block_dims, std::move(flat)));
    offsets[c.name] = offset;
    offset += c.block_dims;

    std::vector<int> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = static_cast<int>(i % c.n_classes);
    Rng label_rng(RunSeed{spec.seed, ci}, kLabelSalt);
    label_rng.shuffle(std::span<int>(col));
    labels[c.name] = std::move(col);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < c.n_classes; ++k) names.push_back("class" + std::to_string(k));
    class_names[c.name] = std::move(names);
  }

  std::vector<float> data(n * dims);
  Rng noise_rng(RunSeed{spec.seed, 0}, kNoiseSalt);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t col = 0;
    for (std::size_t ci = 0; ci < spec.criteria.size(); ++ci) {
      const auto& c = spec.criteria[ci];
      const auto& p = protos[ci][static_cast<std::size_t>(labels[c.name][i])];
      for (std::size_t d = 0; d < c.block_dims; ++d, ++col) {
        double v = c.scale * p[d];
        if (spec.noise_std > 0.0) v += spec.noise_std * noise_rng.normal();
        data[i * dims + col] = static_cast<float>(v);
      }
    }
  }
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(padded("s", i, n));
  LabeledDataset dataset(EmbeddingMatrix(n, dims, std::move(data), std::move(ids)), labels, class_names);

  std::map<std::string, TextBasis> bases;
  for (std::size_t ci = 0; ci < spec.criteria.size(); ++ci) {
    const auto& c = spec.criteria[ci];
    const std::size_t rows = c.n_classes * spec.descriptors_per_class;
    std::vector<float> vec(rows * dims, 0.0f);
    std::vector<std::string> descriptors;
    Rng desc_rng(RunSeed{spec.seed, ci}, kDescriptorSalt);
    for (std::size_t k = 0; k < c.n_classes; ++k) {
      for (std::size_t v = 0; v < spec.descriptors_per_class; ++v) {
        const std::size_t r = k * spec.descriptors_per_class + v;
        descriptors.push_back(c.name + "-class" + std::to_string(k) + "-v" + std::to_string(v));
        for (std::size_t d = 0; d < dims; ++d) {
          double e = 0.0;
          if (d >= offsets[c.name] && d < offsets[c.name] + c.block_dims) e = protos[ci][k][d - offsets[c.name]];
          if (spec.descriptor_noise_std > 0.0) e += spec.descriptor_noise_std * desc_rng.normal();
          vec[r * dims + d] = static_cast<float>(e);
        }
      }
    }
    auto unit = l2_normalize_rows(EmbeddingMatrix(rows, dims, std::move(vec), descriptors)).matrix;
    bases.emplace(c.name, TextBasis(make_criterion(c.name), std::move(descriptors), std::move(unit), true, kProvider));
  }

  return SynthWorld{spec, std::move(dataset), std::move(bases), std::move(prototypes), std::move(offsets)};
}

ClusterComparison crl_vs_baseline(const SynthWorld& world, const std::string& criterion,
                                  const eval::ClusterConfig& config, const transform::TransformOptions& options) {
  find_criterion(world.spec, criterion);
  return crl_vs_baseline(world, criterion, world.bases.at(criterion), config, options);
}

ClusterComparison crl_vs_baseline(const SynthWorld& world, const std::string& criterion, const TextBasis& basis,
                                  const eval::ClusterConfig& config, const transform::TransformOptions& options) {
  const auto& c = find_criterion(world.spec, criterion);
  eval::ClusterConfig cfg = config;
  cfg.k = c.n_classes;
  const auto& labels = world.dataset.labels(criterion);
  const auto proj = transform::project(world.dataset.embeddings(), basis, options);
  return {eval::run_clustering_eval(world.dataset.embeddings(), labels, cfg),
          eval::run_clustering_eval(proj.representation, labels, cfg)};
}

FewShotComparison fewshot_vs_baseline(const SynthWorld& world, const std::string& criterion,
                                      const eval::FewShotConfig& config, const transform::TransformOptions& options) {
  const auto& c = find_criterion(world.spec, criterion);
  const auto& labels = world.dataset.labels(criterion);
  const auto proj = transform::project(world.dataset.embeddings(), world.bases.at(criterion), options);
  return {eval::run_fewshot_eval(world.dataset.embeddings(), labels, c.n_classes, config),
          eval::run_fewshot_eval(proj.representation, labels, c.n_classes, config)};
}

std::vector<SweepRow> text_count_sweep(const SynthWorld& world, const std::string& criterion,
                                       const std::vector<std::size_t>& counts, const eval::ClusterConfig& config,
                                       const transform::TransformOptions& options) {
  find_criterion(world.spec, criterion);
  const TextBasis& full = world.bases.at(criterion);
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::size_t count = counts[i];
    if (count < 1 || count > full.size()) {
      throw Error(ErrorKind::config, "sweep count " + std::to_string(count) + " outside [1, " +
                                         std::to_string(full.size()) + "]");
    }
    if (count == full.size()) {
      rows.push_back({count, crl_vs_baseline(world, criterion, full, config, options)});
      continue;
    }
    std::vector<std::size_t> pick(full.size());
    std::iota(pick.begin(), pick.end(), 0);
    Rng rng(RunSeed{world.spec.seed, count}, kSubsetSalt);
    rng.shuffle(std::span<std::size_t>(pick));
    pick.resize(count);
    std::sort(pick.begin(), pick.end());
    rows.push_back({count, crl_vs_baseline(world, criterion, full.subset(pick), config, options)});
  }
  return rows;
}

std::string comparison_report(const std::string& criterion, const eval::ClusterConfig& config,
                              const ClusterComparison& comparison) {
  Json j;
  j["protocol"] = "synth-compare";
  j["criterion"] = criterion;
  j["trials"] = config.trials;
  j["seed"] = config.base_seed;
  j["baseline"] = result_json(comparison.baseline);
  j["conditional"] = result_json(comparison.conditional);
  j["acc_gain"] = comparison.conditional.acc_summary.mean - comparison.baseline.acc_summary.mean;
  return j.dump(2) + "\n";
}

std::string sweep_report(const std::string& criterion, const eval::ClusterConfig& config,
                         const std::vector<SweepRow>& rows) {
  Json j;
  j["protocol"] = "synth-sweep";
  j["criterion"] = criterion;
  j["trials"] = config.trials;
  j["seed"] = config.base_seed;
  Json table = Json::array();
  for (const auto& r : rows) {
    table.push_back(Json{{"count", r.count},
                         {"baseline", result_json(r.comparison.baseline)},
                         {"conditional", result_json(r.comparison.conditional)}});
  }
  j["rows"] = table;
  return j.dump(2) + "\n";
}

WorldFiles write_world(const SynthWorld& world, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  WorldFiles files;
  files.embeddings = dir / "world.crle";
  files.manifest = providers::default_manifest_path(files.embeddings);
  providers::write_crle(world.dataset.embeddings(), files.embeddings);
  const std::string source = "synthbench seed=" + std::to_string(world.spec.seed);
  providers::write_manifest(providers::manifest_for(world.dataset, kProvider, source), files.manifest);
  for (const auto& [name, basis] : world.bases) {
    const auto path = dir / ("basis-" + name + ".crle");
    providers::save_basis(basis, path, providers::default_manifest_path(path), source);
    files.bases[name] = path;
  }
  return files;
}

}  // namespace crl::synth
