#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "crl/core/error.hpp"

namespace crl::cli {
namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorKind::config, message); }

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail("'" + where + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail("unknown key '" + key + "' in '" + where + "'");
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& into, const std::string& where) {
  if (!node[key]) return;
  try {
    into = node[key].as<T>();
  } catch (const YAML::Exception&) {
    fail("bad value for '" + where + "." + key + "'");
  }
}

void read_size(const YAML::Node& node, const char* key, std::size_t& into, const std::string& where) {
  if (!node[key]) return;
  long long v = 0;
  read(node, key, v, where);
  if (v < 0) fail("'" + where + "." + key + "' must be nonnegative");
  into = static_cast<std::size_t>(v);
}

std::string text_of(std::istream& in) {
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config file " + path.string(), {{"path", path.string()}});
  return text_of(in);
}

YAML::Node parse_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    fail(std::string("invalid YAML: ") + e.what());
  }
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& yaml_text) {
  PipelineConfig c;
  const YAML::Node root = parse_yaml(yaml_text);
  if (root.IsNull()) return c;
  check_keys(root, "config",
             {"criterion", "llm", "embed", "transform", "cluster", "fewshot", "retrieval", "triplet", "output_dir",
              "base_seed"});

  if (const auto n = root["criterion"]) {
    check_keys(n, "criterion", {"name", "subject_noun", "notes", "synonyms"});
    read(n, "name", c.criterion.name, "criterion");
    read(n, "subject_noun", c.criterion.subject_noun, "criterion");
    if (n["notes"]) c.criterion.notes = n["notes"].as<std::string>();
    read(n, "synonyms", c.criterion.synonyms, "criterion");
  }
  if (const auto n = root["llm"]) {
    check_keys(n, "llm",
               {"endpoint", "model", "temperature", "max_retries", "api_key_env", "timeout_ms", "retry_backoff_ms",
                "max_rounds", "prompt"});
    read(n, "endpoint", c.llm.endpoint_url, "llm");
    read(n, "model", c.llm.model_name, "llm");
    read(n, "temperature", c.llm.temperature, "llm");
    read_size(n, "max_retries", c.llm.max_retries, "llm");
    read(n, "api_key_env", c.llm.api_key_env, "llm");
    read_size(n, "timeout_ms", c.llm.timeout_ms, "llm");
    read_size(n, "retry_backoff_ms", c.llm.retry_backoff_ms, "llm");
    read_size(n, "max_rounds", c.llm.max_rounds, "llm");
    read(n, "prompt", c.llm_prompt, "llm");
  }
  if (const auto n = root["embed"]) {
    check_keys(n, "embed",
               {"endpoint", "model", "batch_size", "api_key_env", "timeout_ms", "max_retries", "retry_backoff_ms",
                "parallel_batches", "cache_dir", "prompt"});
    read(n, "endpoint", c.embed.endpoint_url, "embed");
    read(n, "model", c.embed.model_name, "embed");
    read_size(n, "batch_size", c.embed.batch_size, "embed");
    read(n, "api_key_env", c.embed.api_key_env, "embed");
    read_size(n, "timeout_ms", c.embed.timeout_ms, "embed");
    read_size(n, "max_retries", c.embed.max_retries, "embed");
    read_size(n, "retry_backoff_ms", c.embed.retry_backoff_ms, "embed");
    read_size(n, "parallel_batches", c.embed.parallel_batches, "embed");
    if (n["cache_dir"]) c.cache_dir = n["cache_dir"].as<std::string>();
    read(n, "prompt", c.vlm_prompt.body, "embed");
  }
  if (const auto n = root["transform"]) {
    check_keys(n, "transform", {"normalize_images_first", "standardize", "standardize_epsilon"});
    read(n, "normalize_images_first", c.transform.normalize_images_first, "transform");
    read(n, "standardize", c.transform.standardize_output, "transform");
    read(n, "standardize_epsilon", c.transform.standardize_epsilon, "transform");
  }
  if (const auto n = root["cluster"]) {
    check_keys(n, "cluster", {"trials", "max_iters", "tol", "init", "normalize_rows", "threads"});
    read_size(n, "trials", c.cluster.trials, "cluster");
    read_size(n, "max_iters", c.cluster.max_iters, "cluster");
    read(n, "tol", c.cluster.tol, "cluster");
    if (n["init"]) {
      const auto init = n["init"].as<std::string>();
      if (init == "kmeans++") {
        c.cluster.init = eval::KMeansInit::kmeans_plus_plus;
      } else if (init == "random") {
        c.cluster.init = eval::KMeansInit::random;
      } else {
        fail("cluster.init must be 'kmeans++' or 'random', got '" + init + "'");
      }
    }
    read(n, "normalize_rows", c.cluster.normalize_rows, "cluster");
    read_size(n, "threads", c.cluster.threads, "cluster");
  }
  if (const auto n = root["fewshot"]) {
    check_keys(n, "fewshot", {"shots", "draws", "l2_strength", "max_iters", "lr", "grad_tol", "threads"});
    read(n, "shots", c.fewshot.shots, "fewshot");
    read_size(n, "draws", c.fewshot.draws, "fewshot");
    read(n, "l2_strength", c.fewshot.l2_strength, "fewshot");
    read_size(n, "max_iters", c.fewshot.max_iters, "fewshot");
    read(n, "lr", c.fewshot.lr, "fewshot");
    read(n, "grad_tol", c.fewshot.grad_tol, "fewshot");
    read_size(n, "threads", c.fewshot.threads, "fewshot");
  }
  if (const auto n = root["retrieval"]) {
    check_keys(n, "retrieval", {"alpha", "ks"});
    read(n, "alpha", c.retrieval.alpha, "retrieval");
    read(n, "ks", c.retrieval.ks, "retrieval");
  }
  if (const auto n = root["triplet"]) {
    check_keys(n, "triplet",
               {"margin", "epochs", "lr", "lr_decay", "decay_step", "hidden_dim", "output_dim", "batch_size"});
    read(n, "margin", c.triplet.margin, "triplet");
    read_size(n, "epochs", c.triplet.epochs, "triplet");
    read(n, "lr", c.triplet.lr, "triplet");
    read(n, "lr_decay", c.triplet.lr_decay, "triplet");
    read_size(n, "decay_step", c.triplet.decay_step, "triplet");
    read_size(n, "hidden_dim", c.triplet.hidden_dim, "triplet");
    read_size(n, "output_dim", c.triplet.output_dim, "triplet");
    read_size(n, "batch_size", c.triplet.batch_size, "triplet");
  }
  if (root["output_dir"]) c.output_dir = root["output_dir"].as<std::string>();
  read(root, "base_seed", c.base_seed, "config");
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  return parse_pipeline_config(read_file(path));
}

synth::SynthSpec parse_synth_spec(const std::string& yaml_text) {
  synth::SynthSpec s = synth::SynthSpec::two_criteria();
  const YAML::Node root = parse_yaml(yaml_text);
  if (root.IsNull()) return s;
  check_keys(root, "spec", {"n_samples", "criteria", "noise_std", "descriptors_per_class", "descriptor_noise_std", "seed"});
  read_size(root, "n_samples", s.n_samples, "spec");
  read(root, "noise_std", s.noise_std, "spec");
  read_size(root, "descriptors_per_class", s.descriptors_per_class, "spec");
  read(root, "descriptor_noise_std", s.descriptor_noise_std, "spec");
  read(root, "seed", s.seed, "spec");
  if (const auto list = root["criteria"]) {
    if (!list.IsSequence()) fail("'spec.criteria' must be a list");
    s.criteria.clear();
    for (const auto& n : list) {
      check_keys(n, "spec.criteria[]", {"name", "n_classes", "block_dims", "scale"});
      synth::SynthCriterion c;
      read(n, "name", c.name, "spec.criteria[]");
      read_size(n, "n_classes", c.n_classes, "spec.criteria[]");
      read_size(n, "block_dims", c.block_dims, "spec.criteria[]");
      read(n, "scale", c.scale, "spec.criteria[]");
      s.criteria.push_back(std::move(c));
    }
  }
  s.validate();
  return s;
}

synth::SynthSpec load_synth_spec(const std::filesystem::path& path) { return parse_synth_spec(read_file(path)); }

}  // namespace crl::cli
