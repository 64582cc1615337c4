#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crl/basis/llm_client.hpp"
#include "crl/basis/prompts.hpp"
#include "crl/eval/cluster.hpp"
#include "crl/eval/fewshot.hpp"
#include "crl/eval/retrieval.hpp"
#include "crl/eval/triplet.hpp"
#include "crl/providers/embed_client.hpp"
#include "crl/synth/synthbench.hpp"
#include "crl/transform/transform.hpp"

namespace crl::cli {

struct CriterionBlock {
  std::string name;
  std::string subject_noun = "Objects";
  std::optional<std::string> notes;
  std::vector<std::string> synonyms;
};

/// Everything a pipeline run can be configured with. Every block is
/// optional in the YAML document; command-line flags override it.
struct PipelineConfig {
  CriterionBlock criterion;
  basis::LlmRequestConfig llm;
  std::string llm_prompt = "default";
  providers::EmbedProviderConfig embed;
  std::optional<std::filesystem::path> cache_dir;
  basis::VlmPromptTemplate vlm_prompt;
  transform::TransformOptions transform;
  eval::ClusterConfig cluster;
  eval::FewShotConfig fewshot;
  eval::CombinedScoreConfig retrieval;
  eval::TripletTrainConfig triplet;
  std::filesystem::path output_dir = ".";
  std::uint64_t base_seed = 0;
};

/// Parses a YAML document. Unknown keys are rejected so typos surface as
/// config errors instead of silently falling back to defaults.
PipelineConfig parse_pipeline_config(const std::string& yaml_text);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

synth::SynthSpec parse_synth_spec(const std::string& yaml_text);
synth::SynthSpec load_synth_spec(const std::filesystem::path& path);

}  // namespace crl::cli
