#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "config.hpp"
#include "crl/basis/basis.hpp"
#include "crl/basis/transcript.hpp"
#include "crl/core/error.hpp"
#include "crl/eval/reports.hpp"
#include "crl/providers/cache.hpp"
#include "crl/providers/crle.hpp"
#include "crl/providers/manifest.hpp"

namespace crl::cli {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::optional<std::string> find_config_arg(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string(), {{"path", path.string()}});
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string(), {{"path", path.string()}});
  out << text;
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string(), {{"path", path.string()}});
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    write_text(out_path, text);
  }
}

std::string require_criterion(const std::string& flag, const PipelineConfig& cfg) {
  const std::string name = flag.empty() ? cfg.criterion.name : flag;
  if (name.empty()) throw Error(ErrorKind::config, "a criterion is required (--criterion or criterion.name)");
  return name;
}

Criterion criterion_from(const std::string& name, const PipelineConfig& cfg, const std::string& subject_flag) {
  Criterion c = make_criterion(name, subject_flag.empty() ? cfg.criterion.subject_noun : subject_flag);
  if (name == cfg.criterion.name) {
    c.notes = cfg.criterion.notes;
    c.synonym_examples = cfg.criterion.synonyms;
  }
  c.validate();
  return c;
}

fs::path manifest_path_for(const fs::path& crle, const std::string& given) {
  return given.empty() ? providers::default_manifest_path(crle) : fs::path(given);
}

LabeledDataset load_dataset(const fs::path& crle, const std::string& manifest) {
  const fs::path mp = manifest_path_for(crle, manifest);
  if (!fs::exists(mp)) throw Error(ErrorKind::io, "manifest not found: " + mp.string(), {{"path", mp.string()}});
  return providers::load_labeled_dataset(crle, mp);
}

/// Matrix with ids from its manifest when one exists next to it.
EmbeddingMatrix load_matrix(const fs::path& crle, const std::string& manifest = {}) {
  const fs::path mp = manifest_path_for(crle, manifest);
  if (!manifest.empty() || fs::exists(mp)) return load_dataset(crle, manifest).embeddings();
  return providers::read_crle(crle);
}

std::vector<std::string> read_descriptor_file(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return nlohmann::json::parse(text).get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("descriptor file must be a JSON list of strings: " + std::string(e.what()), text.substr(0, 200));
  }
}

void seed_all(PipelineConfig& cfg) {
  cfg.cluster.base_seed = cfg.base_seed;
  cfg.fewshot.base_seed = cfg.base_seed;
  cfg.triplet.seed = cfg.base_seed;
}

// ---- basis-generate ---------------------------------------------------------

struct GenerateArgs {
  std::string criterion;
  std::string subject;
  std::optional<std::size_t> count;
  std::string transcript;
  std::string replay;
  std::string out;
};

void cmd_basis_generate(const GenerateArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  const std::string name = require_criterion(a.criterion, cfg);
  const Criterion c = criterion_from(name, cfg, a.subject);
  cfg.llm.validate();

  basis::DescriptorRequest request;
  request.prompt = basis::LlmPromptTemplate::by_id(cfg.llm_prompt);
  request.target_count = a.count;
  request.max_rounds = cfg.llm.max_rounds;

  std::vector<std::string> descriptors;
  fs::path transcript_path;
  if (!a.replay.empty()) {
    auto backend = basis::ReplayChatBackend::from_file(a.replay);
    descriptors = basis::request_descriptors(c, backend, request);
  } else {
    transcript_path = a.transcript.empty() ? cfg.output_dir / ("transcript-" + name + ".jsonl") : fs::path(a.transcript);
    write_text(transcript_path, "");
    basis::HttpChatClient client(cfg.llm);
    basis::RecordingChatBackend backend(client, transcript_path, cfg.llm.model_name, cfg.llm.temperature);
    descriptors = basis::request_descriptors(c, backend, request);
  }

  const fs::path out_path = a.out.empty() ? cfg.output_dir / ("descriptors-" + name + ".json") : fs::path(a.out);
  write_text(out_path, nlohmann::json(descriptors).dump(2) + "\n");
  Json summary{{"criterion", name}, {"descriptors", descriptors.size()}, {"path", out_path.string()}};
  if (!transcript_path.empty()) summary["transcript"] = transcript_path.string();
  out << summary.dump() << "\n";
}

// ---- basis-encode -----------------------------------------------------------

struct EncodeArgs {
  std::string descriptors;
  std::string criterion;
  std::string subject;
  std::string out;
  std::string cache_dir;
  bool no_cache = false;
};

void cmd_basis_encode(const EncodeArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  const std::string name = require_criterion(a.criterion, cfg);
  const Criterion c = criterion_from(name, cfg, a.subject);
  const auto descriptors = read_descriptor_file(a.descriptors);

  std::shared_ptr<providers::EmbeddingCache> cache;
  if (!a.no_cache) {
    const fs::path root = !a.cache_dir.empty() ? fs::path(a.cache_dir)
                          : cfg.cache_dir       ? *cfg.cache_dir
                                                : providers::EmbeddingCache::default_root();
    cache = std::make_shared<providers::EmbeddingCache>(root);
  }
  providers::EmbeddingService service(std::make_shared<providers::HttpEmbedTransport>(cfg.embed), cfg.embed, cache);
  const TextBasis basis = basis::build_basis(c, descriptors, service, cfg.vlm_prompt);

  const fs::path out_path = a.out.empty() ? cfg.output_dir / ("basis-" + name + ".crle") : fs::path(a.out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  providers::save_basis(basis, out_path, providers::default_manifest_path(out_path),
                        "descriptors=" + fs::path(a.descriptors).filename().string());
  out << Json{{"criterion", name},
              {"rows", basis.vectors().rows()},
              {"dims", basis.vectors().dims()},
              {"provider_calls", service.batches_sent()},
              {"fingerprint", basis.fingerprint()},
              {"path", out_path.string()}}
             .dump()
      << "\n";
}

// ---- transform --------------------------------------------------------------

struct TransformArgs {
  std::string images;
  std::string manifest;
  std::string basis;
  std::string out;
};

void cmd_transform(const TransformArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  const fs::path basis_path = a.basis;
  const TextBasis basis = providers::load_basis(basis_path, providers::default_manifest_path(basis_path));
  const fs::path mp = manifest_path_for(a.images, a.manifest);
  std::optional<LabeledDataset> dataset;
  EmbeddingMatrix images;
  if (!a.manifest.empty() || fs::exists(mp)) {
    dataset.emplace(load_dataset(a.images, a.manifest));
    images = dataset->embeddings();
  } else {
    images = providers::read_crle(a.images);
  }
  const auto proj = transform::project(images, basis, cfg.transform);
  const auto& r = proj.representation.matrix;

  const fs::path out_path = a.out.empty() ? cfg.output_dir / ("conditional-" + basis.criterion().name + ".crle")
                                          : fs::path(a.out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  providers::write_crle(r, out_path);
  const std::string source = "transform basis=" + basis.fingerprint() + " criterion=" + basis.criterion().name;
  providers::Manifest m;
  if (dataset) {
    m = providers::manifest_for(LabeledDataset(r, dataset->label_columns(), [&] {
                                  std::map<std::string, std::vector<std::string>> names;
                                  for (const auto& c : dataset->criteria()) names[c] = dataset->class_names(c);
                                  return names;
                                }()),
                                "crl-transform", source);
  } else {
    m.ids = r.ids();
    m.provider = "crl-transform";
    m.source = source;
  }
  providers::write_manifest(m, providers::default_manifest_path(out_path));
  Json summary{{"rows", r.rows()},
               {"dims", r.dims()},
               {"criterion", basis.criterion().name},
               {"zero_image_rows", proj.zero_image_rows.size()},
               {"constant_columns", proj.constant_columns},
               {"path", out_path.string()}};
  out << summary.dump() << "\n";
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string features;
  std::string manifest;
  std::string criterion;
  std::string basis;
  std::string out;
  std::size_t k = 0;
  // sim-retrieval
  std::string images;
  std::string conditions;
  std::string conditional;
  std::string instances;
  // fashion-retrieval
  std::string queries;
  std::string triplets;
};

EmbeddingMatrix features_for(const EmbeddingMatrix& raw, const std::string& basis_path,
                             const transform::TransformOptions& options) {
  if (basis_path.empty()) return raw;
  const TextBasis basis = providers::load_basis(basis_path, providers::default_manifest_path(basis_path));
  return transform::project(raw, basis, options).representation.matrix;
}

void cmd_eval_cluster(const EvalArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  const std::string name = require_criterion(a.criterion, cfg);
  const LabeledDataset ds = load_dataset(a.features, a.manifest);
  const auto& labels = ds.labels(name);
  eval::ClusterConfig cc = cfg.cluster;
  cc.k = a.k ? a.k : ds.class_count(name);
  const auto x = features_for(ds.embeddings(), a.basis, cfg.transform);
  const auto result = eval::run_clustering_eval(x, labels, cc);
  emit(eval::cluster_report(name, cc, result), a.out, out);
}

void cmd_eval_fewshot(const EvalArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  const std::string name = require_criterion(a.criterion, cfg);
  const LabeledDataset ds = load_dataset(a.features, a.manifest);
  const auto& labels = ds.labels(name);
  // The protocol standardizes on the support set itself.
  transform::TransformOptions options = cfg.transform;
  options.standardize_output = false;
  const auto x = features_for(ds.embeddings(), a.basis, options);
  const auto result = eval::run_fewshot_eval(x, labels, ds.class_count(name), cfg.fewshot);
  emit(eval::fewshot_report(name, cfg.fewshot, result), a.out, out);
}

void cmd_eval_similarity(const EvalArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  if (a.images.empty() || a.conditions.empty() || a.instances.empty()) {
    throw Error(ErrorKind::config, "sim-retrieval needs --images, --conditions and --instances");
  }
  const EmbeddingMatrix images = load_matrix(a.images, a.manifest);
  const EmbeddingMatrix conditions = load_matrix(a.conditions);
  ConditionalRepresentation conditional;
  std::string name = a.criterion.empty() ? cfg.criterion.name : a.criterion;
  if (!a.conditional.empty()) {
    conditional = {load_matrix(a.conditional), "", name};
  } else if (!a.basis.empty()) {
    const TextBasis basis = providers::load_basis(a.basis, providers::default_manifest_path(a.basis));
    conditional = transform::project(images, basis, cfg.transform).representation;
    if (name.empty()) name = basis.criterion().name;
  } else {
    throw Error(ErrorKind::config, "sim-retrieval needs --basis or --conditional");
  }
  const auto instances = eval::read_similarity_instances(a.instances);
  const auto table = eval::run_similarity_eval(instances, images, conditions, conditional, cfg.retrieval);
  emit(eval::recall_report(name, cfg.retrieval, table), a.out, out);
}

void cmd_eval_fashion(const EvalArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  if (a.queries.empty()) throw Error(ErrorKind::config, "fashion-retrieval needs --queries");
  const LabeledDataset ds = load_dataset(a.features, a.manifest);
  const auto queries = eval::read_fashion_queries(a.queries);
  std::optional<TextBasis> basis;
  if (!a.basis.empty()) basis.emplace(providers::load_basis(a.basis, providers::default_manifest_path(a.basis)));
  const auto options = cfg.transform;
  auto project = [&](const EmbeddingMatrix& x) {
    return basis ? transform::project(x, *basis, options).representation.matrix : x;
  };

  eval::FashionReportExtras extras;
  std::optional<eval::Mlp> mlp;
  if (!a.triplets.empty()) {
    const EmbeddingMatrix reps = project(ds.embeddings());
    const auto triplets = eval::read_triplets(a.triplets, reps);
    auto trained = eval::train_projection_mlp(reps, triplets, cfg.triplet);
    extras = {true, cfg.triplet, trained.initial_loss, trained.final_loss};
    mlp = std::move(trained.mlp);
  }
  const eval::RepresentationFn represent = [&](const EmbeddingMatrix& x) {
    const EmbeddingMatrix r = project(x);
    return mlp ? mlp->apply(r) : r;
  };
  const auto report = eval::run_fashion_eval(queries, ds, represent);
  std::string name = a.criterion;
  if (name.empty() && !queries.empty()) name = queries.front().criterion;
  emit(eval::map_report(name, report, extras), a.out, out);
}

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string spec;
  std::optional<std::uint64_t> world_seed;
  std::string criterion;
  std::string out;
  std::string protocol = "cluster";
  std::vector<std::size_t> counts = {2, 5, 10, 25, 50};
};

synth::SynthSpec spec_from(const SynthArgs& a) {
  synth::SynthSpec s = a.spec.empty() ? synth::SynthSpec::two_criteria() : load_synth_spec(a.spec);
  if (a.world_seed) s.seed = *a.world_seed;
  s.validate();
  return s;
}

std::string synth_criterion(const SynthArgs& a, const synth::SynthSpec& s) {
  if (!a.criterion.empty()) return a.criterion;
  // Default to the first non-dominant criterion: the interesting case.
  const std::size_t dom = s.dominant();
  for (std::size_t i = 0; i < s.criteria.size(); ++i) {
    if (i != dom) return s.criteria[i].name;
  }
  return s.criteria[dom].name;
}

void cmd_synth_generate(const SynthArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  const auto world = synth::generate_world(spec_from(a));
  const fs::path dir = a.out.empty() ? cfg.output_dir / "synth" : fs::path(a.out);
  const auto files = synth::write_world(world, dir);
  Json bases = Json::object();
  for (const auto& [name, path] : files.bases) bases[name] = path.string();
  out << Json{{"embeddings", files.embeddings.string()}, {"manifest", files.manifest.string()}, {"bases", bases}}.dump()
      << "\n";
}

Json shots_json(const eval::FewShotResult& r) {
  Json j = Json::object();
  for (const auto& s : r.per_shot) j[std::to_string(s.shots)] = Json{{"mean", s.summary.mean}, {"std", s.summary.stddev}};
  return j;
}

void cmd_synth_compare(const SynthArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  const auto spec = spec_from(a);
  const auto world = synth::generate_world(spec);
  const std::string name = synth_criterion(a, spec);
  if (a.protocol == "cluster") {
    const auto cmp = synth::crl_vs_baseline(world, name, cfg.cluster, cfg.transform);
    emit(synth::comparison_report(name, cfg.cluster, cmp), a.out, out);
  } else if (a.protocol == "fewshot") {
    transform::TransformOptions options = cfg.transform;
    options.standardize_output = false;
    const auto cmp = synth::fewshot_vs_baseline(world, name, cfg.fewshot, options);
    Json j;
    j["protocol"] = "synth-compare-fewshot";
    j["criterion"] = name;
    j["draws"] = cfg.fewshot.draws;
    j["seed"] = cfg.fewshot.base_seed;
    j["baseline"] = shots_json(cmp.baseline);
    j["conditional"] = shots_json(cmp.conditional);
    emit(j.dump(2) + "\n", a.out, out);
  } else {
    throw Error(ErrorKind::config, "--protocol must be 'cluster' or 'fewshot', got '" + a.protocol + "'");
  }
}

void cmd_synth_sweep(const SynthArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  const auto spec = spec_from(a);
  const auto world = synth::generate_world(spec);
  const std::string name = synth_criterion(a, spec);
  const auto rows = synth::text_count_sweep(world, name, a.counts, cfg.cluster, cfg.transform);
  emit(synth::sweep_report(name, cfg.cluster, rows), a.out, out);
}

std::string usage_json(const std::string& message) {
  return Json{{"error", "usage"}, {"message", message}}.dump();
}

}  // namespace

std::string error_json(const std::exception& e) {
  Json j;
  if (const auto* ce = dynamic_cast<const Error*>(&e)) {
    j["error"] = std::string(to_string(ce->kind()));
    j["message"] = ce->what();
    Json details = Json::object();
    for (const auto& [key, value] : ce->details()) {
      std::visit([&](const auto& v) { details[key] = v; }, value);
    }
    if (!details.empty()) j["details"] = details;
  } else {
    j["error"] = "internal";
    j["message"] = e.what();
  }
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    PipelineConfig cfg;
    if (const auto path = find_config_arg(args)) cfg = load_pipeline_config(*path);

    CLI::App app{"Conditional representation toolkit", "crl"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "YAML pipeline config");
    app.add_option("--seed", cfg.base_seed, "Base seed for every randomized protocol");
    app.add_option("--output-dir", cfg.output_dir, "Directory for default output paths");

    GenerateArgs gen;
    auto* generate = app.add_subcommand("basis-generate", "Ask an LLM for criterion descriptors");
    generate->add_option("--criterion", gen.criterion, "Criterion name");
    generate->add_option("--subject", gen.subject, "Subject noun for prompts");
    generate->add_option("--count", gen.count, "Exact number of descriptors to collect");
    generate->add_option("--prompt", cfg.llm_prompt, "Prompt template id: default, variant-1..5");
    generate->add_option("--temperature", cfg.llm.temperature, "Sampling temperature");
    generate->add_option("--model", cfg.llm.model_name, "LLM model name");
    generate->add_option("--transcript", gen.transcript, "Where to record the LLM exchange");
    generate->add_option("--replay", gen.replay, "Answer prompts from a recorded transcript");
    generate->add_option("--out", gen.out, "Descriptor list output (JSON)");

    EncodeArgs enc;
    auto* encode = app.add_subcommand("basis-encode", "Encode descriptors into a text basis");
    encode->add_option("--descriptors", enc.descriptors, "Descriptor list (JSON)")->required();
    encode->add_option("--criterion", enc.criterion, "Criterion name");
    encode->add_option("--subject", enc.subject, "Subject noun for prompts");
    encode->add_option("--out", enc.out, "Basis CRLE output");
    encode->add_option("--cache-dir", enc.cache_dir, "Embedding cache directory");
    encode->add_flag("--no-cache", enc.no_cache, "Bypass the embedding cache");

    TransformArgs tra;
    auto* transform_cmd = app.add_subcommand("transform", "Project image embeddings onto a basis");
    transform_cmd->add_option("--images", tra.images, "Image embeddings (CRLE)")->required();
    transform_cmd->add_option("--manifest", tra.manifest, "Manifest for the image embeddings");
    transform_cmd->add_option("--basis", tra.basis, "Basis CRLE")->required();
    transform_cmd->add_option("--out", tra.out, "Conditional CRLE output");
    transform_cmd->add_flag("--standardize", cfg.transform.standardize_output, "Standardize conditional columns");
    transform_cmd->add_flag("!--no-normalize-images", cfg.transform.normalize_images_first,
                            "Project raw (unnormalized) image rows");

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Run an evaluation protocol");
    eval_cmd->require_subcommand(1);
    auto add_common = [&](CLI::App* sub, bool needs_features) {
      auto* f = sub->add_option("--features", ev.features, "Embeddings (CRLE) with a manifest");
      if (needs_features) f->required();
      sub->add_option("--manifest", ev.manifest, "Manifest (default <stem>.manifest.json)");
      sub->add_option("--criterion", ev.criterion, "Criterion name");
      sub->add_option("--basis", ev.basis, "Project features onto this basis first");
      sub->add_option("--out", ev.out, "Report path (default stdout)");
      sub->add_flag("--standardize", cfg.transform.standardize_output, "Standardize conditional columns");
      sub->add_flag("!--no-normalize-images", cfg.transform.normalize_images_first,
                    "Project raw rather than unit image rows");
    };
    auto* ev_cluster = eval_cmd->add_subcommand("cluster", "k-means clustering protocol");
    add_common(ev_cluster, true);
    ev_cluster->add_option("--k", ev.k, "Cluster count (default: class count)");
    ev_cluster->add_option("--trials", cfg.cluster.trials, "k-means trials");
    ev_cluster->add_option("--max-iters", cfg.cluster.max_iters, "Lloyd iteration cap");
    ev_cluster->add_flag("--normalize-rows", cfg.cluster.normalize_rows, "L2-normalize rows before clustering");

    auto* ev_fewshot = eval_cmd->add_subcommand("fewshot", "Few-shot linear probe protocol");
    add_common(ev_fewshot, true);
    ev_fewshot->add_option("--shots", cfg.fewshot.shots, "Shots per class")->delimiter(',');
    ev_fewshot->add_option("--draws", cfg.fewshot.draws, "Support draws per shot count");
    ev_fewshot->add_option("--l2", cfg.fewshot.l2_strength, "L2 strength");

    auto* ev_sim = eval_cmd->add_subcommand("sim-retrieval", "Combined-score similarity retrieval");
    add_common(ev_sim, false);
    ev_sim->add_option("--images", ev.images, "Image embeddings (CRLE)");
    ev_sim->add_option("--conditions", ev.conditions, "Condition-text embeddings (CRLE, ids = texts)");
    ev_sim->add_option("--conditional", ev.conditional, "Precomputed conditional representation (CRLE)");
    ev_sim->add_option("--instances", ev.instances, "Instances (JSON lines)");
    ev_sim->add_option("--alpha", cfg.retrieval.alpha, "Weight of the conditional term");
    ev_sim->add_option("--ks", cfg.retrieval.ks, "Recall cutoffs")->delimiter(',');

    auto* ev_fashion = eval_cmd->add_subcommand("fashion-retrieval", "Attribute retrieval (MAP)");
    add_common(ev_fashion, true);
    ev_fashion->add_option("--queries", ev.queries, "Queries (JSON lines)");
    ev_fashion->add_option("--triplets", ev.triplets, "Train an MLP head on these triplets first");
    ev_fashion->add_option("--epochs", cfg.triplet.epochs, "MLP training epochs");
    ev_fashion->add_option("--lr", cfg.triplet.lr, "MLP learning rate");
    ev_fashion->add_option("--margin", cfg.triplet.margin, "Triplet margin");
    ev_fashion->add_option("--hidden-dim", cfg.triplet.hidden_dim, "MLP hidden width (0 = input width)");

    SynthArgs sy;
    auto* synth_cmd = app.add_subcommand("synth", "Synthetic benchmark");
    synth_cmd->require_subcommand(1);
    auto add_synth = [&](CLI::App* sub) {
      sub->add_option("--spec", sy.spec, "World spec (YAML); default two-criteria world");
      sub->add_option("--world-seed", sy.world_seed, "Override the spec seed");
      sub->add_option("--out", sy.out, "Output path");
    };
    auto* sy_generate = synth_cmd->add_subcommand("generate", "Write a synthetic world as CRLE files");
    add_synth(sy_generate);
    auto* sy_compare = synth_cmd->add_subcommand("compare", "Raw vs conditional on one criterion");
    add_synth(sy_compare);
    sy_compare->add_option("--criterion", sy.criterion, "Criterion (default: first non-dominant)");
    sy_compare->add_option("--protocol", sy.protocol, "cluster or fewshot");
    sy_compare->add_option("--trials", cfg.cluster.trials, "k-means trials");
    sy_compare->add_option("--draws", cfg.fewshot.draws, "Few-shot draws");
    auto* sy_sweep = synth_cmd->add_subcommand("sweep", "Clustering accuracy vs basis size");
    add_synth(sy_sweep);
    sy_sweep->add_option("--criterion", sy.criterion, "Criterion (default: first non-dominant)");
    sy_sweep->add_option("--counts", sy.counts, "Basis sizes")->delimiter(',');
    sy_sweep->add_option("--trials", cfg.cluster.trials, "k-means trials");

    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      err << usage_json(e.what()) << "\n";
      return 2;
    }
    seed_all(cfg);

    if (*generate) cmd_basis_generate(gen, cfg, out);
    else if (*encode) cmd_basis_encode(enc, cfg, out);
    else if (*transform_cmd) cmd_transform(tra, cfg, out);
    else if (*ev_cluster) cmd_eval_cluster(ev, cfg, out);
    else if (*ev_fewshot) cmd_eval_fewshot(ev, cfg, out);
    else if (*ev_sim) cmd_eval_similarity(ev, cfg, out);
    else if (*ev_fashion) cmd_eval_fashion(ev, cfg, out);
    else if (*sy_generate) cmd_synth_generate(sy, cfg, out);
    else if (*sy_compare) cmd_synth_compare(sy, cfg, out);
    else if (*sy_sweep) cmd_synth_sweep(sy, cfg, out);
    return 0;
  } catch (const std::exception& e) {
    err << error_json(e) << "\n";
    return 1;
  }
}

}  // namespace crl::cli
