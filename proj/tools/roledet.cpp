// roledet: command line driver for the role detection pipeline.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "roledet/errors.hpp"
#include "roledet/pipeline.hpp"
#include "roledet/statistics.hpp"
#include "roledet/synthetic.hpp"
#include "roledet/text.hpp"

using namespace roledet;
namespace fs = std::filesystem;

namespace {

struct StageFailure : std::runtime_error {
  StageFailure(const std::string& stage, const std::exception& cause)
      : std::runtime_error("stage '" + stage + "' failed: " + cause.what()) {}
};

/// Runs a stage, tagging non-input failures with the stage name.
template <typename F>
auto stage(const std::string& name, F&& f) {
  std::cerr << "[" << name << "]\n";
  try {
    return f();
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageFailure(name, e);
  }
}

struct CommonOptions {
  std::string config;
  std::vector<std::string> inputs;
  std::string format;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  // overrides
  std::optional<std::size_t> radius;
  std::optional<std::size_t> expansion;
  std::string phrases;
  std::string context;
  std::string kind;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  app->add_option("--input,-i", o.inputs, "Corpus file(s); overrides corpus.paths");
  app->add_option("--format", o.format, "Corpus format")->check(CLI::IsMember({"jsonl", "column", "conll"}));
  app->add_option("--out,-o", o.out, "Output directory");
  app->add_option("--seed", o.seed, "Random seed");
  app->add_flag("--deterministic", o.deterministic, "Single-threaded, bitwise reproducible");
}

void add_overrides(CLI::App* app, CommonOptions& o) {
  app->add_option("--d", o.radius, "Context window radius");
  app->add_option("--n", o.expansion, "Query expansion size; selects TV-SW<n>");
  app->add_option("--phrases", o.phrases, "Phrase mode")->check(CLI::IsMember({"none", "collocation", "relation"}));
  app->add_option("--context", o.context, "Context level")->check(CLI::IsMember({"sentence", "document"}));
  app->add_option("--kind", o.kind, "Entity representation")
      ->check(CLI::IsMember({"cluster", "centroid", "docvec", "E-W", "E-V-C", "E-V-D2V"}));
}

PipelineConfig resolve(const CommonOptions& o) {
  PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : load_config(o.config);
  if (!o.inputs.empty()) cfg.corpus.assign(o.inputs.begin(), o.inputs.end());
  if (!o.format.empty()) cfg.format = parse_format(o.format);
  if (!o.out.empty()) cfg.out = o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.deterministic) cfg.deterministic = true;
  if (cfg.deterministic) cfg.train.threads = 1;
  if (o.radius) cfg.radii = {*o.radius};
  if (o.expansion) cfg.queries = {QuerySpec{QueryKind::tv_sw, *o.expansion}};
  if (!o.phrases.empty()) cfg.phrase_modes = {parse_phrase_mode(o.phrases)};
  if (!o.context.empty()) cfg.contexts = {parse_context(o.context)};
  if (!o.kind.empty()) cfg.kinds = {parse_kind(o.kind)};
  cfg.validate();
  fs::create_directories(cfg.out);
  write_resolved_config(cfg);
  return cfg;
}

std::string stringify(auto&& writer) {
  std::ostringstream s;
  writer(s);
  return s.str();
}

void print_frequencies(const AnnotatedCorpus& corpus, std::ostream& out) {
  const RoleCounts counts = role_frequencies(corpus);
  out << "Role,Frequency\n";
  for (Role r : kAllRoles) out << role_name(r) << ',' << counts[role_index(r)] << '\n';
}

AnnotatedCorpus load_input(const PipelineConfig& cfg) {
  return stage("load", [&] { return load_corpora(cfg.corpus, cfg.format); });
}

int cmd_ingest(const PipelineConfig& cfg) {
  const AnnotatedCorpus corpus = load_input(cfg);
  stage("write", [&] {
    write_file(cfg.out / "corpus.jsonl", stringify([&](std::ostream& s) { write_jsonl(corpus, s); }));
    write_file(cfg.out / "role_frequencies.csv", stringify([&](std::ostream& s) { print_frequencies(corpus, s); }));
  });
  print_frequencies(corpus, std::cout);
  return 0;
}

int cmd_convert(const PipelineConfig& cfg, const std::string& to, const std::string& output) {
  const AnnotatedCorpus corpus = load_input(cfg);
  const CorpusFormat format = parse_format(to);
  const fs::path target = output.empty() ? cfg.out / (format == CorpusFormat::jsonl ? "corpus.jsonl" : "corpus.conll")
                                         : fs::path(output);
  stage("write", [&] {
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    save_corpus(corpus, target, format);
  });
  return 0;
}

int cmd_synth(const PipelineConfig& cfg, const std::string& spec_path, std::optional<std::size_t> documents,
              std::optional<double> noise, std::optional<double> cue_noise, bool cue_first_only) {
  SyntheticSpec spec;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw InputError("cannot open spec '" + spec_path + "'");
    try {
      spec = spec_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw InputError("spec '" + spec_path + "': " + e.what());
    }
  }
  if (documents) spec.documents = *documents;
  if (noise) spec.majority_noise = spec.positional_noise = *noise;
  if (cue_noise) spec.cue_noise = *cue_noise;
  if (cue_first_only) spec.cue_first_mention_only = true;
  spec.validate();
  const SyntheticCorpus synth = stage("synth", [&] { return generate_synthetic(cfg.seed, spec); });
  stage("write", [&] {
    write_file(cfg.out / "corpus.jsonl", stringify([&](std::ostream& s) { write_jsonl(synth.corpus, s); }));
    write_file(cfg.out / "corpus.conll", stringify([&](std::ostream& s) { write_column(synth.corpus, s); }));
    write_file(cfg.out / "spec.json", to_json(spec).dump(2) + "\n");
    write_file(cfg.out / "truth.json", to_json(synth.truth).dump(2) + "\n");
  });
  std::cout << synth.corpus.documents.size() << " documents, " << synth.truth.entities.size() << " entities, "
            << synth.truth.mentions << " mentions\n";
  return 0;
}

int cmd_stats(const PipelineConfig& cfg) {
  const AnnotatedCorpus corpus = load_input(cfg);
  const StatisticsReport report = stage("stats", [&] { return mention_statistics(corpus); });
  stage("write", [&] {
    write_file(cfg.out / "statistics.json", to_json(report).dump(2) + "\n");
    write_file(cfg.out / "mention_histogram.csv", stringify([&](std::ostream& s) { write_histogram_csv(report, s); }));
    write_file(cfg.out / "majority_by_mentions.csv", stringify([&](std::ostream& s) { write_majority_csv(report, s); }));
    write_file(cfg.out / "positional_by_role.csv", stringify([&](std::ostream& s) { write_positional_csv(report, s); }));
    write_file(cfg.out / "summary.csv", stringify([&](std::ostream& s) { write_summary_csv(report, s); }));
  });
  write_summary_csv(report, std::cout);
  return 0;
}

int cmd_phrases(const PipelineConfig& cfg) {
  const AnnotatedCorpus raw = load_input(cfg);
  for (PhraseMode mode : cfg.phrase_modes) {
    if (mode == PhraseMode::none) continue;
    const std::string name(phrase_mode_name(mode));
    PhraseTable table;
    const AnnotatedCorpus merged = stage("phrases:" + name, [&] { return prepare_corpus(raw, cfg, mode, &table); });
    stage("write", [&] {
      write_file(cfg.out / ("phrases_" + name + ".tsv"), stringify([&](std::ostream& s) { write_phrase_table(table, s); }));
      write_file(cfg.out / ("corpus_" + name + ".jsonl"), stringify([&](std::ostream& s) { write_jsonl(merged, s); }));
    });
    std::cout << name << ": " << table.size() << " phrases\n";
  }
  return 0;
}

int cmd_embed(const PipelineConfig& cfg) {
  const AnnotatedCorpus raw = load_input(cfg);
  for (PhraseMode mode : cfg.phrase_modes) {
    const std::string name(phrase_mode_name(mode));
    const AnnotatedCorpus prepared = stage("prepare", [&] { return prepare_corpus(raw, cfg, mode); });
    const TrainedModels models = stage("embed", [&] { return train_models(prepared, cfg); });
    stage("write", [&] {
      save_model(models.base, cfg.out / ("words_" + name + ".bin"), VectorFormat::binary);
      save_model(models.roles.model, cfg.out / ("roles_" + name + ".bin"), VectorFormat::binary);
      const nlohmann::json stats = {{"base", {{"probe_loss", models.base_stats.probe_loss}, {"pairs", models.base_stats.pairs}}},
                                    {"roles", {{"probe_loss", models.roles.stats.probe_loss}, {"pairs", models.roles.stats.pairs}}},
                                    {"vocabulary", models.roles.model.size()},
                                    {"dim", models.roles.model.dim()}};
      write_file(cfg.out / ("embed_stats_" + name + ".json"), stats.dump(2) + "\n");
    });
  }
  return 0;
}

EmbeddingModel role_model_for(const AnnotatedCorpus& prepared, const PipelineConfig& cfg, const std::string& model_path) {
  if (!model_path.empty()) return stage("load-model", [&] { return load_model(model_path); });
  return stage("embed", [&] { return train_models(prepared, cfg).roles.model; });
}

int cmd_represent(const PipelineConfig& cfg, const std::string& model_path) {
  if (!model_path.empty() && cfg.phrase_modes.size() > 1) throw InputError("--model needs a single phrase mode");
  const AnnotatedCorpus raw = load_input(cfg);
  nlohmann::json summary = nlohmann::json::array();
  for (PhraseMode mode : cfg.phrase_modes) {
    const AnnotatedCorpus prepared = stage("prepare", [&] { return prepare_corpus(raw, cfg, mode); });
    const EmbeddingModel model = role_model_for(prepared, cfg, model_path);
    for (RepresentationKind kind : cfg.kinds)
      for (std::size_t radius : cfg.radii)
        for (ContextLevel context : cfg.contexts) {
          RepresentationConfig rc;
          rc.kind = kind;
          rc.radius = radius;
          rc.context = context;
          rc.docvec = cfg.docvec;
          rc.unigram_power = cfg.train.unigram_power;
          rc.seed = derive_seed(cfg.seed, 4);
          const CacheKey key{corpus_hash(prepared), model_hash(model), fnv1a(rc.fingerprint())};
          const std::string label = representation_label(kind, radius) + "_" + std::string(context_name(context)) +
                                    "_" + std::string(phrase_mode_name(mode));
          const fs::path cache = cfg.out / ("representations_" + label + ".bin");
          auto reps = load_representation_cache(cache, key);
          const bool cached = reps.has_value();
          if (!reps) {
            reps = stage("represent", [&] { return build_representations(prepared, model, rc); });
            save_representation_cache(cache, key, *reps);
          }
          std::size_t mentions = 0;
          for (const auto& d : reps->mentions) mentions += d.size();
          summary.push_back({{"representation", label},
                             {"mentions", mentions},
                             {"unrankable", reps->unrankable},
                             {"in_vocabulary", reps->in_vocabulary},
                             {"out_of_vocabulary", reps->out_of_vocabulary},
                             {"cached", cached}});
        }
  }
  write_file(cfg.out / "representations.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_rank(const PipelineConfig& cfg, const std::string& model_path) {
  const AnnotatedCorpus raw = load_input(cfg);
  std::vector<MethodResult> results;
  if (model_path.empty()) {
    results = stage("rank", [&] { return run_ranking(raw, cfg); });
  } else {
    if (cfg.phrase_modes.size() > 1) throw InputError("--model needs a single phrase mode");
    const AnnotatedCorpus prepared = stage("prepare", [&] { return prepare_corpus(raw, cfg, cfg.phrase_modes.front()); });
    const EmbeddingModel model = role_model_for(prepared, cfg, model_path);
    for (RepresentationKind kind : cfg.kinds)
      for (std::size_t radius : cfg.radii)
        for (ContextLevel context : cfg.contexts)
          for (const QuerySpec& query : cfg.queries)
            results.push_back(stage("rank", [&] {
              return run_method(prepared, model, {kind, radius, context, query, cfg.phrase_modes.front()}, cfg);
            }));
  }
  stage("write", [&] { write_ranking_outputs(results, cfg); });
  std::cout << std::ifstream(cfg.out / "methods.csv").rdbuf();
  return 0;
}

int cmd_tag(const PipelineConfig& cfg) {
  const AnnotatedCorpus corpus = load_input(cfg);
  TrainTestSplit split;
  if (cfg.test_corpus.empty()) {
    split = stage("split", [&] { return split_corpus(corpus, cfg.test_fraction, cfg.seed); });
  } else {
    split.train = corpus;
    split.test = stage("load", [&] { return load_corpora(cfg.test_corpus, cfg.format); });
  }
  const TaggingResult result = stage("tag", [&] { return run_tagging(split.train, split.test, cfg); });
  stage("write", [&] { write_tagging_outputs(result, split.test, cfg); });
  write_precision_table(result.reports, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entity role detection: ranking and tagging pipelines"};
  app.require_subcommand(1);

  CommonOptions o;
  std::string to = "column", output, spec_path, model_path;
  std::optional<std::size_t> documents;
  std::optional<double> noise, cue_noise;
  bool cue_first_only = false;

  auto* ingest = app.add_subcommand("ingest", "Validate a corpus, write canonical jsonl and the role frequency table");
  auto* convert = app.add_subcommand("convert", "Convert between jsonl and column formats");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic annotated corpus");
  auto* stats = app.add_subcommand("stats", "Mention statistics (multi-mention, majority, positional)");
  auto* phrases = app.add_subcommand("phrases", "Detect phrases and write merged corpora");
  auto* embed = app.add_subcommand("embed", "Train word and role vectors");
  auto* represent = app.add_subcommand("represent", "Build entity representations");
  auto* rank = app.add_subcommand("rank", "Rank entities against role queries and evaluate mAP@K");
  auto* tag = app.add_subcommand("tag", "Train and evaluate HMM/CRF role taggers");
  for (auto* sub : {ingest, convert, synth, stats, phrases, embed, represent, rank, tag}) add_common(sub, o);
  for (auto* sub : {phrases, embed, represent, rank}) add_overrides(sub, o);

  convert->add_option("--to", to, "Target format")->check(CLI::IsMember({"jsonl", "column", "conll"}));
  convert->add_option("--output", output, "Target file (default: <out>/corpus.<ext>)");
  synth->add_option("--spec", spec_path, "Synthetic spec (JSON)")->check(CLI::ExistingFile);
  synth->add_option("--documents", documents, "Number of documents");
  synth->add_option("--noise", noise, "Majority and positional role noise rate");
  synth->add_option("--cue-noise", cue_noise, "Chance a mention's sentence carries another role's cue");
  synth->add_flag("--cue-first-only", cue_first_only, "Only first mentions carry cue phrases");
  for (auto* sub : {represent, rank}) sub->add_option("--model", model_path, "Role model from 'embed'")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const PipelineConfig cfg = resolve(o);
    if (*ingest) return cmd_ingest(cfg);
    if (*convert) return cmd_convert(cfg, to, output);
    if (*synth) return cmd_synth(cfg, spec_path, documents, noise, cue_noise, cue_first_only);
    if (*stats) return cmd_stats(cfg);
    if (*phrases) return cmd_phrases(cfg);
    if (*embed) return cmd_embed(cfg);
    if (*represent) return cmd_represent(cfg, model_path);
    if (*rank) return cmd_rank(cfg, model_path);
    if (*tag) return cmd_tag(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
