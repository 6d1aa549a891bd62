#include "roledet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "roledet/errors.hpp"
#include "roledet/hmm.hpp"
#include "roledet/rng.hpp"
#include "roledet/tagging.hpp"
#include "roledet/text.hpp"

namespace roledet {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view phrase_mode_name(PhraseMode mode) {
  switch (mode) {
    case PhraseMode::none: return "none";
    case PhraseMode::collocation: return "collocation";
    case PhraseMode::relation: return "relation";
  }
  return "none";
}

PhraseMode parse_phrase_mode(std::string_view name) {
  if (name == "none" || name == "words") return PhraseMode::none;
  if (name == "collocation") return PhraseMode::collocation;
  if (name == "relation") return PhraseMode::relation;
  throw InputError("unknown phrase mode '" + std::string(name) + "' (none, collocation, relation)");
}

QuerySpec parse_query(std::string_view name) {
  if (name == "TV") return {QueryKind::tv, 0};
  constexpr std::string_view prefix = "TV-SW";
  if (name.starts_with(prefix) && name.size() > prefix.size()) {
    const std::string digits(name.substr(prefix.size()));
    if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      const std::size_t n = std::stoul(digits);
      if (n >= 1) return {QueryKind::tv_sw, n};
    }
  }
  throw InputError("unknown query '" + std::string(name) + "' (TV or TV-SW<n>, n >= 1)");
}

// --- configuration ---------------------------------------------------------

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw InputError("unknown config key '" + where + "." + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& into) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config key '") + key + "': " + e.what());
  }
}

void read_path(const json& j, const char* key, std::optional<fs::path>& into) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  std::string s;
  read(j, key, s);
  into = s;
}

void read_paths(const json& j, const char* key, std::vector<fs::path>& into) {
  if (!j.contains(key)) return;
  std::vector<std::string> v;
  read(j, key, v);
  into.assign(v.begin(), v.end());
}

template <typename T, typename Parse>
void read_list(const json& j, const char* key, std::vector<T>& into, Parse parse) {
  if (!j.contains(key)) return;
  std::vector<std::string> names;
  read(j, key, names);
  into.clear();
  for (const auto& n : names) into.push_back(parse(n));
}

json path_or_null(const std::optional<fs::path>& p) { return p ? json(p->string()) : json(nullptr); }

std::vector<std::string> strings(const std::vector<fs::path>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(p.string());
  return out;
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) throw InputError(what + " '" + p.string() + "' does not exist");
}

}  // namespace

void PipelineConfig::validate() const {
  for (const auto& p : corpus) require_file(p, "corpus file");
  for (const auto& p : test_corpus) require_file(p, "test corpus file");
  if (stopwords) require_file(*stopwords, "stopword file");
  if (relations) require_file(*relations, "relation file");
  if (pretrained) require_file(*pretrained, "pretrained vector file");
  for (const auto& [name, p] : external_predictions) require_file(p, "prediction file for " + name);
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InputError("test_fraction must be in (0, 1)");
  if (dim < 1) throw InputError("embedding dim must be >= 1");
  if (kmax < 1) throw InputError("kmax must be >= 1");
  if (role_epochs < 1) throw InputError("role_epochs must be >= 1");
  if (phrase_modes.empty() || kinds.empty() || radii.empty() || contexts.empty() || queries.empty())
    throw InputError("every representation variant list needs at least one entry");
  for (std::size_t r : radii)
    if (r < 1) throw InputError("window radius must be >= 1");
  for (PhraseMode m : phrase_modes)
    if (m == PhraseMode::relation && !relations) throw InputError("phrase mode 'relation' needs phrases.relations");
  if (hmm_alpha_t < 0.0 || hmm_alpha_e < 0.0) throw InputError("HMM smoothing must be >= 0");
  if (crf_lambda < 0.0) throw InputError("CRF lambda must be >= 0");
  for (const auto& t : taggers)
    if (t != "hmm" && t != "crf") throw InputError("unknown tagger '" + t + "' (hmm, crf)");
  train.validate();
  phrases.validate();
}

PreprocessConfig PipelineConfig::preprocess_config() const {
  PreprocessConfig p;
  p.stopwords = stopwords ? load_stopwords(*stopwords) : default_stopwords();
  p.stemmer = stemmer;
  p.lowercase = lowercase;
  return p;
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig cfg;
  check_keys(j, "config",
             {"corpus", "preprocess", "phrases", "embedding", "representation", "tagging", "out", "seed",
              "deterministic"});
  if (j.contains("corpus")) {
    const json& c = j.at("corpus");
    check_keys(c, "corpus", {"paths", "format", "test_paths", "test_fraction"});
    read_paths(c, "paths", cfg.corpus);
    std::string format = "jsonl";
    read(c, "format", format);
    cfg.format = parse_format(format);
    read_paths(c, "test_paths", cfg.test_corpus);
    read(c, "test_fraction", cfg.test_fraction);
  }
  if (j.contains("preprocess")) {
    const json& p = j.at("preprocess");
    check_keys(p, "preprocess", {"stopwords", "stemmer", "lowercase"});
    read_path(p, "stopwords", cfg.stopwords);
    std::string stemmer = "suffix";
    read(p, "stemmer", stemmer);
    if (stemmer == "suffix")
      cfg.stemmer = Stemmer::suffix;
    else if (stemmer == "none")
      cfg.stemmer = Stemmer::none;
    else
      throw InputError("unknown stemmer '" + stemmer + "' (suffix, none)");
    read(p, "lowercase", cfg.lowercase);
  }
  if (j.contains("phrases")) {
    const json& p = j.at("phrases");
    check_keys(p, "phrases", {"modes", "delta", "threshold", "passes", "drop_stopword_bigrams", "relations"});
    read_list(p, "modes", cfg.phrase_modes, parse_phrase_mode);
    read(p, "delta", cfg.phrases.delta);
    read(p, "threshold", cfg.phrases.threshold);
    read(p, "passes", cfg.phrases.passes);
    read(p, "drop_stopword_bigrams", cfg.phrases.drop_stopword_bigrams);
    read_path(p, "relations", cfg.relations);
  }
  if (j.contains("embedding")) {
    const json& e = j.at("embedding");
    check_keys(e, "embedding",
               {"dim", "min_count", "window", "negatives", "epochs", "learning_rate", "subsample", "unigram_power",
                "threads", "probe_pairs", "pretrained", "role_min_count", "role_epochs"});
    read(e, "dim", cfg.dim);
    read(e, "min_count", cfg.min_count);
    read(e, "window", cfg.train.window_radius);
    read(e, "negatives", cfg.train.negative_samples);
    read(e, "epochs", cfg.train.epochs);
    read(e, "learning_rate", cfg.train.learning_rate);
    read(e, "subsample", cfg.train.subsample_threshold);
    read(e, "unigram_power", cfg.train.unigram_power);
    read(e, "threads", cfg.train.threads);
    read(e, "probe_pairs", cfg.train.probe_pairs);
    read_path(e, "pretrained", cfg.pretrained);
    read(e, "role_min_count", cfg.role_min_count);
    read(e, "role_epochs", cfg.role_epochs);
  }
  if (j.contains("representation")) {
    const json& r = j.at("representation");
    check_keys(r, "representation", {"kinds", "radii", "contexts", "queries", "docvec", "kmax", "relevance"});
    read_list(r, "kinds", cfg.kinds, parse_kind);
    read(r, "radii", cfg.radii);
    read_list(r, "contexts", cfg.contexts, parse_context);
    read_list(r, "queries", cfg.queries, parse_query);
    if (r.contains("docvec")) {
      const json& d = r.at("docvec");
      check_keys(d, "representation.docvec", {"steps", "learning_rate", "negatives"});
      read(d, "steps", cfg.docvec.steps);
      read(d, "learning_rate", cfg.docvec.learning_rate);
      read(d, "negatives", cfg.docvec.negatives);
    }
    read(r, "kmax", cfg.kmax);
    if (r.contains("relevance")) {
      std::string rel;
      read(r, "relevance", rel);
      cfg.relevance = parse_relevance(rel);
    }
  }
  if (j.contains("tagging")) {
    const json& t = j.at("tagging");
    check_keys(t, "tagging",
               {"taggers", "hmm_alpha_t", "hmm_alpha_e", "crf_lambda", "crf_epochs", "crf_batch_size",
                "crf_learning_rate", "crf_decay", "external"});
    read(t, "taggers", cfg.taggers);
    read(t, "hmm_alpha_t", cfg.hmm_alpha_t);
    read(t, "hmm_alpha_e", cfg.hmm_alpha_e);
    read(t, "crf_lambda", cfg.crf_lambda);
    read(t, "crf_epochs", cfg.crf.epochs);
    read(t, "crf_batch_size", cfg.crf.batch_size);
    read(t, "crf_learning_rate", cfg.crf.learning_rate);
    read(t, "crf_decay", cfg.crf.decay);
    if (t.contains("external")) {
      std::map<std::string, std::string> ext;
      read(t, "external", ext);
      for (const auto& [name, p] : ext) cfg.external_predictions[name] = p;
    }
  }
  std::string out = cfg.out.string();
  read(j, "out", out);
  cfg.out = out;
  read(j, "seed", cfg.seed);
  read(j, "deterministic", cfg.deterministic);
  return cfg;
}

json to_json(const PipelineConfig& cfg) {
  std::vector<std::string> modes, kinds, contexts, queries;
  for (PhraseMode m : cfg.phrase_modes) modes.emplace_back(phrase_mode_name(m));
  for (RepresentationKind k : cfg.kinds) kinds.emplace_back(kind_name(k));
  for (ContextLevel c : cfg.contexts) contexts.emplace_back(context_name(c));
  for (const auto& q : cfg.queries) queries.push_back(q.name());
  json external = json::object();
  for (const auto& [name, p] : cfg.external_predictions) external[name] = p.string();
  return {
      {"corpus",
       {{"paths", strings(cfg.corpus)},
        {"format", cfg.format == CorpusFormat::jsonl ? "jsonl" : "column"},
        {"test_paths", strings(cfg.test_corpus)},
        {"test_fraction", cfg.test_fraction}}},
      {"preprocess",
       {{"stopwords", path_or_null(cfg.stopwords)},
        {"stemmer", cfg.stemmer == Stemmer::suffix ? "suffix" : "none"},
        {"lowercase", cfg.lowercase}}},
      {"phrases",
       {{"modes", modes},
        {"delta", cfg.phrases.delta},
        {"threshold", cfg.phrases.threshold},
        {"passes", cfg.phrases.passes},
        {"drop_stopword_bigrams", cfg.phrases.drop_stopword_bigrams},
        {"relations", path_or_null(cfg.relations)}}},
      {"embedding",
       {{"dim", cfg.dim},
        {"min_count", cfg.min_count},
        {"window", cfg.train.window_radius},
        {"negatives", cfg.train.negative_samples},
        {"epochs", cfg.train.epochs},
        {"learning_rate", cfg.train.learning_rate},
        {"subsample", cfg.train.subsample_threshold},
        {"unigram_power", cfg.train.unigram_power},
        {"threads", cfg.train.threads},
        {"probe_pairs", cfg.train.probe_pairs},
        {"pretrained", path_or_null(cfg.pretrained)},
        {"role_min_count", cfg.role_min_count},
        {"role_epochs", cfg.role_epochs}}},
      {"representation",
       {{"kinds", kinds},
        {"radii", cfg.radii},
        {"contexts", contexts},
        {"queries", queries},
        {"docvec",
         {{"steps", cfg.docvec.steps},
          {"learning_rate", cfg.docvec.learning_rate},
          {"negatives", cfg.docvec.negatives}}},
        {"kmax", cfg.kmax},
        {"relevance", relevance_name(cfg.relevance)}}},
      {"tagging",
       {{"taggers", cfg.taggers},
        {"hmm_alpha_t", cfg.hmm_alpha_t},
        {"hmm_alpha_e", cfg.hmm_alpha_e},
        {"crf_lambda", cfg.crf_lambda},
        {"crf_epochs", cfg.crf.epochs},
        {"crf_batch_size", cfg.crf.batch_size},
        {"crf_learning_rate", cfg.crf.learning_rate},
        {"crf_decay", cfg.crf.decay},
        {"external", external}}},
      {"out", cfg.out.string()},
      {"seed", cfg.seed},
      {"deterministic", cfg.deterministic}};
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_resolved_config(const PipelineConfig& cfg) {
  write_file(cfg.out / "resolved_config.json", to_json(cfg).dump(2) + "\n");
}

// --- corpus preparation ----------------------------------------------------

AnnotatedCorpus load_corpora(const std::vector<fs::path>& paths, CorpusFormat format) {
  if (paths.empty()) throw InputError("no corpus file given");
  AnnotatedCorpus all;
  std::set<std::string> ids;
  for (const auto& p : paths) {
    AnnotatedCorpus c = load_corpus(p, format);
    for (auto& d : c.documents) {
      if (!ids.insert(d.id).second) throw InputError("duplicate document id '" + d.id + "' in " + p.string());
      all.documents.push_back(std::move(d));
    }
  }
  return all;
}

PhraseTable build_phrase_table(const AnnotatedCorpus& preprocessed, const PipelineConfig& cfg, PhraseMode mode) {
  switch (mode) {
    case PhraseMode::none: return {};
    case PhraseMode::collocation: {
      PhraseConfig pc = cfg.phrases;
      pc.stopwords = cfg.preprocess_config().stopwords;
      return collocation_scores(phrase_stream(preprocessed), pc);
    }
    case PhraseMode::relation: return load_relation_phrases(*cfg.relations, cfg.preprocess_config()).table;
  }
  return {};
}

AnnotatedCorpus prepare_corpus(const AnnotatedCorpus& raw, const PipelineConfig& cfg, PhraseMode mode,
                               PhraseTable* table) {
  AnnotatedCorpus corpus = preprocess(raw, cfg.preprocess_config());
  if (mode == PhraseMode::none) return corpus;
  PhraseTable t = build_phrase_table(corpus, cfg, mode);
  corpus = merge_phrases(corpus, t, cfg.phrases.passes);
  if (table) *table = std::move(t);
  return corpus;
}

TrainedModels train_models(const AnnotatedCorpus& prepared, const PipelineConfig& cfg) {
  TrainedModels out;
  const TokenStream stream = normalized_stream(prepared);
  out.base = make_model(build_vocab(stream, cfg.min_count), cfg.dim, derive_seed(cfg.seed, 1));
  if (cfg.pretrained) init_pretrained(out.base, *cfg.pretrained);
  TrainConfig train = cfg.train;
  train.seed = derive_seed(cfg.seed, 2);
  if (cfg.deterministic) train.threads = 1;
  out.base_stats = train_skipgram(out.base, stream, train);

  RoleTrainingConfig role;
  role.train = train;
  role.train.seed = derive_seed(cfg.seed, 3);
  role.train.epochs = cfg.role_epochs;
  role.min_count = cfg.role_min_count;
  out.roles = learn_role_vectors(prepared, out.base, role);
  return out;
}

// --- ranking -----------------------------------------------------------------

std::string MethodSpec::label() const {
  return representation_label(kind, radius) + "/" + query.name() + "/" + std::string(context_name(context)) + "/" +
         std::string(phrase_mode_name(phrases));
}

std::vector<RankedList> rank_corpus(const AnnotatedCorpus& prepared, const CorpusRepresentations& reps,
                                    const std::vector<RoleQuery>& queries, Relevance relevance) {
  std::vector<RankedList> lists;
  for (std::size_t d = 0; d < prepared.documents.size(); ++d) {
    const Document& doc = prepared.documents[d];
    std::vector<MentionCandidate> candidates;
    for (std::size_t m = 0; m < doc.mentions.size(); ++m) {
      MentionCandidate c;
      c.entity_key = doc.mentions[m].entity_key;
      c.mention_index = m;
      c.gold_role = doc.mentions[m].role;
      const auto& r = reps.mentions[d][m];
      if (r.status == RepresentationStatus::ok) c.vectors = r.value->vectors;
      candidates.push_back(std::move(c));
    }
    if (candidates.empty()) continue;
    for (const auto& q : queries) lists.push_back(rank_entities(candidates, q.vectors, doc.id, q.role, relevance));
  }
  return lists;
}

double random_map_at_1(const std::vector<RankedList>& lists) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& l : lists) {
    const std::size_t r = l.relevant_count();
    if (r == 0) continue;
    sum += static_cast<double>(r) / static_cast<double>(l.items.size());
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

MethodResult run_method(const AnnotatedCorpus& prepared, const EmbeddingModel& model, const MethodSpec& spec,
                        const PipelineConfig& cfg) {
  RepresentationConfig rc;
  rc.kind = spec.kind;
  rc.radius = spec.radius;
  rc.context = spec.context;
  rc.docvec = cfg.docvec;
  rc.unigram_power = cfg.train.unigram_power;
  rc.seed = derive_seed(cfg.seed, 4);
  const CorpusRepresentations reps = build_representations(prepared, model, rc);

  std::vector<RoleQuery> queries;
  for (Role r : kStudyRoles) queries.push_back(build_role_query(model, r, spec.query.kind, spec.query.n));
  auto lists = rank_corpus(prepared, reps, queries, cfg.relevance);

  MethodResult out;
  out.spec = spec;
  out.report = evaluate_rankings(lists, cfg.kmax, spec.label());
  out.report.unrankable_mentions = reps.unrankable;
  for (const auto& d : reps.mentions) out.report.mentions += d.size();
  out.random_map_at_1 = random_map_at_1(lists);
  out.lists = std::move(lists);
  return out;
}

std::vector<MethodResult> run_ranking(const AnnotatedCorpus& raw, const PipelineConfig& cfg) {
  std::vector<MethodResult> results;
  for (PhraseMode mode : cfg.phrase_modes) {
    const AnnotatedCorpus prepared = prepare_corpus(raw, cfg, mode);
    const TrainedModels models = train_models(prepared, cfg);
    for (RepresentationKind kind : cfg.kinds)
      for (std::size_t radius : cfg.radii)
        for (ContextLevel context : cfg.contexts)
          for (const QuerySpec& query : cfg.queries)
            results.push_back(run_method(prepared, models.roles.model, {kind, radius, context, query, mode}, cfg));
  }
  return results;
}

namespace {

std::string file_safe(std::string s) {
  for (char& c : s)
    if (c == '/') c = '_';
  return s;
}

void curve_cells(std::ostream& out, const RankingReport& r) {
  for (double v : r.map) out << ',' << format_metric(v);
  out << '\n';
}

void map_header(std::ostream& out, std::size_t kmax) {
  for (std::size_t k = 1; k <= kmax; ++k) out << ",mAP@" << k;
  out << '\n';
}

}  // namespace

void write_ranking_outputs(const std::vector<MethodResult>& results, const PipelineConfig& cfg) {
  std::ostringstream methods;
  methods << "Method,Query,Context,Phrases";
  map_header(methods, cfg.kmax);
  json reports = json::array();
  for (const auto& r : results) {
    const auto& s = r.spec;
    methods << representation_label(s.kind, s.radius) << ',' << s.query.name() << ',' << context_name(s.context)
            << ',' << phrase_mode_name(s.phrases);
    curve_cells(methods, r.report);

    const std::string stem = file_safe(s.label());
    std::ostringstream curve, roles;
    write_curve_csv(r.report, curve);
    write_role_csv(r.report, roles);
    write_file(cfg.out / ("curve_" + stem + ".csv"), curve.str());
    write_file(cfg.out / ("roles_" + stem + ".csv"), roles.str());
    std::ostringstream ranked;
    for (const auto& l : r.lists) {
      json items = json::array();
      for (const auto& i : l.items)
        items.push_back({{"entity", i.entity_key},
                         {"mention", i.best_mention},
                         {"score", i.rankable ? json(i.score) : json(nullptr)},
                         {"relevant", i.relevant}});
      ranked << json{{"document", l.document_id}, {"role", role_name(l.role)}, {"items", items}}.dump() << '\n';
    }
    write_file(cfg.out / ("rankings_" + stem + ".jsonl"), ranked.str());
    json j = to_json(r.report);
    j["random_map_at_1"] = r.random_map_at_1;
    reports.push_back(std::move(j));
  }
  write_file(cfg.out / "methods.csv", methods.str());
  write_file(cfg.out / "ranking_report.json", reports.dump(2) + "\n");

  // Same method under every phrase mode (Fig. 2) and every context level (Figs. 6-7).
  if (cfg.phrase_modes.size() > 1) {
    std::ostringstream csv;
    csv << "Phrases,Method";
    map_header(csv, cfg.kmax);
    for (const auto& r : results) {
      if (r.spec.context != cfg.contexts.front()) continue;
      csv << phrase_mode_name(r.spec.phrases) << ',' << representation_label(r.spec.kind, r.spec.radius) << '/'
          << r.spec.query.name();
      curve_cells(csv, r.report);
    }
    write_file(cfg.out / "word_vs_phrase.csv", csv.str());
  }
  if (cfg.contexts.size() > 1) {
    std::ostringstream csv;
    csv << "Context,Phrases,Method";
    map_header(csv, cfg.kmax);
    for (const auto& r : results) {
      csv << context_name(r.spec.context) << ',' << phrase_mode_name(r.spec.phrases) << ','
          << representation_label(r.spec.kind, r.spec.radius) << '/' << r.spec.query.name();
      curve_cells(csv, r.report);
    }
    write_file(cfg.out / "sentence_vs_document.csv", csv.str());
  }
}

// --- tagging -----------------------------------------------------------------

TrainTestSplit split_corpus(const AnnotatedCorpus& corpus, double fraction, std::uint64_t seed) {
  const std::size_t n = corpus.documents.size();
  if (n < 2) throw InputError("need at least two documents to hold out a test split");
  auto held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  held = std::clamp<std::size_t>(held, 1, n - 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 5));
  rng.shuffle(order.begin(), order.end());
  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < held; ++i) is_test[order[i]] = true;
  TrainTestSplit out;
  for (std::size_t i = 0; i < n; ++i) (is_test[i] ? out.test : out.train).documents.push_back(corpus.documents[i]);
  return out;
}

namespace {

std::vector<std::vector<std::string>> names_of(const std::vector<std::vector<std::size_t>>& seqs, const TagSet& tags) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : seqs) {
    std::vector<std::string> names;
    for (std::size_t t : s) names.push_back(tags.name(t));
    out.push_back(std::move(names));
  }
  return out;
}

}  // namespace

TaggingResult run_tagging(const AnnotatedCorpus& train, const AnnotatedCorpus& test, const PipelineConfig& cfg) {
  const TagSet tags = TagSet::bio();
  const auto train_seqs = tagged_sequences(train, tags);
  const auto test_seqs = tagged_sequences(test, tags);
  std::vector<std::vector<std::size_t>> gold_idx;
  for (const auto& s : test_seqs) gold_idx.push_back(s.tags);
  const auto gold = names_of(gold_idx, tags);

  TaggingResult result;
  for (const auto& name : cfg.taggers) {
    std::vector<std::vector<std::size_t>> predicted;
    if (name == "hmm") {
      const HmmModel hmm = hmm_train(train_seqs, tags, cfg.hmm_alpha_t, cfg.hmm_alpha_e);
      for (const auto& s : test_seqs) predicted.push_back(viterbi_decode(hmm, s.tokens));
    } else {
      CrfOptimizerConfig opt = cfg.crf;
      opt.seed = derive_seed(cfg.seed, 6);
      const CrfTrainResult crf = crf_train(train_seqs, tags, cfg.crf_lambda, opt);
      result.crf_loss = crf.stats.loss;
      for (const auto& s : test_seqs) predicted.push_back(crf_decode(crf.model, s.tokens));
    }
    std::string system = name;
    std::transform(system.begin(), system.end(), system.begin(), [](unsigned char c) { return std::toupper(c); });
    result.reports.push_back(role_precision_report(gold, names_of(predicted, tags), system));
    result.predictions[system] = std::move(predicted);
  }
  for (const auto& [name, path] : cfg.external_predictions) {
    const AnnotatedCorpus ext = load_corpus(path, CorpusFormat::column);
    std::vector<std::vector<std::string>> predicted;
    for (const auto& doc : ext.documents)
      for (std::size_t s = 0; s < doc.sentences.size(); ++s)
        if (!doc.sentences[s].empty()) predicted.push_back(bio_tags(doc, s));
    result.reports.push_back(role_precision_report(gold, predicted, name));
  }
  return result;
}

void write_tagging_outputs(const TaggingResult& result, const AnnotatedCorpus& test, const PipelineConfig& cfg) {
  json reports = json::array();
  for (const auto& r : result.reports) reports.push_back(to_json(r));
  write_file(cfg.out / "tag_report.json", reports.dump(2) + "\n");
  std::ostringstream table;
  write_precision_table(result.reports, table);
  write_file(cfg.out / "precision_table.csv", table.str());
  const TagSet tags = TagSet::bio();
  for (const auto& [system, predicted] : result.predictions) {
    std::ostringstream col;
    write_column(with_predicted_tags(test, tags, predicted), col);
    write_file(cfg.out / ("predictions_" + to_lower(system) + ".conll"), col.str());
  }
  if (!result.crf_loss.empty()) {
    std::ostringstream csv;
    csv << "epoch,loss\n";
    for (std::size_t e = 0; e < result.crf_loss.size(); ++e) csv << e << ',' << format_metric(result.crf_loss[e]) << '\n';
    write_file(cfg.out / "crf_loss.csv", csv.str());
  }
}

}  // namespace roledet
