#include "roledet/representations.hpp"

#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "roledet/errors.hpp"
#include "roledet/text.hpp"

namespace roledet {

ContextWindow extract_window(const Document& doc, std::size_t mention, std::size_t radius) {
  const Span& span = doc.mentions.at(mention).span;
  const Sentence& sent = doc.sentences.at(span.sentence);
  ContextWindow w;
  w.mention = mention;
  w.radius = radius;
  const std::size_t lo = span.start >= radius ? span.start - radius : 0;
  for (std::size_t t = lo; t < span.start; ++t)
    if (!sent[t].normalized.empty()) w.tokens.push_back(sent[t].normalized);
  const std::size_t hi = std::min(sent.size(), span.end + 1 + radius);
  for (std::size_t t = span.end + 1; t < hi; ++t)
    if (!sent[t].normalized.empty()) w.tokens.push_back(sent[t].normalized);
  return w;
}

ContextWindow extract_document_context(const Document& doc, std::size_t mention, std::size_t radius) {
  const EntityMention& target = doc.mentions.at(mention);
  ContextWindow w;
  w.mention = mention;
  w.radius = radius;
  for (std::size_t i = 0; i <= mention; ++i) {
    if (doc.mentions[i].entity_key != target.entity_key) continue;
    auto part = extract_window(doc, i, radius);
    w.tokens.insert(w.tokens.end(), part.tokens.begin(), part.tokens.end());
  }
  return w;
}

std::string_view kind_name(RepresentationKind kind) {
  switch (kind) {
    case RepresentationKind::cluster: return "cluster";
    case RepresentationKind::centroid: return "centroid";
    case RepresentationKind::docvec: return "docvec";
  }
  return "?";
}

RepresentationKind parse_kind(std::string_view name) {
  if (name == "cluster" || name == "E-W") return RepresentationKind::cluster;
  if (name == "centroid" || name == "E-V-C") return RepresentationKind::centroid;
  if (name == "docvec" || name == "E-V-D2V") return RepresentationKind::docvec;
  throw InputError("unknown representation '" + std::string(name) + "' (cluster, centroid, docvec)");
}

std::string_view context_name(ContextLevel level) {
  return level == ContextLevel::sentence ? "sentence" : "document";
}

ContextLevel parse_context(std::string_view name) {
  if (name == "sentence") return ContextLevel::sentence;
  if (name == "document") return ContextLevel::document;
  throw InputError("unknown context level '" + std::string(name) + "' (sentence, document)");
}

namespace {

/// In-vocabulary context rows, counting misses.
std::vector<std::size_t> lookup(const ContextWindow& window, const EmbeddingModel& model, RepresentationResult& r) {
  std::vector<std::size_t> rows;
  for (const auto& tok : window.tokens) {
    if (auto i = model.vocab.find(tok)) {
      rows.push_back(*i);
      ++r.in_vocabulary;
    } else {
      ++r.out_of_vocabulary;
    }
  }
  return rows;
}

Eigen::VectorXd row_vector(const EmbeddingModel& model, std::size_t i) {
  return model.input.row(static_cast<Eigen::Index>(i)).transpose().cast<double>();
}

}  // namespace

RepresentationResult represent_cluster(const ContextWindow& window, const EmbeddingModel& model) {
  RepresentationResult r;
  const auto rows = lookup(window, model, r);
  std::vector<Eigen::VectorXd> vecs;
  for (std::size_t i : rows) {
    Eigen::VectorXd v = row_vector(model, i);
    if (v.norm() > 0.0) vecs.push_back(std::move(v));
  }
  if (vecs.empty()) {
    r.status = rows.empty() ? RepresentationStatus::empty_window : RepresentationStatus::degenerate;
    return r;
  }
  r.status = RepresentationStatus::ok;
  r.value = EntityRepresentation{RepresentationKind::cluster, VectorSet::normalized(vecs)};
  return r;
}

RepresentationResult represent_centroid(const ContextWindow& window, const EmbeddingModel& model) {
  RepresentationResult r;
  const auto rows = lookup(window, model, r);
  if (rows.empty()) {
    r.status = RepresentationStatus::empty_window;
    return r;
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dim()));
  for (std::size_t i : rows) {
    Eigen::VectorXd v = row_vector(model, i);
    const double n = v.norm();
    if (n > 0.0) mean += v / n;
  }
  mean /= static_cast<double>(rows.size());
  if (!(mean.norm() > 1e-12)) {
    r.status = RepresentationStatus::degenerate;
    return r;
  }
  r.status = RepresentationStatus::ok;
  r.value = EntityRepresentation{RepresentationKind::centroid, VectorSet::normalized({mean})};
  return r;
}

RepresentationResult represent_docvec(const ContextWindow& window, const EmbeddingModel& model,
                                      const NegativeSampler& sampler, const DocvecConfig& cfg,
                                      std::uint64_t seed) {
  RepresentationResult r;
  const auto rows = lookup(window, model, r);
  if (rows.empty()) {
    r.status = RepresentationStatus::empty_window;
    return r;
  }
  const Eigen::VectorXd doc = infer_document_vector<double>(model.output, rows, sampler, cfg, seed);
  if (!(doc.norm() > 0.0)) {
    r.status = RepresentationStatus::degenerate;
    return r;
  }
  r.status = RepresentationStatus::ok;
  r.value = EntityRepresentation{RepresentationKind::docvec, VectorSet::normalized({doc})};
  return r;
}

std::string RepresentationConfig::fingerprint() const {
  std::ostringstream s;
  s << "kind=" << kind_name(kind) << ";radius=" << radius << ";context=" << context_name(context)
    << ";steps=" << docvec.steps << ";lr=" << docvec.learning_rate << ";neg=" << docvec.negatives
    << ";power=" << unigram_power << ";seed=" << seed;
  return s.str();
}

CorpusRepresentations build_representations(const AnnotatedCorpus& corpus, const EmbeddingModel& model,
                                            const RepresentationConfig& cfg) {
  if (cfg.radius < 1) throw InputError("window radius must be >= 1");
  CorpusRepresentations out;
  std::optional<NegativeSampler> sampler;
  if (cfg.kind == RepresentationKind::docvec) sampler.emplace(model.vocab, cfg.unigram_power);
  for (const auto& doc : corpus.documents) {
    std::vector<RepresentationResult> reps;
    reps.reserve(doc.mentions.size());
    for (std::size_t m = 0; m < doc.mentions.size(); ++m) {
      const ContextWindow w = cfg.context == ContextLevel::sentence ? extract_window(doc, m, cfg.radius)
                                                                    : extract_document_context(doc, m, cfg.radius);
      RepresentationResult r;
      switch (cfg.kind) {
        case RepresentationKind::cluster: r = represent_cluster(w, model); break;
        case RepresentationKind::centroid: r = represent_centroid(w, model); break;
        case RepresentationKind::docvec: {
          const std::uint64_t seed = derive_seed(cfg.seed, fnv1a(doc.id + "#" + std::to_string(m)));
          r = represent_docvec(w, model, *sampler, cfg.docvec, seed);
          break;
        }
      }
      out.in_vocabulary += r.in_vocabulary;
      out.out_of_vocabulary += r.out_of_vocabulary;
      if (r.status != RepresentationStatus::ok) ++out.unrankable;
      reps.push_back(std::move(r));
    }
    out.mentions.push_back(std::move(reps));
  }
  return out;
}

RoleModel learn_role_vectors(const AnnotatedCorpus& corpus, const EmbeddingModel& base,
                             const RoleTrainingConfig& cfg) {
  const TokenStream stream = substitute_roles(corpus);
  std::set<std::string> specials(base.vocab.tokens().begin(), base.vocab.tokens().end());
  for (Role r : kAllRoles) specials.insert(role_token(r));
  Vocabulary vocab = build_vocab(stream, cfg.min_count, specials);
  // Base tokens ride along as specials only to be retained; restore their status.
  Vocabulary marked;
  for (std::size_t i = 0; i < vocab.size(); ++i)
    marked.add(vocab.token(i), vocab.count(i), role_from_token(vocab.token(i)).has_value());

  RoleModel out;
  out.model = make_model(std::move(marked), base.dim(), derive_seed(cfg.train.seed, 7));
  warm_start(out.model, base);
  out.stats = train_skipgram(out.model, stream, cfg.train);
  return out;
}

RoleQuery build_role_query(const EmbeddingModel& model, Role role, QueryKind kind, std::size_t n) {
  const std::string token = role_token(role);
  auto idx = model.vocab.find(token);
  if (!idx) throw InputError("model has no vector for role token " + token);
  std::vector<Eigen::VectorXd> vecs{model.input.row(static_cast<Eigen::Index>(*idx)).transpose().cast<double>()};
  std::vector<std::string> expansion;
  if (kind == QueryKind::tv_sw) {
    auto similar = top_n_similar(model, token, n, [&](std::size_t i) {
      return role_from_token(model.vocab.token(i)).has_value() ||
             model.input.row(static_cast<Eigen::Index>(i)).squaredNorm() == 0.0f;
    });
    for (const auto& [tok, score] : similar) {
      expansion.push_back(tok);
      vecs.push_back(model.input.row(static_cast<Eigen::Index>(*model.vocab.find(tok))).transpose().cast<double>());
    }
  }
  if (!(vecs.front().norm() > 0.0)) throw InputError("role vector for " + token + " is zero");
  return RoleQuery{role, kind, std::move(expansion), VectorSet::normalized(vecs)};
}

std::string query_name(QueryKind kind, std::size_t n) {
  return kind == QueryKind::tv ? "TV" : "TV-SW" + std::to_string(n);
}

std::string representation_label(RepresentationKind kind, std::size_t radius) {
  const char* base = kind == RepresentationKind::cluster    ? "E-W"
                     : kind == RepresentationKind::centroid ? "E-V-C"
                                                            : "E-V-D2V";
  return std::string(base) + "-N" + std::to_string(radius);
}

std::uint64_t corpus_hash(const AnnotatedCorpus& corpus) {
  std::uint64_t h = fnv1a("corpus");
  for (const auto& doc : corpus.documents) {
    h = fnv1a(doc.id, h);
    for (const auto& s : doc.sentences) {
      h = fnv1a("\x1e", h);
      for (const auto& t : s) h = fnv1a(t.normalized, fnv1a(t.surface + "\x1f", h));
    }
    for (const auto& m : doc.mentions) {
      std::ostringstream k;
      k << m.entity_key << '|' << m.span.sentence << '|' << m.span.start << '|' << m.span.end << '|'
        << role_name(m.role);
      h = fnv1a(k.str(), h);
    }
  }
  return h;
}

std::uint64_t model_hash(const EmbeddingModel& model) {
  std::ostringstream bytes;
  write_binary(model, bytes);
  return fnv1a(bytes.str());
}

namespace {

constexpr char kCacheMagic[8] = {'R', 'D', 'R', 'E', 'P', 'C', '1', '\0'};

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

}  // namespace

void save_representation_cache(const std::filesystem::path& path, const CacheKey& key,
                               const CorpusRepresentations& reps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(kCacheMagic, sizeof(kCacheMagic));
  put(out, key.corpus);
  put(out, key.model);
  put(out, key.config);
  put(out, static_cast<std::uint64_t>(reps.unrankable));
  put(out, static_cast<std::uint64_t>(reps.in_vocabulary));
  put(out, static_cast<std::uint64_t>(reps.out_of_vocabulary));
  put(out, static_cast<std::uint64_t>(reps.mentions.size()));
  for (const auto& doc : reps.mentions) {
    put(out, static_cast<std::uint64_t>(doc.size()));
    for (const auto& r : doc) {
      put(out, static_cast<std::uint8_t>(r.status));
      put(out, static_cast<std::uint64_t>(r.in_vocabulary));
      put(out, static_cast<std::uint64_t>(r.out_of_vocabulary));
      if (!r.value) continue;
      const auto& m = r.value->vectors.matrix();
      put(out, static_cast<std::uint8_t>(r.value->kind));
      put(out, static_cast<std::uint64_t>(m.rows()));
      put(out, static_cast<std::uint64_t>(m.cols()));
      out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    }
  }
}

std::optional<CorpusRepresentations> load_representation_cache(const std::filesystem::path& path,
                                                               const CacheKey& key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[sizeof(kCacheMagic)];
  CacheKey stored;
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) return std::nullopt;
  if (!get(in, stored.corpus) || !get(in, stored.model) || !get(in, stored.config) || !(stored == key))
    return std::nullopt;
  CorpusRepresentations reps;
  std::uint64_t unrankable = 0, inv = 0, oov = 0, docs = 0;
  if (!get(in, unrankable) || !get(in, inv) || !get(in, oov) || !get(in, docs)) return std::nullopt;
  reps.unrankable = unrankable;
  reps.in_vocabulary = inv;
  reps.out_of_vocabulary = oov;
  for (std::uint64_t d = 0; d < docs; ++d) {
    std::uint64_t n = 0;
    if (!get(in, n)) return std::nullopt;
    std::vector<RepresentationResult> doc;
    for (std::uint64_t i = 0; i < n; ++i) {
      RepresentationResult r;
      std::uint8_t status = 0;
      std::uint64_t a = 0, b = 0;
      if (!get(in, status) || !get(in, a) || !get(in, b)) return std::nullopt;
      r.status = static_cast<RepresentationStatus>(status);
      r.in_vocabulary = a;
      r.out_of_vocabulary = b;
      if (r.status == RepresentationStatus::ok) {
        std::uint8_t kind = 0;
        std::uint64_t rows = 0, cols = 0;
        if (!get(in, kind) || !get(in, rows) || !get(in, cols)) return std::nullopt;
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        if (!in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double))))
          return std::nullopt;
        r.value = EntityRepresentation{static_cast<RepresentationKind>(kind), VectorSet(std::move(m))};
      }
      doc.push_back(std::move(r));
    }
    reps.mentions.push_back(std::move(doc));
  }
  return reps;
}

}  // namespace roledet
