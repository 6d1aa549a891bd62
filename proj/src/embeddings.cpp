#include "roledet/embeddings.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <sstream>
#include <mutex>
#include <thread>

#include "roledet/errors.hpp"

namespace roledet {

NegativeSampler::NegativeSampler(const Vocabulary& vocab, double power) {
  cumulative_.resize(vocab.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    acc += vocab.count(i) > 0 ? std::pow(static_cast<double>(vocab.count(i)), power) : 0.0;
    cumulative_[i] = acc;
  }
  if (acc <= 0.0)
    for (std::size_t i = 0; i < cumulative_.size(); ++i) cumulative_[i] = static_cast<double>(i + 1);
}

std::size_t NegativeSampler::draw(Rng& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

double NegativeSampler::probability(std::size_t index) const {
  const double prev = index == 0 ? 0.0 : cumulative_[index - 1];
  return (cumulative_[index] - prev) / cumulative_.back();
}

EmbeddingModel make_model(Vocabulary vocab, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw InputError("embedding dimension must be positive");
  EmbeddingModel model;
  const auto v = static_cast<Eigen::Index>(vocab.size());
  const auto d = static_cast<Eigen::Index>(dim);
  model.vocab = std::move(vocab);
  model.input.resize(v, d);
  model.output = RowMatrixf::Zero(v, d);
  Rng rng(seed);
  const double bound = 0.5 / static_cast<double>(dim);
  for (Eigen::Index i = 0; i < v; ++i)
    for (Eigen::Index j = 0; j < d; ++j) model.input(i, j) = static_cast<float>(rng.uniform(-bound, bound));
  return model;
}

std::size_t warm_start(EmbeddingModel& model, const EmbeddingModel& base) {
  if (base.dim() != model.dim())
    throw InputError("warm start dimension mismatch: " + std::to_string(base.dim()) + " vs " +
                     std::to_string(model.dim()));
  std::size_t copied = 0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (auto j = base.vocab.find(model.vocab.token(i))) {
      model.input.row(static_cast<Eigen::Index>(i)) = base.input.row(static_cast<Eigen::Index>(*j));
      model.output.row(static_cast<Eigen::Index>(i)) = base.output.row(static_cast<Eigen::Index>(*j));
      ++copied;
    }
  }
  return copied;
}

void TrainConfig::validate() const {
  if (window_radius < 1) throw InputError("window_radius must be >= 1");
  if (negative_samples < 1) throw InputError("negative_samples must be >= 1");
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be > 0");
  if (!(subsample_threshold >= 0.0)) throw InputError("subsample_threshold must be >= 0");
  if (!std::isfinite(unigram_power)) throw InputError("unigram_power must be finite");
  if (threads < 1) throw InputError("threads must be >= 1");
}

namespace {

/// Plain row reads and writes for the deterministic single-threaded path.
struct DirectAccess {
  void load(const RowMatrixf& m, std::size_t row, float* dst) const {
    const float* p = m.data() + row * static_cast<std::size_t>(m.cols());
    std::copy(p, p + m.cols(), dst);
  }
  void subtract(RowMatrixf& m, std::size_t row, const float* delta, float scale) const {
    float* p = m.data() + row * static_cast<std::size_t>(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) p[j] -= scale * delta[j];
  }
};

/// Relaxed per-scalar atomics: racy last-write-wins updates without torn values.
struct AtomicAccess {
  void load(const RowMatrixf& m, std::size_t row, float* dst) const {
    auto* p = const_cast<float*>(m.data()) + row * static_cast<std::size_t>(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      dst[j] = std::atomic_ref<float>(p[j]).load(std::memory_order_relaxed);
  }
  void subtract(RowMatrixf& m, std::size_t row, const float* delta, float scale) const {
    float* p = m.data() + row * static_cast<std::size_t>(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::atomic_ref<float> cell(p[j]);
      cell.store(cell.load(std::memory_order_relaxed) - scale * delta[j], std::memory_order_relaxed);
    }
  }
};

struct PairWorkspace {
  explicit PairWorkspace(std::size_t dim, std::size_t negatives)
      : center(dim), grad_center(dim), targets(negatives + 1, dim), grad_targets(negatives + 1, dim),
        rows(negatives + 1) {}
  Vector<float> center, grad_center;
  RowMatrixf targets, grad_targets;
  std::vector<std::size_t> rows;
};

std::size_t draw_negative(const NegativeSampler& sampler, Rng& rng, std::size_t positive) {
  std::size_t neg = sampler.draw(rng);
  for (int tries = 0; neg == positive && tries < 8; ++tries) neg = sampler.draw(rng);
  return neg;
}

template <typename Access>
void train_pair(EmbeddingModel& model, const Access& access, PairWorkspace& ws, std::size_t center,
                std::size_t context, const NegativeSampler& sampler, Rng& rng, std::size_t negatives,
                float lr, std::size_t epoch) {
  ws.rows[0] = context;
  for (std::size_t k = 1; k <= negatives; ++k) ws.rows[k] = draw_negative(sampler, rng, context);
  access.load(model.input, center, ws.center.data());
  for (std::size_t k = 0; k < ws.rows.size(); ++k)
    access.load(model.output, ws.rows[k], ws.targets.row(static_cast<Eigen::Index>(k)).data());
  const float loss = sgns_gradient<float>(ws.center, ws.targets, ws.grad_center, ws.grad_targets);
  if (!std::isfinite(loss) || !ws.grad_center.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite skip-gram update in epoch " << epoch << " (center '"
        << model.vocab.token(center) << "', context '" << model.vocab.token(context)
        << "', learning rate " << lr << ", loss " << loss << ")";
    throw NumericalError(msg.str());
  }
  access.subtract(model.input, center, ws.grad_center.data(), lr);
  for (std::size_t k = 0; k < ws.rows.size(); ++k)
    access.subtract(model.output, ws.rows[k], ws.grad_targets.row(static_cast<Eigen::Index>(k)).data(), lr);
}

struct Probe {
  std::vector<std::size_t> centers;
  std::vector<std::vector<std::size_t>> rows;
};

Probe make_probe(const std::vector<std::vector<std::size_t>>& sentences, std::size_t radius,
                 std::size_t limit, const NegativeSampler& sampler, std::size_t negatives,
                 std::uint64_t seed) {
  std::uint64_t total = 0;
  for (const auto& s : sentences)
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::size_t lo = i >= radius ? i - radius : 0;
      const std::size_t hi = std::min(s.size() - 1, i + radius);
      total += hi - lo;
    }
  Probe probe;
  if (total == 0 || limit == 0) return probe;
  const std::uint64_t stride = std::max<std::uint64_t>(1, total / limit);
  Rng rng(seed);
  std::uint64_t n = 0;
  for (const auto& s : sentences)
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::size_t lo = i >= radius ? i - radius : 0;
      const std::size_t hi = std::min(s.size() - 1, i + radius);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        if (n++ % stride != 0 || probe.centers.size() >= limit) continue;
        std::vector<std::size_t> rows{s[j]};
        for (std::size_t k = 0; k < negatives; ++k) rows.push_back(draw_negative(sampler, rng, s[j]));
        probe.centers.push_back(s[i]);
        probe.rows.push_back(std::move(rows));
      }
    }
  return probe;
}

double probe_loss(const EmbeddingModel& model, const Probe& probe) {
  if (probe.centers.empty()) return 0.0;
  double sum = 0.0;
  RowMatrix<double> targets;
  for (std::size_t p = 0; p < probe.centers.size(); ++p) {
    const auto& rows = probe.rows[p];
    targets.resize(static_cast<Eigen::Index>(rows.size()), model.output.cols());
    for (std::size_t k = 0; k < rows.size(); ++k)
      targets.row(static_cast<Eigen::Index>(k)) =
          model.output.row(static_cast<Eigen::Index>(rows[k])).cast<double>();
    const Vector<double> center =
        model.input.row(static_cast<Eigen::Index>(probe.centers[p])).transpose().cast<double>();
    sum += sgns_loss<double>(center, targets);
  }
  return sum / static_cast<double>(probe.centers.size());
}

}  // namespace

TrainStats train_skipgram(EmbeddingModel& model, const TokenStream& stream, const TrainConfig& cfg) {
  cfg.validate();
  if (model.size() == 0) throw InputError("cannot train a model with an empty vocabulary");
  const std::size_t dim = model.dim();

  std::vector<std::vector<std::size_t>> sentences;
  sentences.reserve(stream.size());
  std::uint64_t total_words = 0;
  for (const auto& s : stream) {
    sentences.push_back(to_indices(model.vocab, s));
    total_words += sentences.back().size();
  }

  const NegativeSampler sampler(model.vocab, cfg.unigram_power);

  std::vector<double> keep(model.size(), 1.0);
  if (cfg.subsample_threshold > 0.0 && total_words > 0) {
    const double tn = cfg.subsample_threshold * static_cast<double>(total_words);
    for (std::size_t i = 0; i < model.size(); ++i) {
      const double f = static_cast<double>(model.vocab.count(i));
      if (f > 0.0 && !model.vocab.is_special(i)) keep[i] = std::min(1.0, (std::sqrt(f / tn) + 1.0) * tn / f);
    }
  }

  const Probe probe = make_probe(sentences, cfg.window_radius, cfg.probe_pairs, sampler,
                                 cfg.negative_samples, derive_seed(cfg.seed, 0));
  TrainStats stats;
  stats.probe_loss.push_back(probe_loss(model, probe));
  if (cfg.epochs == 0 || total_words == 0) return stats;

  const double total_steps = static_cast<double>(cfg.epochs * total_words) + 1.0;
  std::atomic<std::uint64_t> words_done{0};
  std::atomic<std::uint64_t> pairs{0};

  auto worker = [&](auto access, std::size_t tid, std::size_t nthreads, std::size_t epoch, Rng& rng) {
    PairWorkspace ws(dim, cfg.negative_samples);
    std::vector<std::size_t> kept;
    std::uint64_t local_pairs = 0;
    for (std::size_t si = tid; si < sentences.size(); si += nthreads) {
      const auto& s = sentences[si];
      const double progress = static_cast<double>(words_done.fetch_add(s.size())) / total_steps;
      const auto lr = static_cast<float>(cfg.learning_rate * std::max(1e-4, 1.0 - progress));
      kept.clear();
      for (std::size_t w : s)
        if (keep[w] >= 1.0 || rng.uniform() < keep[w]) kept.push_back(w);
      for (std::size_t i = 0; i < kept.size(); ++i) {
        const std::size_t lo = i >= cfg.window_radius ? i - cfg.window_radius : 0;
        const std::size_t hi = std::min(kept.size() - 1, i + cfg.window_radius);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          train_pair(model, access, ws, kept[i], kept[j], sampler, rng, cfg.negative_samples, lr, epoch);
          ++local_pairs;
        }
      }
    }
    pairs += local_pairs;
  };

  if (cfg.threads == 1) {
    Rng rng(derive_seed(cfg.seed, 1));
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      worker(DirectAccess{}, 0, 1, epoch, rng);
      stats.probe_loss.push_back(probe_loss(model, probe));
    }
  } else {
    std::vector<Rng> rngs;
    for (std::size_t t = 0; t < cfg.threads; ++t) rngs.emplace_back(derive_seed(cfg.seed, 1 + t));
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::exception_ptr failure;
      std::mutex failure_mutex;
      {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < cfg.threads; ++t)
          pool.emplace_back([&, t] {
            try {
              worker(AtomicAccess{}, t, cfg.threads, epoch, rngs[t]);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          });
      }
      if (failure) std::rethrow_exception(failure);
      stats.probe_loss.push_back(probe_loss(model, probe));
    }
  }
  stats.pairs = pairs.load();
  return stats;
}

double cosine(const EmbeddingModel& model, std::size_t a, std::size_t b) {
  const Vector<double> x = model.input.row(static_cast<Eigen::Index>(a)).transpose().cast<double>();
  const Vector<double> y = model.input.row(static_cast<Eigen::Index>(b)).transpose().cast<double>();
  const double nx = x.norm(), ny = y.norm();
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return x.dot(y) / (nx * ny);
}

std::vector<std::pair<std::string, double>> top_n_similar(const EmbeddingModel& model,
                                                          const std::string& query, std::size_t n,
                                                          const TokenFilter& skip) {
  auto q = model.vocab.find(query);
  if (!q) throw InputError("'" + query + "' is not in the vocabulary");
  std::vector<std::pair<std::size_t, double>> scored;
  if (n == 0) return {};
  const RowMatrix<double> vecs = model.input.cast<double>();
  const Vector<double> norms = vecs.rowwise().norm();
  const Vector<double> qv = vecs.row(static_cast<Eigen::Index>(*q)).transpose();
  const double qn = norms(static_cast<Eigen::Index>(*q));
  const Vector<double> dots = vecs * qv;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (i == *q || (skip && skip(i))) continue;
    const double ni = norms(static_cast<Eigen::Index>(i));
    const double c = (ni == 0.0 || qn == 0.0) ? 0.0 : dots(static_cast<Eigen::Index>(i)) / (ni * qn);
    scored.emplace_back(i, c);
  }
  const std::size_t k = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second : a.first < b.first;
                    });
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < k; ++i) out.emplace_back(model.vocab.token(scored[i].first), scored[i].second);
  return out;
}

}  // namespace roledet
