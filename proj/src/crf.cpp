#include "roledet/crf.hpp"

#include <cctype>
#include <numeric>

#include "roledet/errors.hpp"
#include "roledet/rng.hpp"
#include "roledet/text.hpp"

namespace roledet {

namespace {

bool all_caps(const std::string& w) {
  bool letter = false;
  for (unsigned char c : w) {
    if (std::islower(c)) return false;
    if (std::isupper(c)) letter = true;
  }
  return letter;
}

bool initial_capital(const std::string& w) {
  if (w.empty() || !std::isupper(static_cast<unsigned char>(w[0]))) return false;
  for (std::size_t i = 1; i < w.size(); ++i)
    if (std::isupper(static_cast<unsigned char>(w[i]))) return false;
  return true;
}

void word_features(const std::string& prefix, const std::string& w, std::vector<std::string>& out) {
  const std::string lower = to_lower(w);
  out.push_back(prefix + "w=" + lower);
  out.push_back(prefix + "p3=" + lower.substr(0, 3));
  if (all_caps(w)) out.push_back(prefix + "allcaps");
  if (initial_capital(w)) out.push_back(prefix + "initcap");
}

}  // namespace

std::vector<std::vector<std::string>> extract_features(const std::vector<std::string>& tokens) {
  std::vector<std::vector<std::string>> out(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto& f = out[i];
    f.push_back("bias");
    word_features("", tokens[i], f);
    if (i == 0)
      f.push_back("-1:BOS");
    else
      word_features("-1:", tokens[i - 1], f);
    if (i + 1 == tokens.size())
      f.push_back("+1:EOS");
    else
      word_features("+1:", tokens[i + 1], f);
  }
  return out;
}

CrfInstance make_instance(const CrfModel& model, const std::vector<std::string>& tokens,
                          const std::vector<std::size_t>& tags) {
  CrfInstance inst;
  inst.tags = tags;
  for (const auto& feats : extract_features(tokens)) {
    std::vector<std::size_t> ids;
    for (const auto& f : feats) {
      auto it = model.attribute_index.find(f);
      if (it != model.attribute_index.end()) ids.push_back(it->second);
    }
    inst.attributes.push_back(std::move(ids));
  }
  return inst;
}

Eigen::MatrixXd emission_potentials(const CrfModel& model, const CrfInstance& inst) {
  Eigen::MatrixXd emit = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(inst.attributes.size()), model.trans.rows());
  for (std::size_t i = 0; i < inst.attributes.size(); ++i)
    for (std::size_t a : inst.attributes[i]) emit.row(static_cast<Eigen::Index>(i)) += model.state.row(static_cast<Eigen::Index>(a));
  return emit;
}

double crf_loss(const CrfModel& model, const std::vector<CrfInstance>& data, double regularizer_scale,
                CrfGradient* grad) {
  double loss = 0.5 * regularizer_scale * model.lambda * model.squared_norm();
  if (grad) {
    grad->state += regularizer_scale * model.lambda * model.state;
    grad->trans += regularizer_scale * model.lambda * model.trans;
    grad->start += regularizer_scale * model.lambda * model.start;
  }
  const Eigen::Index T = model.trans.rows();
  for (const auto& inst : data) {
    if (inst.tags.empty()) continue;
    const Eigen::MatrixXd emit = emission_potentials(model, inst);
    const auto fb = forward_backward<double>(model.start, model.trans, emit);
    loss += fb.log_z - path_score<double>(model.start, model.trans, emit, inst.tags);
    if (!grad) continue;

    const Eigen::Index n = emit.rows();
    // Node marginals minus observed indicators.
    const Eigen::MatrixXd node = (fb.alpha + fb.beta).array() - fb.log_z;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::RowVectorXd g = node.row(i).array().exp();
      g(static_cast<Eigen::Index>(inst.tags[static_cast<std::size_t>(i)])) -= 1.0;
      for (std::size_t a : inst.attributes[static_cast<std::size_t>(i)]) grad->state.row(static_cast<Eigen::Index>(a)) += g;
      if (i == 0) grad->start += g.transpose();
    }
    for (Eigen::Index i = 1; i < n; ++i) {
      for (Eigen::Index s = 0; s < T; ++s)
        for (Eigen::Index t = 0; t < T; ++t)
          grad->trans(s, t) += std::exp(fb.alpha(i - 1, s) + model.trans(s, t) + emit(i, t) + fb.beta(i, t) - fb.log_z);
      grad->trans(static_cast<Eigen::Index>(inst.tags[static_cast<std::size_t>(i - 1)]),
                  static_cast<Eigen::Index>(inst.tags[static_cast<std::size_t>(i)])) -= 1.0;
    }
  }
  return loss;
}

CrfTrainResult crf_train(const std::vector<TaggedSequence>& data, const TagSet& tags, double lambda,
                         const CrfOptimizerConfig& cfg) {
  if (data.empty()) throw InputError("CRF training set is empty");
  if (!(lambda >= 0.0)) throw InputError("CRF lambda must be >= 0");
  if (cfg.batch_size == 0) throw InputError("CRF batch size must be >= 1");
  CrfTrainResult result;
  CrfModel& model = result.model;
  model.tags = tags;
  model.lambda = lambda;
  for (const auto& seq : data)
    for (const auto& feats : extract_features(seq.tokens))
      for (const auto& f : feats)
        if (model.attribute_index.try_emplace(f, model.attributes.size()).second) model.attributes.push_back(f);

  const auto T = static_cast<Eigen::Index>(tags.size());
  model.state = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(model.attributes.size()), T);
  model.trans = Eigen::MatrixXd::Zero(T, T);
  model.start = Eigen::VectorXd::Zero(T);

  std::vector<CrfInstance> instances;
  for (const auto& seq : data) {
    if (seq.tokens.size() != seq.tags.size()) throw InputError("token/tag length mismatch in training data");
    if (!seq.tokens.empty()) instances.push_back(make_instance(model, seq.tokens, seq.tags));
  }

  auto check = [](double loss, std::size_t epoch) {
    if (!std::isfinite(loss))
      throw NumericalError("non-finite CRF loss after epoch " + std::to_string(epoch));
  };
  result.stats.loss.push_back(crf_loss(model, instances));
  check(result.stats.loss.back(), 0);

  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed);
  const double n = static_cast<double>(instances.size());
  double lr = cfg.learning_rate;
  CrfGradient grad;
  std::vector<CrfInstance> batch;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      batch.clear();
      for (std::size_t i = b; i < std::min(order.size(), b + cfg.batch_size); ++i) batch.push_back(instances[order[i]]);
      grad.state = Eigen::MatrixXd::Zero(model.state.rows(), T);
      grad.trans = Eigen::MatrixXd::Zero(T, T);
      grad.start = Eigen::VectorXd::Zero(T);
      const double bsize = static_cast<double>(batch.size());
      crf_loss(model, batch, bsize / n, &grad);
      const double step = lr / bsize;
      model.state -= step * grad.state;
      model.trans -= step * grad.trans;
      model.start -= step * grad.start;
    }
    lr *= cfg.decay;
    result.stats.loss.push_back(crf_loss(model, instances));
    check(result.stats.loss.back(), epoch + 1);
  }
  return result;
}

std::vector<std::size_t> crf_decode(const CrfModel& model, const std::vector<std::string>& tokens) {
  if (tokens.empty()) return {};
  const CrfInstance inst = make_instance(model, tokens);
  return viterbi<double>(model.start, model.trans, emission_potentials(model, inst));
}

}  // namespace roledet
