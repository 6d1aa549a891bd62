#pragma once

#include <cmath>
#include <vector>

#include "roledet/embeddings.hpp"
#include "roledet/errors.hpp"

namespace roledet {

struct DocvecConfig {
  std::size_t steps = 50;
  double learning_rate = 0.025;
  std::size_t negatives = 5;
};

/// Distributed-bag-of-words objective of a document vector: sum over its tokens
/// of the negative-sampling loss, with word context vectors held fixed.
/// rows[i] lists the output rows for token i: the token first, then its negatives.
/// When grad is given it receives d(loss)/d(doc).
template <typename Scalar, typename Derived>
Scalar dbow_loss(const Eigen::Ref<const Vector<Scalar>>& doc, const Eigen::MatrixBase<Derived>& outputs,
                 const std::vector<std::vector<std::size_t>>& rows, Vector<Scalar>* grad = nullptr) {
  Scalar loss = 0;
  if (grad) grad->setZero(doc.size());
  RowMatrix<Scalar> targets, grad_targets;
  Vector<Scalar> grad_doc(doc.size());
  for (const auto& r : rows) {
    targets.resize(static_cast<Eigen::Index>(r.size()), doc.size());
    grad_targets.resize(targets.rows(), targets.cols());
    for (std::size_t k = 0; k < r.size(); ++k)
      targets.row(static_cast<Eigen::Index>(k)) = outputs.row(static_cast<Eigen::Index>(r[k])).template cast<Scalar>();
    loss += sgns_gradient<Scalar>(doc, targets, grad_doc, grad_targets);
    if (grad) *grad += grad_doc;
  }
  return loss;
}

/// Infers a paragraph vector for the token indices by SGD on dbow_loss, starting
/// from a uniform [-0.5/D, 0.5/D] draw. Returns the raw (unnormalized) vector.
template <typename Scalar, typename Derived>
Vector<Scalar> infer_document_vector(const Eigen::MatrixBase<Derived>& outputs, const std::vector<std::size_t>& tokens,
                                     const NegativeSampler& sampler, const DocvecConfig& cfg, std::uint64_t seed) {
  const Eigen::Index dim = outputs.cols();
  Rng rng(seed);
  Vector<Scalar> doc(dim);
  const double bound = 0.5 / static_cast<double>(dim);
  for (Eigen::Index j = 0; j < dim; ++j) doc(j) = static_cast<Scalar>(rng.uniform(-bound, bound));

  RowMatrix<Scalar> targets(static_cast<Eigen::Index>(cfg.negatives + 1), dim);
  RowMatrix<Scalar> grad_targets(targets.rows(), dim);
  Vector<Scalar> grad(dim);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const double frac = static_cast<double>(step) / static_cast<double>(cfg.steps);
    const auto lr = static_cast<Scalar>(cfg.learning_rate * std::max(1e-4, 1.0 - frac));
    for (std::size_t t : tokens) {
      targets.row(0) = outputs.row(static_cast<Eigen::Index>(t)).template cast<Scalar>();
      for (std::size_t k = 1; k <= cfg.negatives; ++k) {
        std::size_t neg = sampler.draw(rng);
        for (int tries = 0; neg == t && tries < 8; ++tries) neg = sampler.draw(rng);
        targets.row(static_cast<Eigen::Index>(k)) = outputs.row(static_cast<Eigen::Index>(neg)).template cast<Scalar>();
      }
      const Scalar loss = sgns_gradient<Scalar>(doc, targets, grad, grad_targets);
      if (!std::isfinite(static_cast<double>(loss)) || !grad.allFinite())
        throw NumericalError("non-finite document vector update at step " + std::to_string(step));
      doc -= lr * grad;
    }
  }
  return doc;
}

}  // namespace roledet
