#include "roledet/vector_set.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace roledet {

VectorSet::VectorSet(Eigen::MatrixXd columns) : columns_(std::move(columns)) {
  if (columns_.cols() == 0) throw std::invalid_argument("vector set must not be empty");
  for (Eigen::Index j = 0; j < columns_.cols(); ++j) {
    const double n = columns_.col(j).norm();
    if (!(std::abs(n - 1.0) <= kNormTolerance))
      throw std::invalid_argument("vector " + std::to_string(j) + " has norm " + std::to_string(n));
  }
}

VectorSet VectorSet::normalized(const std::vector<Eigen::VectorXd>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("vector set must not be empty");
  Eigen::MatrixXd m(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    const double n = vectors[j].norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalize a zero vector");
    m.col(static_cast<Eigen::Index>(j)) = vectors[j] / n;
  }
  return VectorSet(std::move(m));
}

}  // namespace roledet
