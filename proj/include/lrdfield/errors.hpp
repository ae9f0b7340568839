#pragma once

#include <stdexcept>
#include <string>

namespace lrdfield {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent configuration (CLI maps this to exit code 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fields with incompatible lattices were combined.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The circulant embedding of a covariance is not positive semi-definite
/// within tolerance, even after enlarging the embedding.
class EmbeddingNotPD : public std::runtime_error {
 public:
  EmbeddingNotPD(const std::string& what, double relative_deficit)
      : std::runtime_error(what), relative_deficit_(relative_deficit) {}

  /// Most negative eigenvalue divided by the largest one (negative number).
  double relative_deficit() const noexcept { return relative_deficit_; }

 private:
  double relative_deficit_;
};

/// c1 integral diverges: the exponent sum reached the dimension.
class DivergentConstant : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Slowly varying ratios between minimal-exponent components have no limit.
class NoDominantComponent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lrdfield
