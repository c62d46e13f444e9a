#pragma once

#include <stdexcept>
#include <string>

namespace sentseq {

// Shape/dimension mismatches between tensors or layers.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Violated operation precondition (non-scalar loss, bad index, length mismatch).
class ContractError : public std::runtime_error {
 public:
  explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical domain violation (log of non-positive, overflowing exp).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input files: corpus, embedding, checkpoint.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration: unknown keys, invalid hyperparameters, unusable presets.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training-time numerical failure (divergence, non-finite gradients).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sentseq
