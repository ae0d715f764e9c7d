#pragma once

#include <cstddef>
#include <vector>

#include "stba/image.hpp"

namespace stba {

/// Per-class scores (probabilities or logits). Only differences and the
/// argmax are ever used.
using ScoreVector = std::vector<double>;

/// Index of the largest score; ties resolve to the lowest index.
std::size_t argmax(const ScoreVector& scores);

struct OracleInfo {
  Shape input_shape;
  std::size_t num_classes = 0;
};

/// Black-box scorer. Implementations see one image per call and return its
/// score vector; they never expose gradients.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual const OracleInfo& info() const = 0;
  virtual ScoreVector predict(const Image& img) const = 0;
  /// True when predict() may be called from several threads at once.
  virtual bool concurrent_safe() const { return false; }
};

class QueryCounter {
 public:
  explicit QueryCounter(std::size_t limit) : limit_(limit) {}

  std::size_t used() const { return used_; }
  std::size_t limit() const { return limit_; }
  std::size_t remaining() const { return limit_ - used_; }

  /// Consumes one query or throws BudgetExhausted without changing state.
  void consume();

 private:
  std::size_t used_ = 0;
  std::size_t limit_;
};

/// Owns the query budget of one attack. Every successful call to predict()
/// costs exactly one query; the backend is never reached once the limit has
/// been spent.
class CountedOracle {
 public:
  CountedOracle(const Oracle& backend, std::size_t limit) : backend_(backend), counter_(limit) {}

  const OracleInfo& info() const { return backend_.info(); }
  const QueryCounter& counter() const { return counter_; }

  /// Throws BudgetExhausted (counter unchanged), ShapeError before any
  /// query is spent, or whatever the backend throws (query still counted).
  ScoreVector predict(const Image& img);

 private:
  const Oracle& backend_;
  QueryCounter counter_;
};

void check_input_shape(const OracleInfo& info, const Image& img);

}  // namespace stba
