#include "stba/oracle.hpp"

#include <algorithm>
#include <string>

#include "stba/error.hpp"

namespace stba {

std::size_t argmax(const ScoreVector& scores) {
  return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

void QueryCounter::consume() {
  if (used_ >= limit_) {
    throw BudgetExhausted("query budget of " + std::to_string(limit_) + " exhausted");
  }
  ++used_;
}

void check_input_shape(const OracleInfo& info, const Image& img) {
  if (img.shape() != info.input_shape) {
    throw ShapeError("oracle expects " + to_string(info.input_shape) + ", got " + to_string(img.shape()));
  }
}

ScoreVector CountedOracle::predict(const Image& img) {
  check_input_shape(backend_.info(), img);
  counter_.consume();
  return backend_.predict(img);
}

}  // namespace stba
