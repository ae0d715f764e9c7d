#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "stba/oracle.hpp"

namespace stba {

/// Scores images through a remote server speaking the JSON scoring
/// protocol (`GET /v1/meta`, `POST /v1/scores`). The metadata is fetched
/// once at construction; responses whose length differs from the declared
/// class count are rejected. Any failure surfaces as TransportError.
class HttpOracle final : public Oracle {
 public:
  explicit HttpOracle(const std::string& endpoint,
                      std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~HttpOracle() override;

  const OracleInfo& info() const override { return info_; }
  ScoreVector predict(const Image& img) const override;
  bool concurrent_safe() const override { return true; }

 private:
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
  OracleInfo info_;
};

}  // namespace stba
