#include "stba/http_oracle.hpp"

#include "httplib.h"
#include "stba/error.hpp"
#include "stba/wire.hpp"

namespace stba {
namespace {

httplib::Client make_client(const std::string& endpoint, std::chrono::milliseconds timeout) {
  httplib::Client client(endpoint);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  return client;
}

std::string checked_body(const httplib::Result& res, const std::string& what) {
  if (!res) throw TransportError(what + ": " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw TransportError(what + ": HTTP " + std::to_string(res->status) + " " + res->body);
  }
  return res->body;
}

}  // namespace

HttpOracle::HttpOracle(const std::string& endpoint, std::chrono::milliseconds timeout)
    : endpoint_(endpoint), timeout_(timeout) {
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  auto client = make_client(endpoint_, timeout_);
  if (!client.is_valid()) throw TransportError("invalid endpoint '" + endpoint + "'");
  const std::string body = checked_body(client.Get("/v1/meta"), "GET /v1/meta");
  try {
    info_ = wire::decode_meta(body);
  } catch (const FormatError& e) {
    throw TransportError(std::string("GET /v1/meta: ") + e.what());
  }
}

HttpOracle::~HttpOracle() = default;

ScoreVector HttpOracle::predict(const Image& img) const {
  check_input_shape(info_, img);
  // One client per call keeps predict() reentrant across attack workers.
  auto client = make_client(endpoint_, timeout_);
  const std::string body =
      checked_body(client.Post("/v1/scores", wire::encode_scores_request(img), "application/json"), "POST /v1/scores");
  ScoreVector scores;
  try {
    scores = wire::decode_scores_response(body);
  } catch (const FormatError& e) {
    throw TransportError(std::string("POST /v1/scores: ") + e.what());
  }
  if (scores.size() != info_.num_classes) {
    throw TransportError("POST /v1/scores: got " + std::to_string(scores.size()) + " scores, server declared " +
                         std::to_string(info_.num_classes));
  }
  return scores;
}

}  // namespace stba
