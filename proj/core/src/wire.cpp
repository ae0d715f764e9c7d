#include "stba/wire.hpp"

#include "json.hpp"
#include "stba/error.hpp"

namespace stba::wire {
namespace {

using nlohmann::json;

json parse_object(std::string_view body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw FormatError("body is not a JSON object");
  return doc;
}

Shape parse_shape(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("'shape' must be [C,H,W]");
  Shape s;
  std::size_t* dims[3] = {&s.channels, &s.height, &s.width};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number_integer() || j[i].get<long long>() <= 0) {
      throw FormatError("'shape' entries must be positive integers");
    }
    *dims[i] = j[i].get<std::size_t>();
  }
  return s;
}

}  // namespace

std::string encode_scores_request(const Image& img) {
  json data = json::array();
  for (double v : img.data()) data.push_back(static_cast<double>(static_cast<float>(v)));
  json doc{{"shape", {img.channels(), img.height(), img.width()}}, {"data", std::move(data)}};
  return doc.dump();
}

Image decode_scores_request(std::string_view body) {
  const json doc = parse_object(body);
  if (!doc.contains("shape") || !doc.contains("data")) throw FormatError("request needs 'shape' and 'data'");
  const Shape shape = parse_shape(doc["shape"]);
  const json& data = doc["data"];
  if (!data.is_array() || data.size() != shape.size()) {
    throw FormatError("'data' must hold C*H*W = " + std::to_string(shape.size()) + " numbers");
  }
  std::vector<double> values;
  values.reserve(data.size());
  for (const json& v : data) {
    if (!v.is_number()) throw FormatError("'data' must hold numbers");
    values.push_back(static_cast<double>(static_cast<float>(v.get<double>())));
  }
  return Image(shape, std::move(values));
}

std::string encode_scores_response(const ScoreVector& scores) { return json{{"scores", scores}}.dump(); }

ScoreVector decode_scores_response(std::string_view body) {
  const json doc = parse_object(body);
  auto it = doc.find("scores");
  if (it == doc.end() || !it->is_array()) throw FormatError("response needs a 'scores' array");
  ScoreVector scores;
  for (const json& v : *it) {
    if (!v.is_number()) throw FormatError("'scores' must hold numbers");
    scores.push_back(v.get<double>());
  }
  return scores;
}

std::string encode_meta(const OracleInfo& info) {
  const Shape& s = info.input_shape;
  return json{{"num_classes", info.num_classes}, {"input_shape", {s.channels, s.height, s.width}}}.dump();
}

OracleInfo decode_meta(std::string_view body) {
  const json doc = parse_object(body);
  auto nc = doc.find("num_classes");
  if (nc == doc.end() || !nc->is_number_integer() || nc->get<long long>() < 2) {
    throw FormatError("meta needs an integer 'num_classes' >= 2");
  }
  if (!doc.contains("input_shape")) throw FormatError("meta needs 'input_shape'");
  return {parse_shape(doc["input_shape"]), nc->get<std::size_t>()};
}

std::string encode_error(std::string_view message) { return json{{"error", message}}.dump(); }

}  // namespace stba::wire
