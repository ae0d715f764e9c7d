#include "stba/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <sstream>

namespace stba {
namespace {

using nlohmann::json;

std::string layer_path(std::size_t i) { return "/layers/" + std::to_string(i); }

std::size_t positive_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) {
    throw ModelSpecError(path, "expected a positive integer");
  }
  return j.get<std::size_t>();
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ModelSpecError(path, "expected a number");
  return j.get<double>();
}

const json& member(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelSpecError(path, std::string("missing member '") + key + "'");
  return *it;
}

Activation parse_activation(const json& j, const std::string& path) {
  if (j == "relu") return Activation::relu;
  if (j == "identity") return Activation::identity;
  if (j == "softmax") return Activation::softmax;
  throw ModelSpecError(path, "activation must be \"relu\", \"identity\" or \"softmax\"");
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::identity: return "identity";
    case Activation::softmax: return "softmax";
  }
  return "identity";
}

DenseLayer parse_layer(const json& j, const std::string& path) {
  if (!j.is_object()) throw ModelSpecError(path, "expected an object");
  DenseLayer layer;
  const json& weights = member(j, "weights", path);
  if (!weights.is_array() || weights.empty()) throw ModelSpecError(path + "/weights", "expected a non-empty matrix");
  layer.out = weights.size();
  for (std::size_t r = 0; r < weights.size(); ++r) {
    const std::string rpath = path + "/weights/" + std::to_string(r);
    const json& row = weights[r];
    if (!row.is_array() || row.empty()) throw ModelSpecError(rpath, "expected a non-empty row");
    if (r == 0) layer.in = row.size();
    if (row.size() != layer.in) throw ModelSpecError(rpath, "ragged weight matrix");
    for (std::size_t c = 0; c < row.size(); ++c) {
      layer.weights.push_back(number(row[c], rpath + "/" + std::to_string(c)));
    }
  }
  const json& bias = member(j, "bias", path);
  if (!bias.is_array()) throw ModelSpecError(path + "/bias", "expected an array");
  if (bias.size() != layer.out) {
    throw ModelSpecError(path + "/bias", "length " + std::to_string(bias.size()) + " does not match " +
                                             std::to_string(layer.out) + " weight rows");
  }
  for (std::size_t i = 0; i < bias.size(); ++i) {
    layer.bias.push_back(number(bias[i], path + "/bias/" + std::to_string(i)));
  }
  layer.activation = parse_activation(member(j, "activation", path), path + "/activation");
  return layer;
}

}  // namespace

void validate(const ModelSpec& spec) {
  if (spec.layers.empty()) throw ModelSpecError("/layers", "at least one layer is required");
  std::size_t expected_in = spec.input_shape.size();
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const DenseLayer& layer = spec.layers[i];
    const std::string name = "layer " + std::to_string(i + 1);
    if (layer.weights.size() != layer.in * layer.out || layer.bias.size() != layer.out) {
      throw ModelSpecError(layer_path(i), name + ": weight/bias storage does not match " +
                                              std::to_string(layer.out) + "x" + std::to_string(layer.in));
    }
    if (layer.in != expected_in) {
      throw ModelSpecError(layer_path(i), name + ": input dimension " + std::to_string(layer.in) +
                                              " does not match " + std::to_string(expected_in));
    }
    if (layer.activation == Activation::softmax && i + 1 != spec.layers.size()) {
      throw ModelSpecError(layer_path(i) + "/activation", name + ": softmax is only allowed on the final layer");
    }
    for (double w : layer.weights) {
      if (!std::isfinite(w)) throw ModelSpecError(layer_path(i) + "/weights", name + ": non-finite weight");
    }
    for (double b : layer.bias) {
      if (!std::isfinite(b)) throw ModelSpecError(layer_path(i) + "/bias", name + ": non-finite bias");
    }
    expected_in = layer.out;
  }
  if (expected_in != spec.num_classes) {
    throw ModelSpecError(layer_path(spec.layers.size() - 1),
                         "layer " + std::to_string(spec.layers.size()) + ": output dimension " +
                             std::to_string(expected_in) + " does not match num_classes " +
                             std::to_string(spec.num_classes));
  }
}

ModelSpec load_model_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelSpecError("", e.what());
  }
  if (!doc.is_object()) throw ModelSpecError("", "expected a JSON object");

  ModelSpec spec;
  const json& shape = member(doc, "input_shape", "");
  if (!shape.is_array() || shape.size() != 3) throw ModelSpecError("/input_shape", "expected [C,H,W]");
  spec.input_shape = {positive_integer(shape[0], "/input_shape/0"), positive_integer(shape[1], "/input_shape/1"),
                      positive_integer(shape[2], "/input_shape/2")};
  spec.num_classes = positive_integer(member(doc, "num_classes", ""), "/num_classes");
  const json& layers = member(doc, "layers", "");
  if (!layers.is_array()) throw ModelSpecError("/layers", "expected an array");
  for (std::size_t i = 0; i < layers.size(); ++i) spec.layers.push_back(parse_layer(layers[i], layer_path(i)));
  validate(spec);
  return spec;
}

ModelSpec load_model_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_model_spec(buf.str());
}

std::string model_spec_to_json(const ModelSpec& spec) {
  json doc;
  doc["input_shape"] = {spec.input_shape.channels, spec.input_shape.height, spec.input_shape.width};
  doc["num_classes"] = spec.num_classes;
  doc["layers"] = json::array();
  for (const DenseLayer& layer : spec.layers) {
    json weights = json::array();
    for (std::size_t r = 0; r < layer.out; ++r) {
      weights.push_back(std::vector<double>(layer.weights.begin() + static_cast<std::ptrdiff_t>(r * layer.in),
                                            layer.weights.begin() + static_cast<std::ptrdiff_t>((r + 1) * layer.in)));
    }
    doc["layers"].push_back({{"weights", weights}, {"bias", layer.bias}, {"activation", activation_name(layer.activation)}});
  }
  return doc.dump();
}

MlpModel::MlpModel(ModelSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  info_ = {spec_.input_shape, spec_.num_classes};
}

ScoreVector MlpModel::predict(const Image& img) const {
  check_input_shape(info_, img);
  std::vector<double> x(img.data().begin(), img.data().end());
  std::vector<double> y;
  for (const DenseLayer& layer : spec_.layers) {
    y.assign(layer.bias.begin(), layer.bias.end());
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double* row = layer.weights.data() + r * layer.in;
      double acc = 0.0;
      for (std::size_t c = 0; c < layer.in; ++c) acc += row[c] * x[c];
      y[r] += acc;
    }
    switch (layer.activation) {
      case Activation::relu:
        for (double& v : y) v = std::max(v, 0.0);
        break;
      case Activation::softmax: {
        const double m = *std::max_element(y.begin(), y.end());
        double sum = 0.0;
        for (double& v : y) {
          v = std::exp(v - m);
          sum += v;
        }
        for (double& v : y) v /= sum;
        break;
      }
      case Activation::identity:
        break;
    }
    x.swap(y);
  }
  return x;
}

}  // namespace stba
