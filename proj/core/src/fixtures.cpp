#include "stba/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "stba/dataset.hpp"
#include "stba/error.hpp"

#include "stba/rng.hpp"

namespace stba::fixtures {
namespace {

double column_grating(std::size_t, std::size_t u) { return (u % 2 == 0) ? 1.0 : -1.0; }
double row_grating(std::size_t v, std::size_t) { return (v % 2 == 0) ? 1.0 : -1.0; }

double to_single(double v) { return static_cast<double>(static_cast<float>(v)); }

/// Weight vector w such that logit1 - logit0 = <w, x>.
std::vector<double> cue_weights(const StripeTask& task) {
  const Shape shape{task.channels, task.side, task.side};
  const double k = 2.0 * task.logit_scale / (task.grating_amplitude * static_cast<double>(shape.size()));
  const double half = 0.5 * static_cast<double>(task.side - 1);
  std::vector<double> w(shape.size());
  for (std::size_t c = 0; c < shape.channels; ++c) {
    for (std::size_t v = 0; v < shape.height; ++v) {
      for (std::size_t u = 0; u < shape.width; ++u) {
        const double ramp = (static_cast<double>(u) - half) / half;
        w[(c * shape.height + v) * shape.width + u] = k * (column_grating(v, u) - row_grating(v, u) + ramp);
      }
    }
  }
  return w;
}

double dot(const std::vector<double>& w, const Image& img) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * img.data()[i];
  return acc;
}

}  // namespace

ModelSpec stripe_model(const StripeTask& task) {
  const auto w = cue_weights(task);
  DenseLayer layer;
  layer.in = w.size();
  layer.out = 2;
  layer.weights.resize(2 * layer.in);
  for (std::size_t i = 0; i < layer.in; ++i) {
    layer.weights[i] = -0.5 * w[i];
    layer.weights[layer.in + i] = 0.5 * w[i];
  }
  layer.bias = {0.0, 0.0};
  layer.activation = Activation::softmax;
  return ModelSpec{{task.channels, task.side, task.side}, 2, {std::move(layer)}};
}

std::vector<LabeledImage> stripe_dataset(std::size_t count, std::uint64_t seed, const StripeTask& task) {
  const Shape shape{task.channels, task.side, task.side};
  const auto w = cue_weights(task);
  const double half = 0.5 * static_cast<double>(task.side - 1);

  Image ramp(shape);
  for (std::size_t c = 0; c < shape.channels; ++c) {
    for (std::size_t v = 0; v < shape.height; ++v) {
      for (std::size_t u = 0; u < shape.width; ++u) ramp.at(c, v, u) = (static_cast<double>(u) - half) / half;
    }
  }
  const double ramp_response = dot(w, ramp);

  Rng rng(seed);
  std::vector<LabeledImage> items;
  items.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const int label = static_cast<int>(n % 2);
    const double cancel = task.min_cancel + (task.max_cancel - task.min_cancel) * rng.uniform();
    Image img(shape);
    for (std::size_t c = 0; c < shape.channels; ++c) {
      const double base = 0.35 + 0.3 * rng.uniform();
      const double gx = 0.1 * (rng.uniform() - 0.5);
      const double gy = 0.1 * (rng.uniform() - 0.5);
      for (std::size_t v = 0; v < shape.height; ++v) {
        for (std::size_t u = 0; u < shape.width; ++u) {
          const double grating = label == 1 ? column_grating(v, u) : row_grating(v, u);
          img.at(c, v, u) = base + gx * (static_cast<double>(u) - half) / half +
                            gy * (static_cast<double>(v) - half) / half + 0.5 * task.grating_amplitude * grating;
        }
      }
    }
    const double sign = label == 1 ? 1.0 : -1.0;
    const double target = sign * (1.0 - cancel) * task.logit_scale;
    const double ramp_gain = (target - dot(w, img)) / ramp_response;
    auto data = img.data();
    auto r = ramp.data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = to_single(std::clamp(data[i] + ramp_gain * r[i], 0.0, 1.0));
    items.push_back({std::move(img), label});
  }
  return items;
}

ModelSpec random_mlp(const Shape& input, std::size_t num_classes, std::vector<std::size_t> hidden,
                     std::uint64_t seed, double weight_scale) {
  Rng rng(seed);
  ModelSpec spec{input, num_classes, {}};
  std::size_t in = input.size();
  hidden.push_back(num_classes);
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    DenseLayer layer;
    layer.in = in;
    layer.out = hidden[i];
    const double scale = weight_scale / std::sqrt(static_cast<double>(in));
    for (std::size_t k = 0; k < layer.in * layer.out; ++k) layer.weights.push_back(scale * rng.normal());
    for (std::size_t k = 0; k < layer.out; ++k) layer.bias.push_back(0.1 * rng.normal());
    layer.activation = i + 1 == hidden.size() ? Activation::softmax : Activation::relu;
    spec.layers.push_back(std::move(layer));
    in = hidden[i];
  }
  return spec;
}

Image random_image(const Shape& shape, std::uint64_t seed) {
  Rng rng(seed);
  Image img(shape);
  for (double& v : img.data()) v = to_single(rng.uniform());
  return img;
}

void write_stripe_fixture(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed,
                          const StripeTask& task) {
  const auto data_dir = dir / "data";
  std::filesystem::create_directories(data_dir);
  auto write_text = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
  };
  write_text(dir / "model.json", model_spec_to_json(stripe_model(task)) + "\n");
  std::string csv = "filename,label\n";
  const auto items = stripe_dataset(count, seed, task);
  for (std::size_t i = 0; i < items.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img_%05zu.png", i);
    write_png(data_dir / name, items[i].image);
    csv += std::string(name) + "," + std::to_string(items[i].label) + "\n";
  }
  write_text(data_dir / "labels.csv", csv);
}

}  // namespace stba::fixtures
