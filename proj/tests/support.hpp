#pragma once

// Test-only helpers: stub scorers, an in-process server speaking the JSON
// scoring protocol, and independent reference implementations used as
// oracles for the library code.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "stba/error.hpp"
#include "stba/image.hpp"
#include "stba/model.hpp"
#include "stba/oracle.hpp"
#include "stba/warp.hpp"
#include "stba/wire.hpp"

namespace stba::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("stba_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Scores every image with a fixed vector and counts calls.
class ConstantOracle final : public Oracle {
 public:
  ConstantOracle(Shape shape, ScoreVector scores) : info_{shape, scores.size()}, scores_(std::move(scores)) {}
  const OracleInfo& info() const override { return info_; }
  ScoreVector predict(const Image& img) const override {
    check_input_shape(info_, img);
    ++calls;
    return scores_;
  }
  mutable std::size_t calls = 0;

 private:
  OracleInfo info_;
  ScoreVector scores_;
};

/// Delegates to a callable and records every image it sees.
class FunctionOracle final : public Oracle {
 public:
  using Fn = std::function<ScoreVector(const Image&, std::size_t call)>;
  FunctionOracle(Shape shape, std::size_t classes, Fn fn) : info_{shape, classes}, fn_(std::move(fn)) {}
  const OracleInfo& info() const override { return info_; }
  ScoreVector predict(const Image& img) const override {
    check_input_shape(info_, img);
    seen.push_back(img);
    return fn_(img, seen.size() - 1);
  }
  mutable std::vector<Image> seen;

 private:
  OracleInfo info_;
  Fn fn_;
};

/// Plain reference forward pass: explicit loops, no shared code with MlpModel.
inline ScoreVector reference_forward(const ModelSpec& spec, const Image& img) {
  std::vector<double> act(img.data().begin(), img.data().end());
  for (const DenseLayer& layer : spec.layers) {
    std::vector<double> next(layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) {
      double s = layer.bias[o];
      for (std::size_t i = 0; i < layer.in; ++i) s += layer.weights[o * layer.in + i] * act[i];
      next[o] = s;
    }
    if (layer.activation == Activation::relu) {
      for (double& v : next) v = v > 0 ? v : 0;
    } else if (layer.activation == Activation::softmax) {
      double total = 0;
      std::vector<double> e(next.size());
      for (std::size_t i = 0; i < next.size(); ++i) total += (e[i] = std::exp(next[i]));
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = e[i] / total;
    }
    act = next;
  }
  return act;
}

/// Direct 3x3 convolution against an explicitly padded copy of the image.
inline Image reference_blur(const Image& img) {
  const double kernel[3][3] = {{1, 2, 1}, {2, 4, 2}, {1, 2, 1}};
  const std::size_t h = img.height(), w = img.width();
  Image out(img.shape());
  for (std::size_t c = 0; c < img.channels(); ++c) {
    std::vector<std::vector<double>> padded(h + 2, std::vector<double>(w + 2));
    for (std::size_t y = 0; y < h + 2; ++y) {
      for (std::size_t x = 0; x < w + 2; ++x) {
        const std::size_t sy = y == 0 ? 0 : std::min(y - 1, h - 1);
        const std::size_t sx = x == 0 ? 0 : std::min(x - 1, w - 1);
        padded[y][x] = img.at(c, sy, sx);
      }
    }
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        double s = 0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) s += kernel[i][j] * padded[y + i][x + j];
        out.at(c, y, x) = s / 16.0;
      }
    }
  }
  return out;
}

/// Integer flows: gather from the clamped integer source coordinate.
inline Image integer_gather(const Image& src, const FlowField& flow) {
  Image out(src.shape());
  const auto h = static_cast<long>(src.height()), w = static_cast<long>(src.width());
  for (long v = 0; v < h; ++v) {
    for (long u = 0; u < w; ++u) {
      const std::size_t p = static_cast<std::size_t>(v * w + u);
      const long su = std::clamp(u + std::lround(flow.du()[p]), 0L, w - 1);
      const long sv = std::clamp(v + std::lround(flow.dv()[p]), 0L, h - 1);
      for (std::size_t c = 0; c < src.channels(); ++c) {
        out.at(c, static_cast<std::size_t>(v), static_cast<std::size_t>(u)) =
            src.at(c, static_cast<std::size_t>(sv), static_cast<std::size_t>(su));
      }
    }
  }
  return out;
}

/// Brute-force smoothness loss: every ordered pair of pixels at Manhattan
/// distance one.
inline double reference_smoothness(const FlowField& f) {
  double total = 0;
  const std::size_t n = f.pixels();
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      const long dy = static_cast<long>(p / f.width()) - static_cast<long>(q / f.width());
      const long dx = static_cast<long>(p % f.width()) - static_cast<long>(q % f.width());
      if (std::abs(dx) + std::abs(dy) != 1) continue;
      const double a = f.du()[p] - f.du()[q];
      const double b = f.dv()[p] - f.dv()[q];
      total += std::sqrt(a * a + b * b + kSmoothnessStabilizer);
    }
  }
  return total;
}

/// Serves the scoring protocol for a wrapped scorer on a loopback port.
/// `num_classes_override` lets tests declare a different class count in
/// /v1/meta than the scorer actually returns.
class ScoringServer {
 public:
  explicit ScoringServer(const Oracle& backend, std::size_t num_classes_override = 0) : backend_(backend) {
    OracleInfo meta = backend.info();
    if (num_classes_override) meta.num_classes = num_classes_override;
    server_.Get("/v1/meta", [meta](const httplib::Request&, httplib::Response& res) {
      res.set_content(wire::encode_meta(meta), "application/json");
    });
    server_.Post("/v1/scores", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      try {
        const Image img = wire::decode_scores_request(req.body);
        res.set_content(wire::encode_scores_response(backend_.predict(img)), "application/json");
      } catch (const std::exception& e) {
        res.status = 400;
        res.set_content(wire::encode_error(e.what()), "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ScoringServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<std::size_t> requests{0};

 private:
  const Oracle& backend_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace stba::testing
