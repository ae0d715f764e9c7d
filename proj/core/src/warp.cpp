#include "stba/warp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stba/error.hpp"

namespace stba {

FlowField::FlowField(std::size_t height, std::size_t width)
    : height_(height), width_(width), du_(height * width, 0.0), dv_(height * width, 0.0) {}

FlowField::FlowField(std::size_t height, std::size_t width, std::vector<double> du, std::vector<double> dv)
    : height_(height), width_(width), du_(std::move(du)), dv_(std::move(dv)) {
  if (du_.size() != pixels() || dv_.size() != pixels()) {
    throw ShapeError("flow planes must hold " + std::to_string(pixels()) + " values");
  }
}

double FlowField::max_abs() const {
  double m = 0.0;
  for (double v : du_) m = std::max(m, std::abs(v));
  for (double v : dv_) m = std::max(m, std::abs(v));
  return m;
}

FlowBudget::FlowBudget(double value) : value_(value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw Error("flow budget must be finite and nonnegative, got " + std::to_string(value));
  }
}

Image apply_flow(const Image& src, const FlowField& flow) {
  if (flow.height() != src.height() || flow.width() != src.width()) {
    throw ShapeError("apply_flow: flow " + std::to_string(flow.height()) + "x" + std::to_string(flow.width()) +
                     " does not match image " + to_string(src.shape()));
  }
  const std::size_t height = src.height();
  const std::size_t width = src.width();
  Image out(src.shape());
  if (src.size() == 0) return out;

  const double max_u = static_cast<double>(width - 1);
  const double max_v = static_cast<double>(height - 1);
  const auto du = flow.du();
  const auto dv = flow.dv();

  for (std::size_t v = 0; v < height; ++v) {
    for (std::size_t u = 0; u < width; ++u) {
      const std::size_t p = v * width + u;
      const double su = std::clamp(static_cast<double>(u) + du[p], 0.0, max_u);
      const double sv = std::clamp(static_cast<double>(v) + dv[p], 0.0, max_v);
      const double fu = std::floor(su);
      const double fv = std::floor(sv);
      const auto u0 = static_cast<std::size_t>(fu);
      const auto v0 = static_cast<std::size_t>(fv);
      const std::size_t u1 = std::min(u0 + 1, width - 1);
      const std::size_t v1 = std::min(v0 + 1, height - 1);
      const double wu = su - fu;
      const double wv = sv - fv;
      for (std::size_t c = 0; c < src.channels(); ++c) {
        // Zero fractional weights skip the far neighbour so integer
        // displacements reproduce the source value exactly.
        double top = src.at(c, v0, u0);
        if (wu != 0.0) top = (1.0 - wu) * top + wu * src.at(c, v0, u1);
        double value = top;
        if (wv != 0.0) {
          double bottom = src.at(c, v1, u0);
          if (wu != 0.0) bottom = (1.0 - wu) * bottom + wu * src.at(c, v1, u1);
          value = (1.0 - wv) * top + wv * bottom;
        }
        out.at(c, v, u) = value;
      }
    }
  }
  return out;
}

FlowField clip_flow(const FlowField& flow, FlowBudget xi) {
  FlowField out = flow;
  const double b = xi.value();
  for (double& v : out.du()) v = std::clamp(v, -b, b);
  for (double& v : out.dv()) v = std::clamp(v, -b, b);
  return out;
}

double flow_smoothness_loss(const FlowField& flow) {
  const std::size_t height = flow.height();
  const std::size_t width = flow.width();
  const auto du = flow.du();
  const auto dv = flow.dv();
  auto term = [&](std::size_t p, std::size_t q) {
    const double a = du[p] - du[q];
    const double b = dv[p] - dv[q];
    return std::sqrt(a * a + b * b + kSmoothnessStabilizer);
  };
  double loss = 0.0;
  for (std::size_t v = 0; v < height; ++v) {
    for (std::size_t u = 0; u < width; ++u) {
      const std::size_t p = v * width + u;
      if (v > 0) loss += term(p, p - width);
      if (v + 1 < height) loss += term(p, p + width);
      if (u > 0) loss += term(p, p - 1);
      if (u + 1 < width) loss += term(p, p + 1);
    }
  }
  return loss;
}

}  // namespace stba
