#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stba/image.hpp"

namespace stba {

/// Per-pixel displacement in pixel units. `du` moves along columns
/// (width), `dv` along rows (height). Both planes are row-major H x W.
class FlowField {
 public:
  FlowField() = default;
  FlowField(std::size_t height, std::size_t width);
  FlowField(std::size_t height, std::size_t width, std::vector<double> du, std::vector<double> dv);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixels() const { return height_ * width_; }
  /// Number of scalar parameters (2 * H * W).
  std::size_t size() const { return 2 * pixels(); }

  std::span<double> du() { return du_; }
  std::span<const double> du() const { return du_; }
  std::span<double> dv() { return dv_; }
  std::span<const double> dv() const { return dv_; }

  /// Flat view of parameter `i` in [0, size()): du plane then dv plane.
  double& operator[](std::size_t i) { return i < pixels() ? du_[i] : dv_[i - pixels()]; }
  double operator[](std::size_t i) const { return i < pixels() ? du_[i] : dv_[i - pixels()]; }

  /// max(|du|, |dv|) over the field.
  double max_abs() const;

  friend bool operator==(const FlowField&, const FlowField&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> du_;
  std::vector<double> dv_;
};

/// Flow budget xi in pixels; always finite and nonnegative.
class FlowBudget {
 public:
  explicit FlowBudget(double value);
  double value() const { return value_; }

 private:
  double value_;
};

inline constexpr double kSmoothnessStabilizer = 1e-12;

/// Backward bilinear warp: output(v, u) = src sampled at (u + du, v + dv),
/// coordinates clamped to the image rectangle. One flow drives all channels.
Image apply_flow(const Image& src, const FlowField& flow);

/// Elementwise clamp of du and dv to [-xi, +xi].
FlowField clip_flow(const FlowField& flow, FlowBudget xi);

/// Sum over pixels p and in-bounds 4-neighbours q of
/// sqrt((du_p - du_q)^2 + (dv_p - dv_q)^2 + 1e-12). Every adjacent pair is
/// visited from both ends.
double flow_smoothness_loss(const FlowField& flow);

}  // namespace stba
