#include "stba/image.hpp"

#include <algorithm>
#include <array>

#include "stba/error.hpp"

namespace stba {

std::string to_string(const Shape& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" + std::to_string(s.width);
}

Image::Image(Shape shape, double fill) : shape_(shape), data_(shape.size(), fill) {}

Image::Image(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.size()) {
    throw ShapeError("image data length " + std::to_string(data_.size()) + " does not match shape " +
                     to_string(shape_));
  }
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": shape mismatch " + to_string(a) + " vs " + to_string(b));
  }
}

Image gaussian_blur3(const Image& img) {
  static constexpr std::array<double, 3> kTaps = {1.0, 2.0, 1.0};
  const auto [channels, height, width] = img.shape();
  Image out(img.shape());
  if (img.size() == 0) return out;

  auto clamp_index = [](std::ptrdiff_t i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
  };

  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        double acc = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
          const std::size_t yy = clamp_index(static_cast<std::ptrdiff_t>(y) + dy, height);
          double row = 0.0;
          for (int dx = -1; dx <= 1; ++dx) {
            const std::size_t xx = clamp_index(static_cast<std::ptrdiff_t>(x) + dx, width);
            row += kTaps[dx + 1] * img.at(c, yy, xx);
          }
          acc += kTaps[dy + 1] * row;
        }
        out.at(c, y, x) = acc / 16.0;
      }
    }
  }
  return out;
}

FrequencyPair frequency_split(const Image& img) {
  FrequencyPair pair{img, gaussian_blur3(img)};
  auto high = pair.high.data();
  auto low = pair.low.data();
  for (std::size_t i = 0; i < high.size(); ++i) high[i] -= low[i];
  return pair;
}

Image add(const Image& a, const Image& b) {
  require_same_shape(a.shape(), b.shape(), "add");
  Image out = a;
  auto o = out.data();
  auto s = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += s[i];
  return out;
}

Image recompose(const Image& high, const Image& low) {
  require_same_shape(high.shape(), low.shape(), "recompose");
  Image out = add(high, low);
  for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace stba
