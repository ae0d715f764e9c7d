#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stba {

struct Shape {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const { return channels * height * width; }
  std::size_t plane() const { return height * width; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// Dense C x H x W image. Storage is row-major with channel planes
/// outermost, matching the CIFAR-10 and wire layouts.
///
/// Displayable images hold intensities in [0, 1]; frequency components
/// produced by frequency_split() may be negative.
class Image {
 public:
  Image() = default;
  Image(Shape shape, double fill = 0.0);
  Image(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t channels() const { return shape_.channels; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<const double> channel(std::size_t c) const {
    return std::span<const double>(data_).subspan(c * shape_.plane(), shape_.plane());
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

struct FrequencyPair {
  Image high;  // x - blur(x)
  Image low;   // blur(x)
};

struct LabeledImage {
  Image image;
  int label = 0;
};

/// 3x3 binomial blur ([1,2,1] x [1,2,1] / 16), replicate border.
///
/// Every tap weight is a power of two over 16, so for single-precision
/// inputs in [0, 1] the result is exact in double arithmetic and the
/// high/low split sums back to the input with no error.
Image gaussian_blur3(const Image& img);

/// low = gaussian_blur3(img), high = img - low. No clamping.
FrequencyPair frequency_split(const Image& img);

/// Elementwise high + low clamped to [0, 1].
Image recompose(const Image& high, const Image& low);

/// Unclamped elementwise sum.
Image add(const Image& a, const Image& b);

void require_same_shape(const Shape& a, const Shape& b, const char* what);

}  // namespace stba
