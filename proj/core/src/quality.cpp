#include "stba/quality.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace stba {
namespace {

constexpr double kC1 = (0.01 * 1.0) * (0.01 * 1.0);
constexpr double kC2 = (0.03 * 1.0) * (0.03 * 1.0);
constexpr std::size_t kWindow = 11;

double ssim_from_moments(double mu_a, double mu_b, double var_a, double var_b, double cov) {
  return ((2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2)) /
         ((mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2));
}

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> w{};
  double sum = 0.0;
  for (std::size_t i = 0; i < kWindow; ++i) {
    const double d = static_cast<double>(i) - 5.0;
    w[i] = std::exp(-(d * d) / (2.0 * 1.5 * 1.5));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

double global_ssim(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double mu_a = 0.0, mu_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mu_a += a[i];
    mu_b += b[i];
  }
  mu_a /= n;
  mu_b /= n;
  double var_a = 0.0, var_b = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mu_a;
    const double db = b[i] - mu_b;
    var_a += da * da;
    var_b += db * db;
    cov += da * db;
  }
  return ssim_from_moments(mu_a, mu_b, var_a / n, var_b / n, cov / n);
}

double windowed_ssim(std::span<const double> a, std::span<const double> b, std::size_t height,
                     std::size_t width) {
  static const auto w = gaussian_window();
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t y0 = 0; y0 + kWindow <= height; ++y0) {
    for (std::size_t x0 = 0; x0 + kWindow <= width; ++x0) {
      double mu_a = 0.0, mu_b = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
      for (std::size_t i = 0; i < kWindow; ++i) {
        for (std::size_t j = 0; j < kWindow; ++j) {
          const double wt = w[i] * w[j];
          const std::size_t idx = (y0 + i) * width + (x0 + j);
          mu_a += wt * a[idx];
          mu_b += wt * b[idx];
          saa += wt * a[idx] * a[idx];
          sbb += wt * b[idx] * b[idx];
          sab += wt * a[idx] * b[idx];
        }
      }
      total += ssim_from_moments(mu_a, mu_b, saa - mu_a * mu_a, sbb - mu_b * mu_b, sab - mu_a * mu_b);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  require_same_shape(a.shape(), b.shape(), "psnr");
  auto da = a.data();
  auto db = b.data();
  double mse = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = da[i] - db[i];
    mse += d * d;
  }
  mse /= static_cast<double>(da.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) {
  require_same_shape(a.shape(), b.shape(), "ssim");
  const bool windowed = a.height() >= kWindow && a.width() >= kWindow;
  double total = 0.0;
  for (std::size_t c = 0; c < a.channels(); ++c) {
    total += windowed ? windowed_ssim(a.channel(c), b.channel(c), a.height(), a.width())
                      : global_ssim(a.channel(c), b.channel(c));
  }
  return total / static_cast<double>(a.channels());
}

}  // namespace stba
