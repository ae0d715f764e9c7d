#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stba/image.hpp"

namespace stba {

inline constexpr std::size_t kCifarRecordBytes = 3073;
inline constexpr int kCifarClasses = 10;

/// Parses concatenated CIFAR-10 binary records: one label byte followed by
/// 32x32 R, G and B planes. Pixels are scaled to [0, 1].
std::vector<LabeledImage> load_cifar10_batch(std::span<const std::uint8_t> bytes);
std::vector<LabeledImage> load_cifar10_file(const std::filesystem::path& path);

/// Inverse of load_cifar10_batch for a single 3x32x32 item.
std::vector<std::uint8_t> encode_cifar10_record(const LabeledImage& item);

struct LoadIssue {
  std::string file;
  std::string message;
};

struct PngDirectory {
  std::vector<LabeledImage> items;
  std::vector<std::string> files;  // parallel to items
  std::vector<LoadIssue> issues;
};

/// Loads every `*.png` listed in `<dir>/labels.csv` (header `filename,label`).
/// Entries are sorted by filename. PNGs missing from the CSV are skipped with
/// a warning record; unreadable PNGs and out-of-range labels are collected as
/// issues. A malformed CSV throws FormatError. `num_classes` <= 0 disables
/// the label range check.
PngDirectory load_png_dir(const std::filesystem::path& dir, int num_classes = 0);

/// Decodes a PNG to a 3-channel image in [0, 1] (grayscale is expanded).
Image read_png(const std::filesystem::path& path);

/// Writes an 8-bit RGB (3 channel) or grayscale (1 channel) PNG, rounding
/// intensities to the nearest code value.
void write_png(const std::filesystem::path& path, const Image& img);

/// Rounds every value to the nearest multiple of 1/255 representable in
/// single precision, i.e. what write_png/read_png would give back.
Image quantize8(const Image& img);

}  // namespace stba
