#include "stba/dataset.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "stba/error.hpp"

namespace stba {
namespace {

constexpr std::size_t kCifarSide = 32;

double from_byte(std::uint8_t v) { return static_cast<double>(static_cast<float>(v) / 255.0f); }

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::map<std::string, int> read_labels_csv(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw FormatError("cannot open " + csv.string());
  std::map<std::string, int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    line = trim(line);
    if (lineno == 1) {
      if (line != "filename,label") {
        throw FormatError(csv.string() + ":1: expected header 'filename,label'");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw FormatError(csv.string() + ":" + std::to_string(lineno) + ": expected two fields");
    }
    const std::string name = trim(line.substr(0, comma));
    const std::string field = trim(line.substr(comma + 1));
    int label = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), label);
    if (name.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
      throw FormatError(csv.string() + ":" + std::to_string(lineno) + ": invalid row '" + line + "'");
    }
    labels[name] = label;
  }
  if (lineno == 0) throw FormatError(csv.string() + ": empty file");
  return labels;
}

}  // namespace

std::vector<LabeledImage> load_cifar10_batch(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kCifarRecordBytes != 0) {
    throw FormatError("CIFAR-10 stream length " + std::to_string(bytes.size()) +
                      " is not a multiple of 3073");
  }
  const Shape shape{3, kCifarSide, kCifarSide};
  std::vector<LabeledImage> items;
  items.reserve(bytes.size() / kCifarRecordBytes);
  for (std::size_t off = 0; off < bytes.size(); off += kCifarRecordBytes) {
    const auto record = bytes.subspan(off, kCifarRecordBytes);
    if (record[0] >= kCifarClasses) {
      throw FormatError("CIFAR-10 record " + std::to_string(off / kCifarRecordBytes) + " has label " +
                        std::to_string(record[0]));
    }
    std::vector<double> data(shape.size());
    std::transform(record.begin() + 1, record.end(), data.begin(), from_byte);
    items.push_back({Image(shape, std::move(data)), record[0]});
  }
  return items;
}

std::vector<LabeledImage> load_cifar10_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_cifar10_batch(bytes);
}

std::vector<std::uint8_t> encode_cifar10_record(const LabeledImage& item) {
  if (item.image.shape() != Shape{3, kCifarSide, kCifarSide}) {
    throw ShapeError("CIFAR-10 records are 3x32x32, got " + to_string(item.image.shape()));
  }
  if (item.label < 0 || item.label >= kCifarClasses) throw FormatError("label out of CIFAR-10 range");
  std::vector<std::uint8_t> out;
  out.reserve(kCifarRecordBytes);
  out.push_back(static_cast<std::uint8_t>(item.label));
  for (double v : item.image.data()) out.push_back(to_byte(v));
  return out;
}

Image read_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw FormatError(path.string() + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&png);
    throw FormatError(path.string() + ": " + png.message);
  }
  const Shape shape{3, png.height, png.width};
  Image img(shape);
  for (std::size_t y = 0; y < shape.height; ++y) {
    for (std::size_t x = 0; x < shape.width; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        img.at(c, y, x) = from_byte(buffer[(y * shape.width + x) * 3 + c]);
      }
    }
  }
  return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw ShapeError("PNG output needs 1 or 3 channels, got " + to_string(img.shape()));
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t nc = img.channels();
  std::vector<png_byte> buffer(img.size());
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      for (std::size_t c = 0; c < nc; ++c) buffer[(y * img.width() + x) * nc + c] = to_byte(img.at(c, y, x));
    }
  }
  if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    throw Error(path.string() + ": " + png.message);
  }
}

Image quantize8(const Image& img) {
  Image out = img;
  for (double& v : out.data()) v = from_byte(to_byte(v));
  return out;
}

PngDirectory load_png_dir(const std::filesystem::path& dir, int num_classes) {
  const auto labels = read_labels_csv(dir / "labels.csv");
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());

  PngDirectory result;
  for (const auto& name : names) {
    const auto it = labels.find(name);
    if (it == labels.end()) {
      result.issues.push_back({name, "warning: not listed in labels.csv, skipped"});
      continue;
    }
    if (it->second < 0 || (num_classes > 0 && it->second >= num_classes)) {
      result.issues.push_back({name, "label " + std::to_string(it->second) + " out of range"});
      continue;
    }
    try {
      result.items.push_back({read_png(dir / name), it->second});
      result.files.push_back(name);
    } catch (const FormatError& e) {
      result.issues.push_back({name, e.what()});
    }
  }
  return result;
}

}  // namespace stba
