#include <cmath>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "stba/dataset.hpp"
#include "stba/error.hpp"
#include "stba/fixtures.hpp"
#include "stba/image.hpp"
#include "stba/quality.hpp"
#include "support.hpp"

using namespace stba;
using stba::testing::TempDir;

namespace {

double max_abs_diff(const Image& a, const Image& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_SUITE("blur") {
  TEST_CASE("constant image is a fixed point") {
    const Image img(Shape{3, 7, 5}, 0.5);
    const Image out = gaussian_blur3(img);
    for (double v : out.data()) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("impulse at the centre of a 3x3 image") {
    Image img(Shape{1, 3, 3}, 0.0);
    img.at(0, 1, 1) = 1.0;
    const Image out = gaussian_blur3(img);
    CHECK(out.at(0, 1, 1) == 0.25);
    CHECK(out.at(0, 0, 0) == 1.0 / 16.0);
    CHECK(out.at(0, 0, 1) == 2.0 / 16.0);
  }

  TEST_CASE("1x1 image keeps its value") {
    const Image img(Shape{2, 1, 1}, std::vector<double>{0.3, 0.8});
    const Image out = gaussian_blur3(img);
    CHECK(out.at(0, 0, 0) == doctest::Approx(0.3).epsilon(1e-7));
    CHECK(out.at(1, 0, 0) == doctest::Approx(0.8).epsilon(1e-7));
  }

  TEST_CASE("matches a direct padded convolution") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Image img = fixtures::random_image(Shape{3, 9, 13}, seed);
      CHECK(max_abs_diff(gaussian_blur3(img), testing::reference_blur(img)) < 1e-12);
    }
  }

  TEST_CASE("shift equivariance away from the border") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Image img = fixtures::random_image(Shape{1, 16, 16}, seed);
      Image shifted(img.shape());
      for (std::size_t y = 0; y < 16; ++y)
        for (std::size_t x = 0; x < 16; ++x) shifted.at(0, y, x) = img.at(0, y, std::min<std::size_t>(x + 1, 15));
      const Image a = gaussian_blur3(shifted);
      const Image b = gaussian_blur3(img);
      for (std::size_t y = 1; y + 1 < 16; ++y)
        for (std::size_t x = 1; x + 2 < 16; ++x) CHECK(a.at(0, y, x) == doctest::Approx(b.at(0, y, x + 1)).epsilon(1e-12));
    }
  }
}

TEST_SUITE("frequency split") {
  TEST_CASE("constant image has no high band") {
    const Image img(Shape{3, 4, 4}, 0.25);
    const auto [high, low] = frequency_split(img);
    for (double v : high.data()) CHECK(v == 0.0);
    CHECK(low == img);
  }

  TEST_CASE("impulse high band") {
    Image img(Shape{1, 3, 3}, 0.0);
    img.at(0, 1, 1) = 1.0;
    CHECK(frequency_split(img).high.at(0, 1, 1) == 0.75);
  }

  TEST_CASE("high + low reproduces the input exactly") {
    for (const auto& item : fixtures::stripe_dataset(20, 3)) {
      const auto [high, low] = frequency_split(item.image);
      CHECK(add(high, low) == item.image);
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Image img = fixtures::random_image(Shape{3, 32, 32}, seed);
      const auto [high, low] = frequency_split(img);
      CHECK(add(high, low) == img);
      const Image coded = quantize8(img);
      const auto [qh, ql] = frequency_split(coded);
      CHECK(add(qh, ql) == coded);
    }
  }
}

TEST_SUITE("recompose") {
  TEST_CASE("round trip of an unmodified split") {
    const Image img = fixtures::random_image(Shape{3, 8, 8}, 11);
    const auto parts = frequency_split(img);
    CHECK(recompose(parts.high, parts.low) == img);
  }

  TEST_CASE("clamps above and below") {
    const Shape s{1, 2, 2};
    const Image above = recompose(Image(s, 0.9), Image(s, 0.9));
    const Image below = recompose(Image(s, -0.2), Image(s, 0.1));
    for (double v : above.data()) CHECK(v == 1.0);
    for (double v : below.data()) CHECK(v == 0.0);
  }

  TEST_CASE("shape mismatch") {
    CHECK_THROWS_AS(recompose(Image(Shape{1, 2, 2}), Image(Shape{1, 2, 3})), ShapeError);
  }
}

TEST_SUITE("psnr") {
  TEST_CASE("identical images") {
    const Image img = fixtures::random_image(Shape{3, 8, 8}, 1);
    CHECK(psnr(img, img) == std::numeric_limits<double>::infinity());
  }

  TEST_CASE("constant differences") {
    const Shape s{3, 5, 5};
    CHECK(psnr(Image(s, 0.2), Image(s, 0.3)) == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(psnr(Image(s, 0.0), Image(s, 1.0)) == doctest::Approx(0.0));
  }

  TEST_CASE("symmetric") {
    const Image a = fixtures::random_image(Shape{3, 8, 8}, 1);
    const Image b = fixtures::random_image(Shape{3, 8, 8}, 2);
    CHECK(psnr(a, b) == psnr(b, a));
  }

  TEST_CASE("shape mismatch") { CHECK_THROWS_AS(psnr(Image(Shape{1, 2, 2}), Image(Shape{3, 2, 2})), ShapeError); }
}

TEST_SUITE("ssim") {
  TEST_CASE("identical images score 1") {
    for (const Shape s : {Shape{3, 32, 32}, Shape{3, 8, 8}}) {
      const Image img = fixtures::random_image(s, 4);
      CHECK(ssim(img, img) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("negation around the mean is penalised") {
    for (const Shape s : {Shape{1, 16, 16}, Shape{1, 6, 6}}) {
      const Image a = fixtures::random_image(s, 5);
      double mean = 0;
      for (double v : a.data()) mean += v;
      mean /= static_cast<double>(a.size());
      Image b(s);
      for (std::size_t i = 0; i < a.size(); ++i) b.data()[i] = 2 * mean - a.data()[i];
      CHECK(ssim(a, b) < 1.0);
    }
  }

  TEST_CASE("constant 0 vs constant 1") {
    const double c1 = 1e-4;
    for (const Shape s : {Shape{1, 12, 12}, Shape{3, 4, 4}}) {
      CHECK(ssim(Image(s, 0.0), Image(s, 1.0)) == doctest::Approx(c1 / (1 + c1)).epsilon(1e-9));
    }
  }

  TEST_CASE("symmetric") {
    const Image a = fixtures::random_image(Shape{3, 16, 16}, 6);
    const Image b = fixtures::random_image(Shape{3, 16, 16}, 7);
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
  }
}

TEST_SUITE("cifar10") {
  TEST_CASE("empty stream") { CHECK(load_cifar10_batch({}).empty()); }

  TEST_CASE("saturated record") {
    std::vector<std::uint8_t> bytes(kCifarRecordBytes, 255);
    bytes[0] = 7;
    const auto items = load_cifar10_batch(bytes);
    REQUIRE(items.size() == 1);
    CHECK(items[0].label == 7);
    CHECK(items[0].image.shape() == Shape{3, 32, 32});
    for (double v : items[0].image.data()) CHECK(v == 1.0);
  }

  TEST_CASE("two records keep their order and plane layout") {
    std::vector<std::uint8_t> bytes(2 * kCifarRecordBytes, 0);
    bytes[0] = 2;
    bytes[kCifarRecordBytes] = 5;
    bytes[1 + 1024] = 51;                          // G plane, pixel (0,0) of record 0
    bytes[kCifarRecordBytes + 1 + 2048 + 33] = 102;  // B plane, pixel (1,1) of record 1
    const auto items = load_cifar10_batch(bytes);
    REQUIRE(items.size() == 2);
    CHECK(items[0].label == 2);
    CHECK(items[1].label == 5);
    CHECK(items[0].image.at(1, 0, 0) == doctest::Approx(0.2));
    CHECK(items[1].image.at(2, 1, 1) == doctest::Approx(0.4));
  }

  TEST_CASE("malformed streams") {
    CHECK_THROWS_AS(load_cifar10_batch(std::vector<std::uint8_t>(kCifarRecordBytes + 1)), FormatError);
    std::vector<std::uint8_t> bad(kCifarRecordBytes, 0);
    bad[0] = 10;
    CHECK_THROWS_AS(load_cifar10_batch(bad), FormatError);
  }

  TEST_CASE("record round trip") {
    std::vector<std::uint8_t> bytes(kCifarRecordBytes);
    std::mt19937 gen(3);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(gen());
    bytes[0] = 9;
    CHECK(encode_cifar10_record(load_cifar10_batch(bytes).at(0)) == bytes);
  }

  TEST_CASE("file loader") {
    TempDir dir;
    std::vector<std::uint8_t> bytes(kCifarRecordBytes, 128);
    bytes[0] = 1;
    {
      std::ofstream out(dir.path() / "batch.bin", std::ios::binary);
      out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    const auto items = load_cifar10_file(dir.path() / "batch.bin");
    REQUIRE(items.size() == 1);
    CHECK(items[0].label == 1);
    CHECK_THROWS_AS(load_cifar10_file(dir.path() / "missing.bin"), Error);
  }
}

TEST_SUITE("png directory") {
  TEST_CASE("no images") {
    TempDir dir;
    write_file(dir.path() / "labels.csv", "filename,label\n");
    const auto loaded = load_png_dir(dir.path(), 10);
    CHECK(loaded.items.empty());
    CHECK(loaded.issues.empty());
  }

  TEST_CASE("single white 2x2 image") {
    TempDir dir;
    write_png(dir.path() / "a.png", Image(Shape{3, 2, 2}, 1.0));
    write_file(dir.path() / "labels.csv", "filename,label\na.png,3\n");
    const auto loaded = load_png_dir(dir.path(), 10);
    REQUIRE(loaded.items.size() == 1);
    CHECK(loaded.items[0].label == 3);
    CHECK(loaded.items[0].image == Image(Shape{3, 2, 2}, 1.0));
  }

  TEST_CASE("sorted by filename, unlisted files skipped") {
    TempDir dir;
    write_png(dir.path() / "b.png", Image(Shape{3, 2, 2}, 0.0));
    write_png(dir.path() / "a.png", Image(Shape{3, 2, 2}, 1.0));
    write_png(dir.path() / "z.png", Image(Shape{3, 2, 2}, 1.0));
    write_file(dir.path() / "labels.csv", "filename,label\nb.png,1\na.png,0\n");
    const auto loaded = load_png_dir(dir.path(), 10);
    REQUIRE(loaded.files.size() == 2);
    CHECK(loaded.files[0] == "a.png");
    CHECK(loaded.files[1] == "b.png");
    CHECK(loaded.items[1].label == 1);
    REQUIRE(loaded.issues.size() == 1);
    CHECK(loaded.issues[0].file == "z.png");
  }

  TEST_CASE("out-of-range label and unreadable file become issues") {
    TempDir dir;
    write_png(dir.path() / "a.png", Image(Shape{3, 2, 2}, 1.0));
    write_png(dir.path() / "b.png", Image(Shape{3, 2, 2}, 1.0));
    write_file(dir.path() / "c.png", "not a png");
    write_file(dir.path() / "labels.csv", "filename,label\na.png,12\nb.png,4\nc.png,1\n");
    const auto loaded = load_png_dir(dir.path(), 10);
    REQUIRE(loaded.items.size() == 1);
    CHECK(loaded.files[0] == "b.png");
    CHECK(loaded.issues.size() == 2);
  }

  TEST_CASE("malformed csv is fatal") {
    TempDir dir;
    write_png(dir.path() / "a.png", Image(Shape{3, 2, 2}, 1.0));
    write_file(dir.path() / "labels.csv", "filename,label\na.png,three\n");
    CHECK_THROWS_AS(load_png_dir(dir.path(), 10), FormatError);
    write_file(dir.path() / "labels.csv", "name;label\na.png;1\n");
    CHECK_THROWS_AS(load_png_dir(dir.path(), 10), FormatError);
  }

  TEST_CASE("png write/read matches quantize8") {
    TempDir dir;
    const Image img = fixtures::random_image(Shape{3, 5, 7}, 8);
    write_png(dir.path() / "x.png", img);
    CHECK(read_png(dir.path() / "x.png") == quantize8(img));
  }
}
