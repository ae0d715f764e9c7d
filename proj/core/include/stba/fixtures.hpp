#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "stba/image.hpp"
#include "stba/model.hpp"

namespace stba::fixtures {

/// Parameters of the synthetic two-class stripe task.
///
/// The classifier's logit difference (class 1 minus class 0) is a sum of
/// three linear cues: a period-2 column grating (+), a period-2 row grating
/// (-) and a smooth left-to-right brightness ramp (+). Class 1 images carry
/// the column grating, class 0 images the row grating, each at amplitude
/// `grating_amplitude` on a random smooth background. The ramp is then set
/// so that it cancels a fraction `cancel` (drawn from
/// [min_cancel, max_cancel]) of the grating's evidence. The gratings live
/// entirely in the high-frequency band while the ramp lives in the low band,
/// so blurring a grating by a fraction 1 - cancel of its amplitude flips the
/// item.
struct StripeTask {
  std::size_t channels = 3;
  std::size_t side = 8;
  double grating_amplitude = 0.08;
  double min_cancel = 0.75;
  double max_cancel = 0.95;
  /// Logit difference produced by a full-amplitude grating on its own.
  double logit_scale = 4.0;
};

/// Single dense layer + softmax over the three cues described above.
ModelSpec stripe_model(const StripeTask& task = {});

/// `count` items with alternating labels, generated from `seed`. Values are
/// single-precision representable and lie in [0, 1].
std::vector<LabeledImage> stripe_dataset(std::size_t count, std::uint64_t seed, const StripeTask& task = {});

/// Random dense network with ReLU hidden layers and softmax output; used to
/// test the inference engine and as a transfer target.
ModelSpec random_mlp(const Shape& input, std::size_t num_classes, std::vector<std::size_t> hidden,
                     std::uint64_t seed, double weight_scale = 0.5);

/// Uniform random image with single-precision representable values.
Image random_image(const Shape& shape, std::uint64_t seed);

/// Writes `<dir>/model.json` and a PNG dataset under `<dir>/data`
/// (img_NNNNN.png plus labels.csv) for the stripe task.
void write_stripe_fixture(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed,
                          const StripeTask& task = {});

}  // namespace stba::fixtures
