#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stba/image.hpp"
#include "stba/optimizer.hpp"
#include "stba/warp.hpp"

namespace stba {

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws FormatError on characters outside the standard alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// AttackResult as JSON. Scalars are written verbatim (an infinite PSNR as
/// the string "inf"); images as {"shape":[C,H,W],"data":<base64 of
/// little-endian float32>}; the flow as two row-major H x W arrays; traces
/// as arrays of [iteration, value...] rows.
std::string attack_result_to_json(const AttackResult& result);
AttackResult attack_result_from_json(std::string_view json);

/// "inf" / "-inf" for infinities, otherwise the shortest round-trip form.
std::string format_real(double v);

}  // namespace stba
