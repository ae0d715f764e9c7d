#pragma once

#include <string>
#include <string_view>

#include "stba/image.hpp"
#include "stba/oracle.hpp"

namespace stba::wire {

/// Body of `POST /v1/scores`: {"shape":[C,H,W],"data":[...]} with every
/// value rounded to single precision.
std::string encode_scores_request(const Image& img);
/// Throws FormatError on a malformed body or a data length/shape mismatch.
Image decode_scores_request(std::string_view body);

std::string encode_scores_response(const ScoreVector& scores);
ScoreVector decode_scores_response(std::string_view body);

std::string encode_meta(const OracleInfo& info);
OracleInfo decode_meta(std::string_view body);

std::string encode_error(std::string_view message);

}  // namespace stba::wire
