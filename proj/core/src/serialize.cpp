#include "stba/serialize.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "json_io.hpp"
#include "stba/error.hpp"

namespace stba {
namespace {

using nlohmann::json;

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

std::vector<std::uint8_t> floats_to_le_bytes(std::span<const double> values) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(values.size() * 4);
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int shift = 0; shift < 32; shift += 8) bytes.push_back(static_cast<std::uint8_t>(bits >> shift));
  }
  return bytes;
}

std::vector<double> le_bytes_to_floats(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 4 != 0) throw FormatError("float32 payload length is not a multiple of 4");
  std::vector<double> values;
  values.reserve(bytes.size() / 4);
  for (std::size_t i = 0; i < bytes.size(); i += 4) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[i + b]) << (8 * b);
    values.push_back(static_cast<double>(std::bit_cast<float>(bits)));
  }
  return values;
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t n = bytes[i] << 16;
    if (rest == 2) n |= bytes[i + 1] << 8;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += rest == 2 ? kAlphabet[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw FormatError("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    std::array<int, 4> v{};
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && last && k >= 2) {
        ++pad;
        v[k] = 0;
        continue;
      }
      if (pad > 0 || (v[k] = decode_char(c)) < 0) throw FormatError("invalid base64 input");
    }
    const std::uint32_t n = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(n >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(n));
  }
  return out;
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return json(v).dump();
}

namespace detail {

json real_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

double real_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j == "inf") return std::numeric_limits<double>::infinity();
  if (j == "-inf") return -std::numeric_limits<double>::infinity();
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  throw FormatError("expected a number");
}

json image_to_json(const Image& img) {
  return {{"shape", {img.channels(), img.height(), img.width()}}, {"data", base64_encode(floats_to_le_bytes(img.data()))}};
}

Image image_from_json(const json& j) {
  const json& shape = field(j, "shape");
  if (!shape.is_array() || shape.size() != 3) throw FormatError("image shape must be [C,H,W]");
  const Shape s{shape[0].get<std::size_t>(), shape[1].get<std::size_t>(), shape[2].get<std::size_t>()};
  return Image(s, le_bytes_to_floats(base64_decode(field(j, "data").get<std::string>())));
}

json flow_to_json(const FlowField& flow) {
  return {{"height", flow.height()},
          {"width", flow.width()},
          {"du", std::vector<double>(flow.du().begin(), flow.du().end())},
          {"dv", std::vector<double>(flow.dv().begin(), flow.dv().end())}};
}

FlowField flow_from_json(const json& j) {
  return FlowField(field(j, "height").get<std::size_t>(), field(j, "width").get<std::size_t>(),
                   field(j, "du").get<std::vector<double>>(), field(j, "dv").get<std::vector<double>>());
}

json attack_config_to_json(const AttackConfig& cfg) {
  return {{"q_max", cfg.q_max},
          {"n_sample", cfg.n_sample},
          {"lr", cfg.lr},
          {"sigma", cfg.sigma},
          {"lambda", cfg.lambda},
          {"xi_init", cfg.xi_init},
          {"xi_max", cfg.xi_max},
          {"adjust_num", cfg.adjust_num},
          {"kappa", cfg.kappa},
          {"seed", cfg.seed},
          {"apply_to", to_string(cfg.apply_to)},
          {"rescale_alpha", cfg.rescale_alpha},
          {"mu_init_scale", cfg.mu_init_scale}};
}

json attack_result_to_json(const AttackResult& r) {
  json loss = json::array();
  for (const LossRecord& l : r.loss_trace) loss.push_back({l.iteration, l.total, l.adversarial, l.flow});
  json xi = json::array();
  for (const BudgetRecord& b : r.xi_trace) xi.push_back({b.iteration, b.xi});
  return {{"success", r.success},
          {"queries_used", r.queries_used},
          {"iterations", r.iterations},
          {"status", r.status == AttackStatus::completed ? "completed" : "transport_error"},
          {"error", r.error},
          {"psnr", real_to_json(r.psnr)},
          {"ssim", real_to_json(r.ssim)},
          {"adversarial", image_to_json(r.adversarial)},
          {"final_flow", flow_to_json(r.final_flow)},
          {"loss_trace", std::move(loss)},
          {"xi_trace", std::move(xi)}};
}

AttackResult attack_result_from_json(const json& j) {
  AttackResult r;
  r.success = field(j, "success").get<bool>();
  r.queries_used = field(j, "queries_used").get<std::size_t>();
  r.iterations = field(j, "iterations").get<std::size_t>();
  r.status = field(j, "status") == "completed" ? AttackStatus::completed : AttackStatus::transport_error;
  r.error = field(j, "error").get<std::string>();
  r.psnr = real_from_json(field(j, "psnr"));
  r.ssim = real_from_json(field(j, "ssim"));
  r.adversarial = image_from_json(field(j, "adversarial"));
  r.final_flow = flow_from_json(field(j, "final_flow"));
  for (const json& row : field(j, "loss_trace")) {
    r.loss_trace.push_back({row.at(0).get<std::size_t>(), row.at(1).get<double>(), row.at(2).get<double>(),
                            row.at(3).get<double>()});
  }
  for (const json& row : field(j, "xi_trace")) {
    r.xi_trace.push_back({row.at(0).get<std::size_t>(), row.at(1).get<double>()});
  }
  return r;
}

}  // namespace detail

std::string attack_result_to_json(const AttackResult& result) { return detail::attack_result_to_json(result).dump(); }

AttackResult attack_result_from_json(std::string_view text) {
  try {
    return detail::attack_result_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw FormatError(std::string("attack result: ") + e.what());
  }
}

}  // namespace stba
