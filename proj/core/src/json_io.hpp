#pragma once

// nlohmann/json helpers shared by the serializers; not installed.

#include "json.hpp"
#include "stba/image.hpp"
#include "stba/optimizer.hpp"
#include "stba/warp.hpp"

namespace stba::detail {

nlohmann::json real_to_json(double v);
double real_from_json(const nlohmann::json& j);

nlohmann::json image_to_json(const Image& img);
Image image_from_json(const nlohmann::json& j);

nlohmann::json flow_to_json(const FlowField& flow);
FlowField flow_from_json(const nlohmann::json& j);

nlohmann::json attack_config_to_json(const AttackConfig& cfg);

nlohmann::json attack_result_to_json(const AttackResult& result);
AttackResult attack_result_from_json(const nlohmann::json& j);

}  // namespace stba::detail
