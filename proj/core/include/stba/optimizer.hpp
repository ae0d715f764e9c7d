#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stba/image.hpp"
#include "stba/oracle.hpp"
#include "stba/rng.hpp"
#include "stba/warp.hpp"

namespace stba {

/// Which part of the image the flow field displaces.
enum class ApplyTo { high_frequency, low_frequency, full_image };

std::string to_string(ApplyTo a);
ApplyTo parse_apply_to(const std::string& s);

struct AttackConfig {
  std::size_t q_max = 1000;
  std::size_t n_sample = 10;
  double lr = 0.1;
  double sigma = 0.2;  // 2 * lr
  double lambda = 5.0;
  double xi_init = 0.1;
  double xi_max = 3.0;
  std::size_t adjust_num = 20;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  ApplyTo apply_to = ApplyTo::high_frequency;
  /// Spread the budget increments over T / adjust_num updates so that
  /// xi_max is reachable; off by default (increment from T alone).
  bool rescale_alpha = false;
  /// Initial mean is drawn from N(0, (mu_init_scale * xi_init)^2).
  double mu_init_scale = 0.1;
};

/// Throws stba::Error naming the first violated constraint.
void validate(const AttackConfig& cfg);

// -- objective ---------------------------------------------------------------

/// max(scores[y] - max_{k != y} scores[k], kappa).
double adversarial_margin_loss(const ScoreVector& scores, std::size_t label, double kappa);

struct LossTerms {
  double total = 0.0;
  double adversarial = 0.0;
  double flow = 0.0;
};

/// adversarial margin + lambda * flow smoothness.
LossTerms total_loss(const ScoreVector& scores, std::size_t label, const FlowField& flow, const AttackConfig& cfg);

// -- budget schedule ---------------------------------------------------------

struct ScheduleState {
  std::size_t t = 0;
  double xi = 0.0;
  double alpha = 0.0;
  std::size_t t_total = 0;    // T = floor(q_max / n_sample)
  double steps_to_max = 0.0;  // t at which xi reaches xi_max
  double xi_init = 0.0;
  double xi_max = 0.0;
};

ScheduleState make_schedule(const AttackConfig& cfg);
/// t + 1; xi = min(xi_init + t * alpha, xi_max).
ScheduleState schedule_step(const ScheduleState& s);

// -- search distribution -----------------------------------------------------

struct SamplerState {
  FlowField mu;
  double sigma = 0.0;
  Rng rng;
};

struct FlowSample {
  FlowField flow;   // mu + sigma * noise
  FlowField noise;  // standard normal draw
};

/// Draws `n` perturbations of the mean, element by element in flat
/// parameter order, and advances the generator.
std::vector<FlowSample> sample_flows(SamplerState& state, std::size_t n);

/// Normalizes the losses (population std, floored at 1e-12) and returns
/// (1/n) * sum_k normalized_k * noise_k.
FlowField nes_gradient(std::span<const double> losses, std::span<const FlowField> noise);
FlowField nes_gradient(std::span<const double> losses, std::span<const FlowSample> samples);

// -- attack ------------------------------------------------------------------

enum class AttackStatus { completed, transport_error };

struct LossRecord {
  std::size_t iteration = 0;
  double total = 0.0;
  double adversarial = 0.0;
  double flow = 0.0;
};

struct BudgetRecord {
  std::size_t iteration = 0;
  double xi = 0.0;
};

struct AttackResult {
  bool success = false;
  std::size_t queries_used = 0;
  std::size_t iterations = 0;
  Image adversarial;
  FlowField final_flow;
  std::vector<LossRecord> loss_trace;  // evaluated at each success check
  std::vector<BudgetRecord> xi_trace;  // budget in force at each success check
  double psnr = 0.0;
  double ssim = 0.0;
  AttackStatus status = AttackStatus::completed;
  std::string error;
};

/// Query-limited spatial-transform attack.
///
/// The image is split once into high/low frequency parts; the flow field
/// acts on the part selected by `cfg.apply_to` and the other part is added
/// back unchanged. Each iteration spends `n_sample` queries scoring clipped
/// candidate flows, takes one normalized NES step on the mean, advances the
/// budget every `adjust_num` iterations, and spends one more query checking
/// whether the clipped mean already fools the oracle. An iteration is only
/// started if all `n_sample + 1` queries fit in `q_max`.
///
/// Shape mismatches throw before any query. Transport failures end the
/// attack with status `transport_error` and the trace so far.
AttackResult run_attack(const Oracle& oracle, const LabeledImage& item, const AttackConfig& cfg);

}  // namespace stba
