#include "stba/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "stba/error.hpp"
#include "stba/quality.hpp"

namespace stba {

std::string to_string(ApplyTo a) {
  switch (a) {
    case ApplyTo::high_frequency: return "high";
    case ApplyTo::low_frequency: return "low";
    case ApplyTo::full_image: return "full";
  }
  return "high";
}

ApplyTo parse_apply_to(const std::string& s) {
  if (s == "high" || s == "high_frequency") return ApplyTo::high_frequency;
  if (s == "low" || s == "low_frequency") return ApplyTo::low_frequency;
  if (s == "full" || s == "full_image") return ApplyTo::full_image;
  throw Error("apply-to must be one of high|low|full, got '" + s + "'");
}

void validate(const AttackConfig& cfg) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("invalid attack config: ") + what);
  };
  require(cfg.n_sample >= 2, "n_sample must be >= 2");
  require(cfg.q_max >= cfg.n_sample, "q_max must be >= n_sample");
  require(cfg.lr > 0.0 && std::isfinite(cfg.lr), "lr must be > 0");
  require(cfg.sigma > 0.0 && std::isfinite(cfg.sigma), "sigma must be > 0");
  require(cfg.lambda >= 0.0 && std::isfinite(cfg.lambda), "lambda must be >= 0");
  require(cfg.xi_init >= 0.0 && std::isfinite(cfg.xi_init), "xi_init must be >= 0");
  require(cfg.xi_max >= cfg.xi_init && std::isfinite(cfg.xi_max), "xi_max must be >= xi_init");
  require(cfg.adjust_num >= 1, "adjust_num must be >= 1");
  require(std::isfinite(cfg.kappa), "kappa must be finite");
  require(cfg.mu_init_scale >= 0.0 && std::isfinite(cfg.mu_init_scale), "mu_init_scale must be >= 0");
}

double adversarial_margin_loss(const ScoreVector& scores, std::size_t label, double kappa) {
  if (scores.size() < 2) throw Error("margin loss needs at least two scores");
  if (label >= scores.size()) {
    throw Error("label " + std::to_string(label) + " out of range for " + std::to_string(scores.size()) + " classes");
  }
  double best_other = -INFINITY;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (k != label) best_other = std::max(best_other, scores[k]);
  }
  return std::max(scores[label] - best_other, kappa);
}

LossTerms total_loss(const ScoreVector& scores, std::size_t label, const FlowField& flow, const AttackConfig& cfg) {
  LossTerms terms;
  terms.adversarial = adversarial_margin_loss(scores, label, cfg.kappa);
  terms.flow = flow_smoothness_loss(flow);
  terms.total = terms.adversarial + cfg.lambda * terms.flow;
  return terms;
}

ScheduleState make_schedule(const AttackConfig& cfg) {
  ScheduleState s;
  s.t_total = cfg.q_max / cfg.n_sample;
  s.xi_init = cfg.xi_init;
  s.xi_max = cfg.xi_max;
  s.xi = cfg.xi_init;
  s.steps_to_max = static_cast<double>(s.t_total);
  if (cfg.rescale_alpha) s.steps_to_max /= static_cast<double>(cfg.adjust_num);
  s.alpha = (cfg.xi_max - cfg.xi_init) / s.steps_to_max;
  return s;
}

ScheduleState schedule_step(const ScheduleState& s) {
  ScheduleState next = s;
  ++next.t;
  if (static_cast<double>(next.t) >= next.steps_to_max) {
    next.xi = next.xi_max;
  } else {
    next.xi = std::min(next.xi_init + static_cast<double>(next.t) * next.alpha, next.xi_max);
  }
  return next;
}

std::vector<FlowSample> sample_flows(SamplerState& state, std::size_t n) {
  std::vector<FlowSample> samples;
  samples.reserve(n);
  const std::size_t h = state.mu.height();
  const std::size_t w = state.mu.width();
  for (std::size_t k = 0; k < n; ++k) {
    FlowSample s{FlowField(h, w), FlowField(h, w)};
    for (std::size_t i = 0; i < state.mu.size(); ++i) {
      const double eps = state.rng.normal();
      s.noise[i] = eps;
      s.flow[i] = state.mu[i] + state.sigma * eps;
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

FlowField nes_gradient(std::span<const double> losses, std::span<const FlowField> noise) {
  if (losses.size() != noise.size()) {
    throw Error("nes_gradient: " + std::to_string(losses.size()) + " losses for " + std::to_string(noise.size()) +
                " noise draws");
  }
  if (losses.size() < 2) throw Error("nes_gradient needs at least two samples");
  const double n = static_cast<double>(losses.size());
  double mean = 0.0;
  for (double l : losses) mean += l;
  mean /= n;
  double var = 0.0;
  for (double l : losses) var += (l - mean) * (l - mean);
  const double stddev = std::sqrt(var / n);

  FlowField grad(noise.front().height(), noise.front().width());
  if (stddev < 1e-12) return grad;
  for (std::size_t k = 0; k < losses.size(); ++k) {
    if (noise[k].height() != grad.height() || noise[k].width() != grad.width()) {
      throw ShapeError("nes_gradient: noise fields differ in shape");
    }
    const double weight = (losses[k] - mean) / stddev;
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += weight * noise[k][i];
  }
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] /= n;
  return grad;
}

FlowField nes_gradient(std::span<const double> losses, std::span<const FlowSample> samples) {
  std::vector<FlowField> noise;
  noise.reserve(samples.size());
  for (const FlowSample& s : samples) noise.push_back(s.noise);
  return nes_gradient(losses, noise);
}

namespace {

/// The warped component and the component added back unchanged.
struct Decomposition {
  Image target;
  Image rest;
};

Decomposition decompose(const Image& x, ApplyTo apply_to) {
  switch (apply_to) {
    case ApplyTo::high_frequency: {
      auto [high, low] = frequency_split(x);
      return {std::move(high), std::move(low)};
    }
    case ApplyTo::low_frequency: {
      auto [high, low] = frequency_split(x);
      return {std::move(low), std::move(high)};
    }
    case ApplyTo::full_image:
      return {x, Image(x.shape(), 0.0)};
  }
  return {x, Image(x.shape(), 0.0)};
}

}  // namespace

AttackResult run_attack(const Oracle& oracle, const LabeledImage& item, const AttackConfig& cfg) {
  validate(cfg);
  const OracleInfo& info = oracle.info();
  check_input_shape(info, item.image);
  if (item.label < 0 || static_cast<std::size_t>(item.label) >= info.num_classes) {
    throw Error("label " + std::to_string(item.label) + " out of range for " + std::to_string(info.num_classes) +
                " classes");
  }
  const auto label = static_cast<std::size_t>(item.label);
  const Image& x = item.image;
  const std::size_t height = x.height();
  const std::size_t width = x.width();

  const Decomposition parts = decompose(x, cfg.apply_to);
  // Queried images are rounded to single precision, the precision of the
  // wire format and of serialized results.
  auto build = [&](const FlowField& flow) {
    Image img = recompose(apply_flow(parts.target, flow), parts.rest);
    for (double& v : img.data()) v = static_cast<double>(static_cast<float>(v));
    return img;
  };

  Rng root(cfg.seed);
  Rng init_rng = root.split(0);
  SamplerState sampler{FlowField(height, width), cfg.sigma, root.split(1)};
  const double mu_std = cfg.mu_init_scale * cfg.xi_init;
  for (std::size_t i = 0; i < sampler.mu.size(); ++i) sampler.mu[i] = mu_std * init_rng.normal();
  const FlowField offset(height, width);

  ScheduleState schedule = make_schedule(cfg);
  CountedOracle counted(oracle, cfg.q_max);

  AttackResult result;
  result.adversarial = x;
  result.final_flow = FlowField(height, width);

  const std::size_t per_iteration = cfg.n_sample + 1;
  std::vector<double> losses(cfg.n_sample);
  try {
    while (counted.counter().remaining() >= per_iteration) {
      ++result.iterations;
      const FlowBudget budget(schedule.xi);
      const auto samples = sample_flows(sampler, cfg.n_sample);
      for (std::size_t k = 0; k < samples.size(); ++k) {
        const FlowField flow = clip_flow(samples[k].flow, budget);
        losses[k] = total_loss(counted.predict(build(flow)), label, flow, cfg).total;
      }
      const FlowField grad = nes_gradient(losses, samples);
      for (std::size_t i = 0; i < sampler.mu.size(); ++i) sampler.mu[i] -= cfg.lr * grad[i];

      if (result.iterations % cfg.adjust_num == 0) schedule = schedule_step(schedule);

      FlowField current = sampler.mu;
      for (std::size_t i = 0; i < current.size(); ++i) current[i] += offset[i];
      current = clip_flow(current, FlowBudget(schedule.xi));
      Image candidate = build(current);
      const ScoreVector scores = counted.predict(candidate);
      const LossTerms terms = total_loss(scores, label, current, cfg);
      result.loss_trace.push_back({result.iterations, terms.total, terms.adversarial, terms.flow});
      result.xi_trace.push_back({result.iterations, schedule.xi});
      result.adversarial = std::move(candidate);
      result.final_flow = std::move(current);
      if (argmax(scores) != label) {
        result.success = true;
        break;
      }
    }
  } catch (const TransportError& e) {
    result.status = AttackStatus::transport_error;
    result.error = e.what();
  } catch (const BudgetExhausted& e) {
    result.error = e.what();
  }
  result.queries_used = counted.counter().used();
  result.psnr = psnr(x, result.adversarial);
  result.ssim = ssim(x, result.adversarial);
  return result;
}

}  // namespace stba
