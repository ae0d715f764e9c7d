#include <benchmark/benchmark.h>

#include "stba/fixtures.hpp"
#include "stba/harness.hpp"
#include "stba/model.hpp"
#include "stba/optimizer.hpp"
#include "stba/quality.hpp"
#include "stba/rng.hpp"
#include "stba/warp.hpp"

using namespace stba;

namespace {

Shape square(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  return Shape{3, side, side};
}

FlowField random_flow(std::size_t h, std::size_t w, double scale) {
  Rng rng(1);
  FlowField f(h, w);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = scale * rng.normal();
  return f;
}

void BM_Blur(benchmark::State& state) {
  const Image img = fixtures::random_image(square(state), 1);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_blur3(img));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_Blur)->Arg(8)->Arg(32)->Arg(224);

void BM_ApplyFlow(benchmark::State& state) {
  const Shape s = square(state);
  const Image img = fixtures::random_image(s, 1);
  const FlowField f = random_flow(s.height, s.width, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(apply_flow(img, f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_ApplyFlow)->Arg(8)->Arg(32)->Arg(224);

void BM_FlowLoss(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const FlowField f = random_flow(side, side, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(flow_smoothness_loss(f));
}
BENCHMARK(BM_FlowLoss)->Arg(32)->Arg(224);

void BM_Ssim(benchmark::State& state) {
  const Image a = fixtures::random_image(square(state), 1);
  const Image b = fixtures::random_image(square(state), 2);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(32)->Arg(224);

void BM_NesGradient(benchmark::State& state) {
  SamplerState sampler{FlowField(32, 32), 0.2, Rng(3)};
  const auto samples = sample_flows(sampler, static_cast<std::size_t>(state.range(0)));
  std::vector<double> losses;
  for (std::size_t k = 0; k < samples.size(); ++k) losses.push_back(static_cast<double>(k % 7));
  for (auto _ : state) benchmark::DoNotOptimize(nes_gradient(losses, samples));
}
BENCHMARK(BM_NesGradient)->Arg(10)->Arg(50);

void BM_MlpPredict(benchmark::State& state) {
  const Shape s{3, 32, 32};
  const MlpModel model(fixtures::random_mlp(s, 10, {256, 64}, 4));
  const Image img = fixtures::random_image(s, 5);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(img));
}
BENCHMARK(BM_MlpPredict);

void BM_FixtureAttack(benchmark::State& state) {
  const MlpModel model(fixtures::stripe_model());
  const auto items = fixtures::stripe_dataset(8, 7);
  AttackConfig cfg;
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_attack(model, items[i++ % items.size()], cfg));
}
BENCHMARK(BM_FixtureAttack)->Unit(benchmark::kMillisecond);

void BM_FixtureCampaign(benchmark::State& state) {
  const MlpModel model(fixtures::stripe_model());
  const auto items = fixtures::stripe_dataset(50, 7);
  CampaignConfig cfg;
  cfg.max_items = items.size();
  cfg.workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_campaign(cfg, model, items));
}
BENCHMARK(BM_FixtureCampaign)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
