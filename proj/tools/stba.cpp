// stba: command-line front end for campaigns, transfer checks and ASR curves.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "stba/fixtures.hpp"
#include "stba/harness.hpp"
#include "stba/serialize.hpp"

namespace {

void print_summary(const stba::CampaignReport& report) {
  auto opt = [](const std::optional<double>& v) { return v ? stba::format_real(*v) : std::string("null"); };
  std::printf("attempted=%zu skipped=%zu failed=%zu successes=%zu asr=%s avg_q=%s med_q=%s psnr=%s ssim=%s\n",
              report.items_attempted, report.items_skipped_misclassified, report.items_failed, report.successes,
              stba::format_real(report.asr).c_str(), opt(report.avg_q).c_str(), opt(report.med_q).c_str(),
              opt(report.mean_psnr).c_str(), opt(report.mean_ssim).c_str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw stba::Error("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial-transform black-box attack toolkit"};
  app.require_subcommand(1);

  stba::CampaignConfig campaign;
  std::string apply_to = "high";
  auto* attack = app.add_subcommand("attack", "Run an attack campaign and write report.json / per_item.csv");
  attack->add_option("--dataset", campaign.dataset, "cifar10:<file> or pngdir:<dir>")->required();
  attack->add_option("--model", campaign.oracle, "json:<weights file> or http:<url>")->required();
  attack->add_option("--qmax", campaign.attack.q_max, "Query budget per item")->capture_default_str();
  attack->add_option("--nsample", campaign.attack.n_sample, "Samples per iteration")->capture_default_str();
  attack->add_option("--lr", campaign.attack.lr, "Learning rate")->capture_default_str();
  auto* sigma_opt = attack->add_option("--sigma", campaign.attack.sigma, "Sampling std (default 2*lr)");
  attack->add_option("--lambda", campaign.attack.lambda, "Flow smoothness weight")->capture_default_str();
  attack->add_option("--xi-init", campaign.attack.xi_init, "Initial flow budget (pixels)")->capture_default_str();
  attack->add_option("--xi-max", campaign.attack.xi_max, "Maximum flow budget (pixels)")->capture_default_str();
  attack->add_option("--adjust-num", campaign.attack.adjust_num, "Iterations between budget updates")
      ->capture_default_str();
  attack->add_option("--kappa", campaign.attack.kappa, "Margin floor")->capture_default_str();
  attack->add_option("--seed", campaign.attack.seed, "Campaign seed")->capture_default_str();
  attack->add_option("--apply-to", apply_to, "Band the flow displaces")
      ->check(CLI::IsMember({"high", "low", "full"}))
      ->capture_default_str();
  attack->add_flag("--rescale-alpha", campaign.attack.rescale_alpha,
                   "Spread budget increments so xi-max is reachable");
  attack->add_option("--max-items", campaign.max_items, "Number of dataset items to consider")->required();
  attack->add_option("--out", campaign.output_dir, "Output directory")->required();
  attack->add_flag("--save-adversarials", campaign.save_adversarials, "Write adversarial PNG + JSON per item");
  attack->add_option("--workers", campaign.workers, "Parallel attack workers")->capture_default_str();

  std::filesystem::path report_dir;
  std::string target;
  auto* transfer = app.add_subcommand("transfer", "Score saved adversarials on another model");
  transfer->add_option("--report", report_dir, "Campaign output directory")->required();
  transfer->add_option("--target", target, "json:<weights file> or http:<url>")->required();

  auto* curve = app.add_subcommand("curve", "Write the ASR-vs-query-budget curve (curve.csv)");
  curve->add_option("--report", report_dir, "Campaign output directory")->required();

  std::filesystem::path fixture_dir;
  std::size_t fixture_count = 50;
  std::uint64_t fixture_seed = 7;
  auto* fixture = app.add_subcommand("fixture", "Write the synthetic stripe model and PNG dataset");
  fixture->add_option("--out", fixture_dir, "Output directory")->required();
  fixture->add_option("--count", fixture_count, "Number of images")->capture_default_str();
  fixture->add_option("--seed", fixture_seed, "Dataset seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*attack) {
      campaign.attack.apply_to = stba::parse_apply_to(apply_to);
      if (sigma_opt->count() == 0) campaign.attack.sigma = 2.0 * campaign.attack.lr;
      const auto report = stba::run_campaign(campaign);
      print_summary(report);
    } else if (*transfer) {
      const auto source = stba::load_report(report_dir);
      const auto oracle = stba::make_oracle(target);
      const auto result = stba::transfer_check(source, *oracle);
      std::printf("evaluated=%zu transferred=%zu fraction=%s\n", result.evaluated, result.transferred,
                  stba::format_real(result.fraction).c_str());
    } else if (*curve) {
      const auto csv = stba::emit_plot_data(stba::load_report(report_dir));
      write_text(report_dir / "curve.csv", csv);
      std::fputs(csv.c_str(), stdout);
    } else if (*fixture) {
      stba::fixtures::write_stripe_fixture(fixture_dir, fixture_count, fixture_seed);
      std::printf("wrote %s and %zu images under %s\n", (fixture_dir / "model.json").c_str(), fixture_count,
                  (fixture_dir / "data").c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "stba: %s\n", e.what());
    return 1;
  }
  return 0;
}
