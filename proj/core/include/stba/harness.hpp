#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stba/image.hpp"
#include "stba/optimizer.hpp"
#include "stba/oracle.hpp"

namespace stba {

struct CampaignConfig {
  std::string dataset;  // "cifar10:<file>" or "pngdir:<dir>"
  std::string oracle;   // "json:<weights file>" or "http:<url>"
  AttackConfig attack;
  std::size_t max_items = 1;
  std::filesystem::path output_dir;
  bool save_adversarials = false;
  std::size_t workers = 1;
};

struct ItemSummary {
  std::size_t index = 0;
  int label = 0;
  bool skipped = false;  // misclassified when clean
  bool success = false;
  std::size_t queries_used = 0;
  std::size_t iterations = 0;
  double psnr = 0.0;
  double ssim = 0.0;
  AttackStatus status = AttackStatus::completed;
  std::string error;
  std::string adversarial_file;  // path stem under the report directory (.png / .json), if saved
  std::optional<AttackResult> result;  // kept when adversarials are saved
};

struct CampaignReport {
  std::size_t items_attempted = 0;
  std::size_t items_skipped_misclassified = 0;
  std::size_t items_failed = 0;  // transport failures
  std::size_t successes = 0;
  std::size_t precheck_queries = 0;
  std::size_t q_max = 0;
  double asr = 0.0;
  std::optional<double> avg_q;  // over successes only
  std::optional<double> med_q;  // lower median over successes
  std::optional<double> mean_psnr;
  std::optional<double> mean_ssim;
  std::vector<ItemSummary> per_item;
  std::vector<std::string> load_issues;  // dataset files that were skipped
};

/// Seed used for item `index` of a campaign seeded with `seed`.
std::uint64_t item_seed(std::uint64_t seed, std::size_t index);

/// Resolves "json:<path>" or "http:<url>" to a scorer.
std::unique_ptr<Oracle> make_oracle(const std::string& descriptor);

/// Resolves "cifar10:<file>" or "pngdir:<dir>". Per-file PNG problems are
/// appended to `issues` when given.
std::vector<LabeledImage> load_dataset(const std::string& descriptor, std::size_t num_classes,
                                       std::vector<std::string>* issues = nullptr);

/// Attacks up to `cfg.max_items` items. Each item first gets one clean
/// query outside the attack budget; misclassified items are skipped and
/// tallied. Aggregates are filled from the per-item results. Nothing is
/// written to disk; full attack results are kept in the summaries when
/// `cfg.save_adversarials` is set.
CampaignReport run_campaign(const CampaignConfig& cfg, const Oracle& oracle, std::span<const LabeledImage> items);

/// Resolves the descriptors, runs the campaign and writes report.json,
/// per_item.csv and (optionally) adversarial PNG + JSON files to
/// `cfg.output_dir`.
CampaignReport run_campaign(const CampaignConfig& cfg);

/// Fills asr / avg_q / med_q / mean quality from `per_item`.
void aggregate(CampaignReport& report);

std::string report_to_json(const CampaignReport& report, const CampaignConfig& cfg);
std::string per_item_csv(const CampaignReport& report);
void write_report(const CampaignReport& report, const CampaignConfig& cfg);

/// Reads report.json and any saved adversarial results from `dir`.
CampaignReport load_report(const std::filesystem::path& dir);

struct TransferResult {
  std::size_t evaluated = 0;   // source successes scored on the target
  std::size_t transferred = 0;
  double fraction = 0.0;
};

/// Scores every source-successful adversarial once on `target`; an item
/// transfers when the target's argmax differs from the true label. Throws
/// if a successful item has no saved adversarial image.
TransferResult transfer_check(const CampaignReport& source, const Oracle& target);

/// CSV `query_budget,asr` sampling the empirical success curve at budgets
/// 50, 100, ... up to q_max (q_max itself appended when not a multiple).
std::string emit_plot_data(const CampaignReport& report);

}  // namespace stba
