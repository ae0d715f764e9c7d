#include "stba/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json_io.hpp"
#include "stba/dataset.hpp"
#include "stba/error.hpp"
#include "stba/http_oracle.hpp"
#include "stba/model.hpp"
#include "stba/rng.hpp"
#include "stba/serialize.hpp"

namespace stba {
namespace {

using nlohmann::json;

constexpr const char* kAdversarialDir = "adversarials";

std::pair<std::string, std::string> split_descriptor(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == descriptor.size()) {
    throw Error("expected <kind>:<location>, got '" + descriptor + "'");
  }
  return {descriptor.substr(0, colon), descriptor.substr(colon + 1)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::string item_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "item_%05zu", index);
  return buf;
}

std::string status_name(AttackStatus s) { return s == AttackStatus::completed ? "completed" : "transport_error"; }

json optional_real(const std::optional<double>& v) { return v ? detail::real_to_json(*v) : json(nullptr); }

ItemSummary attack_item(const Oracle& oracle, const LabeledImage& item, std::size_t index, const CampaignConfig& cfg) {
  ItemSummary summary;
  summary.index = index;
  summary.label = item.label;
  try {
    const ScoreVector clean = oracle.predict(item.image);
    if (argmax(clean) != static_cast<std::size_t>(item.label)) {
      summary.skipped = true;
      return summary;
    }
  } catch (const TransportError& e) {
    summary.status = AttackStatus::transport_error;
    summary.error = e.what();
    return summary;
  }

  AttackConfig attack = cfg.attack;
  attack.seed = item_seed(cfg.attack.seed, index);
  AttackResult result = run_attack(oracle, item, attack);
  summary.success = result.success;
  summary.queries_used = result.queries_used;
  summary.iterations = result.iterations;
  summary.psnr = result.psnr;
  summary.ssim = result.ssim;
  summary.status = result.status;
  summary.error = result.error;
  if (cfg.save_adversarials) {
    summary.adversarial_file = std::string(kAdversarialDir) + "/" + item_stem(index);
    summary.result = std::move(result);
  }
  return summary;
}

}  // namespace

std::uint64_t item_seed(std::uint64_t seed, std::size_t index) { return Rng(seed).split(index).seed(); }

std::unique_ptr<Oracle> make_oracle(const std::string& descriptor) {
  const auto [kind, location] = split_descriptor(descriptor);
  if (kind == "json") return std::make_unique<MlpModel>(load_model_spec_file(location));
  if (kind == "http") return std::make_unique<HttpOracle>(location);
  throw Error("unknown model kind '" + kind + "' (expected json or http)");
}

std::vector<LabeledImage> load_dataset(const std::string& descriptor, std::size_t num_classes,
                                       std::vector<std::string>* issues) {
  const auto [kind, location] = split_descriptor(descriptor);
  if (kind == "cifar10") return load_cifar10_file(location);
  if (kind == "pngdir") {
    PngDirectory dir = load_png_dir(location, static_cast<int>(num_classes));
    if (issues) {
      for (const LoadIssue& issue : dir.issues) issues->push_back(issue.file + ": " + issue.message);
    }
    return std::move(dir.items);
  }
  throw Error("unknown dataset kind '" + kind + "' (expected cifar10 or pngdir)");
}

void aggregate(CampaignReport& report) {
  report.items_attempted = 0;
  report.items_skipped_misclassified = 0;
  report.items_failed = 0;
  report.successes = 0;
  std::vector<std::size_t> queries;
  double psnr_sum = 0.0;
  double ssim_sum = 0.0;
  for (const ItemSummary& item : report.per_item) {
    if (item.skipped) {
      ++report.items_skipped_misclassified;
      continue;
    }
    ++report.items_attempted;
    if (item.status != AttackStatus::completed) ++report.items_failed;
    if (!item.success) continue;
    ++report.successes;
    queries.push_back(item.queries_used);
    psnr_sum += item.psnr;
    ssim_sum += item.ssim;
  }
  report.asr = report.items_attempted == 0
                   ? 0.0
                   : static_cast<double>(report.successes) / static_cast<double>(report.items_attempted);
  report.avg_q.reset();
  report.med_q.reset();
  report.mean_psnr.reset();
  report.mean_ssim.reset();
  if (queries.empty()) return;
  const double n = static_cast<double>(queries.size());
  double total = 0.0;
  for (std::size_t q : queries) total += static_cast<double>(q);
  report.avg_q = total / n;
  std::sort(queries.begin(), queries.end());
  report.med_q = static_cast<double>(queries[(queries.size() - 1) / 2]);
  report.mean_psnr = psnr_sum / n;
  report.mean_ssim = ssim_sum / n;
}

CampaignReport run_campaign(const CampaignConfig& cfg, const Oracle& oracle, std::span<const LabeledImage> items) {
  validate(cfg.attack);
  if (cfg.max_items < 1) throw Error("max_items must be >= 1");
  const std::size_t count = std::min(cfg.max_items, items.size());

  CampaignReport report;
  report.q_max = cfg.attack.q_max;
  report.per_item.resize(count);

  std::size_t workers = std::max<std::size_t>(1, cfg.workers);
  if (!oracle.concurrent_safe()) workers = 1;
  workers = std::min(workers, std::max<std::size_t>(1, count));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        report.per_item[i] = attack_item(oracle, items[i], i, cfg);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  report.precheck_queries = count;
  aggregate(report);
  return report;
}

CampaignReport run_campaign(const CampaignConfig& cfg) {
  const auto oracle = make_oracle(cfg.oracle);
  std::vector<std::string> issues;
  const auto items = load_dataset(cfg.dataset, oracle->info().num_classes, &issues);
  for (const std::string& issue : issues) std::fprintf(stderr, "warning: %s\n", issue.c_str());
  CampaignReport report = run_campaign(cfg, *oracle, items);
  report.load_issues = std::move(issues);
  write_report(report, cfg);
  return report;
}

std::string report_to_json(const CampaignReport& report, const CampaignConfig& cfg) {
  json per_item = json::array();
  for (const ItemSummary& item : report.per_item) {
    json entry{{"index", item.index},
               {"label", item.label},
               {"skipped", item.skipped},
               {"success", item.success},
               {"queries_used", item.queries_used},
               {"iterations", item.iterations},
               {"status", status_name(item.status)}};
    if (!item.skipped) {
      entry["psnr"] = detail::real_to_json(item.psnr);
      entry["ssim"] = detail::real_to_json(item.ssim);
    }
    if (!item.error.empty()) entry["error"] = item.error;
    if (!item.adversarial_file.empty()) entry["adversarial_file"] = item.adversarial_file;
    per_item.push_back(std::move(entry));
  }
  json doc{
      {"config",
       {{"dataset", cfg.dataset},
        {"oracle", cfg.oracle},
        {"max_items", cfg.max_items},
        {"save_adversarials", cfg.save_adversarials},
        {"attack", detail::attack_config_to_json(cfg.attack)}}},
      {"items_attempted", report.items_attempted},
      {"items_skipped_misclassified", report.items_skipped_misclassified},
      {"items_failed", report.items_failed},
      {"successes", report.successes},
      {"asr", report.asr},
      {"avg_q", optional_real(report.avg_q)},
      {"med_q", optional_real(report.med_q)},
      {"mean_psnr", optional_real(report.mean_psnr)},
      {"mean_ssim", optional_real(report.mean_ssim)},
      {"q_max", report.q_max},
      {"precheck_queries", report.precheck_queries},
      {"precheck_counted_in_budget", false},
      {"query_stats_over", "successes"},
      {"median_convention", "lower"},
      {"saved_png_quantization", "8-bit; success flags refer to the float32 images"},
      {"load_issues", report.load_issues},
      {"per_item", std::move(per_item)}};
  return doc.dump(2) + "\n";
}

std::string per_item_csv(const CampaignReport& report) {
  std::string out = "index,label,skipped,success,queries_used,iterations,psnr,ssim,status\n";
  for (const ItemSummary& item : report.per_item) {
    out += std::to_string(item.index) + "," + std::to_string(item.label) + "," + (item.skipped ? "1" : "0") + "," +
           (item.success ? "1" : "0") + "," + std::to_string(item.queries_used) + "," +
           std::to_string(item.iterations) + "," + (item.skipped ? "" : format_real(item.psnr)) + "," +
           (item.skipped ? "" : format_real(item.ssim)) + "," + status_name(item.status) + "\n";
  }
  return out;
}

void write_report(const CampaignReport& report, const CampaignConfig& cfg) {
  const auto& dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  if (cfg.save_adversarials) {
    std::filesystem::create_directories(dir / kAdversarialDir);
    for (const ItemSummary& item : report.per_item) {
      if (!item.result) continue;
      write_png(dir / (item.adversarial_file + ".png"), item.result->adversarial);
      write_file(dir / (item.adversarial_file + ".json"), detail::attack_result_to_json(*item.result).dump() + "\n");
    }
  }
  write_file(dir / "report.json", report_to_json(report, cfg));
  write_file(dir / "per_item.csv", per_item_csv(report));
}

CampaignReport load_report(const std::filesystem::path& dir) {
  json doc;
  try {
    doc = json::parse(read_file(dir / "report.json"));
  } catch (const json::exception& e) {
    throw FormatError((dir / "report.json").string() + ": " + e.what());
  }
  CampaignReport report;
  try {
    report.q_max = doc.at("q_max").get<std::size_t>();
    report.precheck_queries = doc.at("precheck_queries").get<std::size_t>();
    if (doc.contains("load_issues")) report.load_issues = doc["load_issues"].get<std::vector<std::string>>();
    for (const json& entry : doc.at("per_item")) {
      ItemSummary item;
      item.index = entry.at("index").get<std::size_t>();
      item.label = entry.at("label").get<int>();
      item.skipped = entry.at("skipped").get<bool>();
      item.success = entry.at("success").get<bool>();
      item.queries_used = entry.at("queries_used").get<std::size_t>();
      item.iterations = entry.at("iterations").get<std::size_t>();
      item.status = entry.at("status") == "completed" ? AttackStatus::completed : AttackStatus::transport_error;
      if (entry.contains("psnr")) item.psnr = detail::real_from_json(entry["psnr"]);
      if (entry.contains("ssim")) item.ssim = detail::real_from_json(entry["ssim"]);
      if (entry.contains("error")) item.error = entry["error"].get<std::string>();
      if (entry.contains("adversarial_file")) {
        item.adversarial_file = entry["adversarial_file"].get<std::string>();
        const auto path = dir / (item.adversarial_file + ".json");
        if (std::filesystem::exists(path)) {
          item.result = detail::attack_result_from_json(json::parse(read_file(path)));
        }
      }
      report.per_item.push_back(std::move(item));
    }
  } catch (const json::exception& e) {
    throw FormatError((dir / "report.json").string() + ": " + e.what());
  }
  aggregate(report);
  return report;
}

TransferResult transfer_check(const CampaignReport& source, const Oracle& target) {
  TransferResult result;
  for (const ItemSummary& item : source.per_item) {
    if (!item.success) continue;
    if (!item.result) {
      throw Error("item " + std::to_string(item.index) + " has no saved adversarial image; rerun with --save-adversarials");
    }
    ++result.evaluated;
    if (argmax(target.predict(item.result->adversarial)) != static_cast<std::size_t>(item.label)) ++result.transferred;
  }
  if (result.evaluated > 0) {
    result.fraction = static_cast<double>(result.transferred) / static_cast<double>(result.evaluated);
  }
  return result;
}

std::string emit_plot_data(const CampaignReport& report) {
  std::vector<std::size_t> budgets;
  for (std::size_t b = 50; b <= report.q_max; b += 50) budgets.push_back(b);
  if (budgets.empty() || budgets.back() != report.q_max) budgets.push_back(report.q_max);

  std::string out = "query_budget,asr\n";
  for (std::size_t b : budgets) {
    std::size_t hits = 0;
    for (const ItemSummary& item : report.per_item) {
      if (!item.skipped && item.success && item.queries_used <= b) ++hits;
    }
    const double asr = report.items_attempted == 0
                           ? 0.0
                           : static_cast<double>(hits) / static_cast<double>(report.items_attempted);
    out += std::to_string(b) + "," + format_real(asr) + "\n";
  }
  return out;
}

}  // namespace stba
