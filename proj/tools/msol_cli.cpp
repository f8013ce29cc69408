// Command-line front end: run experiments, verification suites, comparator
// sweeps and preset export.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "msol/configs/configs.hpp"
#include "msol/harness/experiment.hpp"
#include "msol/harness/verify.hpp"

namespace {

namespace fs = std::filesystem;
using namespace msol;

struct Options {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> max_experts;
  std::string preset_name;
};

int cmd_run(const Options& o) {
  harness::ExperimentConfig cfg;
  if (!o.config.empty()) cfg = harness::load_experiment(o.config);
  if (o.seed) cfg.seeds = {*o.seed};
  if (o.max_experts) cfg.max_experts = o.max_experts;
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  const harness::ExperimentReport report = harness::run_experiment(cfg);
  harness::emit_report(report, (dir / "report.csv").string(),
                       (dir / "summary.json").string());
  for (const auto& s : report.seeds) {
    if (s.ok) {
      std::cout << "seed " << s.seed << ": loss " << s.meta_loss
                << ", certificate " << s.theorem_certificate << "\n";
    } else {
      std::cout << "seed " << s.seed << ": FAILED: " << s.diagnostic << "\n";
    }
  }
  std::cout << "wrote " << (dir / "report.csv").string() << " and "
            << (dir / "summary.json").string() << "\n";
  return report.all_ok() ? 0 : 1;
}

int cmd_verify(const Options& o) {
  const auto lines = harness::run_verification_suite(o.samples.value_or(100000),
                                                     o.seed.value_or(1));
  bool ok = true;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& l : lines) {
    std::cout << (l.passed ? "PASS " : "FAIL ") << l.name << ": " << l.detail << "\n";
    ok = ok && l.passed;
    j.push_back({{"name", l.name}, {"passed", l.passed}, {"detail", l.detail}});
  }
  if (!o.out.empty()) harness::write_file(o.out, harness::dump_json(j));
  return ok ? 0 : 1;
}

int cmd_sweep(const Options& o) {
  harness::SweepConfig cfg;
  if (o.max_experts) cfg.max_experts = *o.max_experts;
  const std::uint64_t base = o.seed.value_or(1);
  cfg.seeds.clear();
  for (std::size_t i = 0; i < o.samples.value_or(10); ++i) cfg.seeds.push_back(base + i);
  const harness::SweepReport report = harness::run_sweep(cfg);
  for (const auto& p : report.points) {
    std::cout << "||w|| = " << p.norm << ": regret " << p.mean_regret << " +- "
              << p.standard_error << ", ratio " << p.ratio << "\n";
  }
  const bool ok = report.failed_seeds == 0 && report.spread() <= 4.0;
  std::cout << (ok ? "PASS" : "FAIL") << " spread max/min = " << report.spread()
            << " (max ratio " << report.max_ratio() << ")\n";
  if (!o.out.empty()) harness::write_file(o.out, harness::dump_json(report.summary()));
  return ok ? 0 : 1;
}

int cmd_presets(const Options& o) {
  if (o.preset_name.empty()) {
    for (const auto& name : configs::preset_names()) std::cout << name << "\n";
    return 0;
  }
  const auto spec = configs::make_preset(o.preset_name, 500, 5, o.max_experts);
  const std::string text = configs::serialize(spec);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    harness::write_file(o.out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-scale online learning toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--out", o.out, "Output directory (run) or file");
    sub->add_option("--max-experts", o.max_experts, "Truncate expert grids");
  };

  auto* run = app.add_subcommand("run", "Play an experiment, write CSV and JSON");
  add_common(run);
  run->add_option("--config", o.config, "Experiment config file")->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "Run the lemma verification suites");
  add_common(verify);
  verify->add_option("--samples", o.samples, "Monte Carlo samples per spec");

  auto* sweep = app.add_subcommand("sweep", "Comparator-norm sweep report");
  add_common(sweep);
  sweep->add_option("--samples", o.samples, "Number of seeds per norm");

  auto* presets = app.add_subcommand("presets", "List presets or emit one");
  add_common(presets);
  presets->add_option("name", o.preset_name, "Preset to emit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(o);
    if (*verify) return cmd_verify(o);
    if (*sweep) return cmd_sweep(o);
    if (*presets) return cmd_presets(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
