#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "msol/configs/configs.hpp"
#include "msol/ftpl/ftpl.hpp"

namespace msol::harness {

// One experiment: a handle collection (preset or inline spec), a stream
// family and a comparator sweep, played once per seed.
//
// Adversaries by handle kind:
//   vector OCO:  planted-absolute (default) | linear
//   online PCA:  spike
//   MMW:         alternating (default) | random
//   supervised:  linear-target
// Comparators are r * e_1 (or r * e_1 e_1^T for matrices) for every r in
// `sweep`, followed by every handle.
struct ExperimentConfig {
  std::string preset = "banach";
  std::optional<configs::ConfigSpec> spec;
  std::size_t horizon = 500;
  int dim = 5;
  std::optional<std::size_t> max_experts;
  std::vector<std::uint64_t> seeds{1};
  std::string adversary;
  double adversary_norm = 1.0;
  double adversary_noise = 0.0;
  std::vector<double> sweep;
  ftpl::PerturbationMode mode = ftpl::PerturbationMode::kGaussianTail;
  std::size_t threads = 0;  // 0: one per hardware thread

  configs::ConfigSpec resolve_spec() const;
};

void validate(const ExperimentConfig& cfg);

// Experiment keys (schema, preset, horizon, dim, max_experts, seeds,
// adversary, adversary.norm, adversary.noise, sweep, perturbation, threads)
// plus, optionally, an inline spec under the keys of configs::serialize
// prefixed by `spec.`.
ExperimentConfig experiment_from_key_values(const configs::KeyValues& kv);
ExperimentConfig load_experiment(const std::string& path);
std::string serialize(const ExperimentConfig& cfg);

struct ReportRow {
  std::uint64_t seed;
  std::size_t round;   // 1-based
  std::size_t expert;  // 1-based
  double loss;         // realized, uncentered
  std::vector<double> regrets;  // cumulative, one per comparator
};

struct SeedResult {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string diagnostic;
  std::vector<ReportRow> rows;
  double meta_loss = 0.0;                // uncentered
  std::vector<double> certificates;      // per expert
  double theorem_certificate = 0.0;      // realized - min_i (G_i + B_i)
  std::vector<double> final_regrets;     // per comparator
};

struct ExperimentReport {
  ExperimentConfig config;
  configs::ConfigSpec spec;
  std::vector<std::string> comparator_labels;
  std::vector<double> bounds;
  std::vector<SeedResult> seeds;

  bool all_ok() const;
  nlohmann::json summary() const;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// (||w|| + 1) sqrt(n ln((||w|| + 1) L n))
double oracle_shape(double norm, double L, std::size_t n);

std::string to_csv(const ExperimentReport& report);
// JSON text with every float printed to 17 significant digits.
std::string dump_json(const nlohmann::json& j, int indent = 2);
// Writes the CSV and JSON files; throws std::runtime_error naming the path on
// I/O failure.
void emit_report(const ExperimentReport& report, const std::string& csv_path,
                 const std::string& json_path);
void write_file(const std::string& path, const std::string& contents);

// Comparator sweep in the shape of the nested-ball oracle inequality: for
// each norm r, planted absolute-loss streams with ||w*|| = r, regret against
// w* averaged over seeds, divided by oracle_shape(r, L, n).
struct SweepConfig {
  std::size_t horizon = 2000;
  int dim = 5;
  double L = 1.0;
  std::size_t max_experts = 15;
  std::vector<double> norms{0.1, 1.0, 10.0, 100.0};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  ftpl::PerturbationMode mode = ftpl::PerturbationMode::kGaussianTail;
  std::size_t threads = 0;
};

struct SweepPoint {
  double norm;
  double mean_regret;
  double standard_error;
  double ratio;
};

struct SweepReport {
  std::vector<SweepPoint> points;
  std::size_t failed_seeds = 0;
  double max_ratio() const;
  double min_ratio() const;
  double spread() const { return max_ratio() / min_ratio(); }
  nlohmann::json summary() const;
};

SweepReport run_sweep(const SweepConfig& cfg);

}  // namespace msol::harness
