#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "msol/core/exact_sum.hpp"
#include "msol/core/types.hpp"
#include "msol/saddle/saddle.hpp"

namespace msol::ftpl {

enum class PerturbationMode {
  kRademacherExact,
  kGaussianTail,
};

const char* to_string(PerturbationMode mode);
PerturbationMode perturbation_mode_from_string(const std::string& name);

// B(i) = 5 c sqrt(n ln(4 c^2 n / pi)).
double compute_bound(double scale, std::size_t horizon, double prior);

// z[i] stands in for the tail sum of future signs for expert i.
struct TailPerturbation {
  std::vector<double> z;
};

struct FtplOptions {
  PerturbationMode mode = PerturbationMode::kGaussianTail;
  std::uint64_t seed = 0;
  // Saddle accuracy; defaults to 1 / (sqrt(n) max_i c_i).
  std::optional<double> epsilon;
};

struct StepResult {
  std::size_t round;
  SimplexWeights p;
  ExpertIndex chosen;
  TailPerturbation tail;
  saddle::SaddleSolution solution;
};

// Multi-scale follow-the-perturbed-leader over N experts with known loss
// ranges c_i and prior pi, for a fixed horizon n.
//
// Each round draws a fresh tail perturbation, solves the per-round saddle
// problem and samples an expert from its solution. Randomness for round t
// comes from engines derived from (seed, t), so a round's draws do not depend
// on what earlier rounds consumed.
class MultiScaleFtpl {
 public:
  MultiScaleFtpl(ScaleProfile profile, std::size_t horizon,
                 FtplOptions options = {});

  std::size_t round() const { return round_; }  // 1-based
  std::size_t horizon() const { return horizon_; }
  bool finished() const { return round_ > horizon_; }
  std::size_t size() const { return profile_.size(); }

  const ScaleProfile& profile() const { return profile_; }
  const std::vector<double>& bounds() const { return bounds_; }
  double epsilon() const { return epsilon_; }
  PerturbationMode mode() const { return options_.mode; }
  std::uint64_t seed() const { return options_.seed; }

  // Cumulative expert losses G[i] = sum_{s < t} g_s[i], exactly rounded.
  std::vector<double> cumulative() const;

  TailPerturbation draw_tail_perturbation() const;

  // Idempotent within a round: the same (seed, t) yields the same result.
  StepResult step();
  void observe(const LossVector& g);

  const std::optional<StepResult>& last_step() const { return last_step_; }

 private:
  ScaleProfile profile_;
  std::size_t horizon_;
  FtplOptions options_;
  std::vector<double> bounds_;
  double epsilon_;
  std::size_t round_ = 1;
  std::vector<ExactSum> cumulative_;
  std::optional<StepResult> last_step_;
};

// Tail perturbation for `remaining` future rounds drawn from `rng`.
TailPerturbation draw_tail(std::size_t num_experts, std::size_t remaining,
                           PerturbationMode mode, std::mt19937_64& rng);

// Monte Carlo estimate of
//   E sup_i [ -G[i] + 4 z[i] c_i - B(i) ]
// with z the tail sums over `remaining` rounds. Exact when remaining == 0.
struct RelaxationEstimate {
  double mean;
  double standard_error;
};

RelaxationEstimate relaxation_estimate(
    const std::vector<double>& cumulative, const ScaleProfile& profile,
    const std::vector<double>& bounds, std::size_t remaining,
    std::size_t samples, std::mt19937_64& rng,
    PerturbationMode mode = PerturbationMode::kRademacherExact);

}  // namespace msol::ftpl
