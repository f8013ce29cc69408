#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "msol/core/exact_sum.hpp"
#include "msol/core/types.hpp"

namespace msol {

struct RoundRecord {
  std::size_t round;
  ExpertIndex chosen;
  double loss;
};

struct ComparatorRecord {
  std::string descriptor;
  double cumulative_loss;
};

// Per-round realized losses of a meta-learner, per-expert cumulative losses
// and comparator totals. Sums are exactly rounded, so totals do not depend on
// record order.
class RegretLedger {
 public:
  RegretLedger() = default;
  explicit RegretLedger(std::size_t num_experts);

  void record_round(std::size_t round, ExpertIndex chosen, double loss);
  void record_expert_losses(const std::vector<double>& losses);
  void record_comparator(std::string descriptor, double cumulative_loss);

  bool empty() const { return rounds_.empty(); }
  std::size_t num_rounds() const { return rounds_.size(); }
  std::size_t num_experts() const { return expert_sums_.size(); }

  const std::vector<RoundRecord>& rounds() const { return rounds_; }
  const std::vector<ComparatorRecord>& comparators() const {
    return comparators_;
  }

  double total_loss() const { return total_.value(); }
  double expert_loss(ExpertIndex i) const { return expert_sums_[i].value(); }
  std::vector<double> expert_losses() const;

 private:
  std::vector<RoundRecord> rounds_;
  ExactSum total_;
  std::vector<ExactSum> expert_sums_;
  std::vector<ComparatorRecord> comparators_;
};

// Sum of realized losses minus the comparator's cumulative loss.
double cumulative_regret(const RegretLedger& ledger, double comparator_loss);

}  // namespace msol
