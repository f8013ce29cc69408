#include "msol/core/ledger.hpp"

#include "msol/core/errors.hpp"

namespace msol {

RegretLedger::RegretLedger(std::size_t num_experts)
    : expert_sums_(num_experts) {}

void RegretLedger::record_round(std::size_t round, ExpertIndex chosen,
                                double loss) {
  rounds_.push_back({round, chosen, loss});
  total_.add(loss);
}

void RegretLedger::record_expert_losses(const std::vector<double>& losses) {
  if (expert_sums_.empty()) expert_sums_.resize(losses.size());
  if (losses.size() != expert_sums_.size()) {
    throw DimensionError("ledger: expert loss vector has wrong length");
  }
  for (std::size_t i = 0; i < losses.size(); ++i) expert_sums_[i].add(losses[i]);
}

void RegretLedger::record_comparator(std::string descriptor,
                                     double cumulative_loss) {
  comparators_.push_back({std::move(descriptor), cumulative_loss});
}

std::vector<double> RegretLedger::expert_losses() const {
  std::vector<double> out;
  out.reserve(expert_sums_.size());
  for (const auto& s : expert_sums_) out.push_back(s.value());
  return out;
}

double cumulative_regret(const RegretLedger& ledger, double comparator_loss) {
  if (ledger.empty()) {
    throw ConfigError("cumulative_regret: ledger has no rounds");
  }
  return ledger.total_loss() - comparator_loss;
}

}  // namespace msol
