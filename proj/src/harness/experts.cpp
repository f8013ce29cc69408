#include "msol/harness/experts.hpp"

#include <algorithm>
#include <cmath>

#include "msol/core/errors.hpp"
#include "msol/core/exact_sum.hpp"

namespace msol::harness {

double ExpertGameResult::certificate(ExpertIndex i) const {
  return realized - expert_totals[i] - bounds[i];
}

double ExpertGameResult::certificate() const {
  double best = expert_totals[0] + bounds[0];
  for (std::size_t i = 1; i < expert_totals.size(); ++i) {
    best = std::min(best, expert_totals[i] + bounds[i]);
  }
  return realized - best;
}

ExpertGameResult play_ftpl(const ScaleProfile& profile,
                           const std::vector<std::vector<double>>& stream,
                           ftpl::FtplOptions options) {
  ftpl::MultiScaleFtpl learner(profile, stream.size(), options);
  const std::size_t N = profile.size();
  ExactSum realized;
  std::vector<ExactSum> totals(N);
  ExpertGameResult out;
  out.choices.reserve(stream.size());
  for (const auto& g : stream) {
    const ftpl::StepResult step = learner.step();
    learner.observe(LossVector(g, profile));
    realized.add(g[step.chosen]);
    for (std::size_t i = 0; i < N; ++i) totals[i].add(g[i]);
    out.choices.push_back(step.chosen);
  }
  out.realized = realized.value();
  out.bounds = learner.bounds();
  out.expert_totals.resize(N);
  for (std::size_t i = 0; i < N; ++i) out.expert_totals[i] = totals[i].value();
  return out;
}

Hedge::Hedge(std::size_t num_experts, double eta)
    : eta_(eta),
      cumulative_(num_experts, 0.0),
      p_(num_experts, 1.0 / static_cast<double>(num_experts)) {
  if (num_experts == 0) throw ConfigError("hedge: need at least one expert");
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("hedge: learning rate must be positive");
  }
}

double Hedge::expected_loss(const std::vector<double>& g) const {
  if (g.size() != p_.size()) throw DimensionError("hedge: loss length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += p_[i] * g[i];
  return s;
}

void Hedge::update(const std::vector<double>& g) {
  if (g.size() != p_.size()) throw DimensionError("hedge: loss length mismatch");
  for (std::size_t i = 0; i < g.size(); ++i) cumulative_[i] += g[i];
  const double lo = *std::min_element(cumulative_.begin(), cumulative_.end());
  double z = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    p_[i] = std::exp(-eta_ * (cumulative_[i] - lo));
    z += p_[i];
  }
  for (double& v : p_) v /= z;
}

double hedge_default_eta(std::size_t num_experts, std::size_t n,
                         double max_scale) {
  return std::sqrt(8.0 * std::log(static_cast<double>(num_experts)) /
                   static_cast<double>(n)) /
         (2.0 * max_scale);
}

HedgeResult play_hedge(const std::vector<std::vector<double>>& stream,
                       double eta) {
  if (stream.empty()) return {};
  const std::size_t N = stream.front().size();
  Hedge hedge(N, eta);
  ExactSum total;
  std::vector<ExactSum> totals(N);
  for (const auto& g : stream) {
    total.add(hedge.expected_loss(g));
    for (std::size_t i = 0; i < N; ++i) totals[i].add(g[i]);
    hedge.update(g);
  }
  HedgeResult out;
  out.expected_total = total.value();
  for (auto& s : totals) out.expert_totals.push_back(s.value());
  return out;
}

}  // namespace msol::harness
