#pragma once

#include <cstddef>
#include <vector>

#include "msol/core/types.hpp"
#include "msol/ftpl/ftpl.hpp"

namespace msol::harness {

struct ExpertGameResult {
  double realized = 0.0;              // sum_t g_t[i_t]
  std::vector<double> expert_totals;  // sum_t g_t[i]
  std::vector<double> bounds;         // B(i)
  std::vector<ExpertIndex> choices;

  // sum_t g_t[i_t] - sum_t g_t[i] - B(i)
  double certificate(ExpertIndex i) const;
  // sum_t g_t[i_t] - min_i (sum_t g_t[i] + B(i))
  double certificate() const;
  double regret(ExpertIndex i) const { return realized - expert_totals[i]; }
};

ExpertGameResult play_ftpl(const ScaleProfile& profile,
                           const std::vector<std::vector<double>>& stream,
                           ftpl::FtplOptions options = {});

// Exponential weights with expected loss sum_t <p_t, g_t>.
class Hedge {
 public:
  Hedge(std::size_t num_experts, double eta);

  const std::vector<double>& weights() const { return p_; }
  double expected_loss(const std::vector<double>& g) const;
  void update(const std::vector<double>& g);

 private:
  double eta_;
  std::vector<double> cumulative_;
  std::vector<double> p_;
};

// eta = sqrt(8 ln N / n) / (2 max_i c_i): the tuned rate for losses in
// [-max c, max c].
double hedge_default_eta(std::size_t num_experts, std::size_t n, double max_scale);

struct HedgeResult {
  double expected_total = 0.0;
  std::vector<double> expert_totals;
  double regret(ExpertIndex i) const { return expected_total - expert_totals[i]; }
};

HedgeResult play_hedge(const std::vector<std::vector<double>>& stream,
                       double eta);

}  // namespace msol::harness
