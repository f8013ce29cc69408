#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "msol/core/ledger.hpp"
#include "msol/core/loss.hpp"
#include "msol/ftpl/ftpl.hpp"
#include "msol/subalgos/learner.hpp"

namespace msol::meta {

// A sub-algorithm with its declared ranges: decisions satisfy ||w|| <= R
// (or |prediction| <= R in supervised mode) and losses are L-Lipschitz.
// Exactly one of `learner` / `supervised` is set.
struct SubAlgorithmHandle {
  std::string label;
  double radius = 1.0;
  double lipschitz = 1.0;
  std::unique_ptr<subalgos::OnlineLearner> learner;
  std::unique_ptr<subalgos::SupervisedLearner> supervised;

  // max(1, R L)
  double scale() const;
};

enum class Mode { kOco, kSupervised };

struct OcoOutcome {
  Vector decision;
  ExpertIndex chosen;
  std::vector<double> centered;  // g_t[i] = f~(w_t^i)
  std::vector<double> raw;       // f(w_t^i)
};

struct LearningOutcome {
  double prediction;
  ExpertIndex chosen;
  double label;
  std::vector<double> predictions;
  std::vector<double> centered;  // l(yhat_i, y) - l(0, y)
  std::vector<double> raw;       // l(yhat_i, y)
};

class MetaState {
 public:
  MetaState(std::vector<SubAlgorithmHandle> handles, std::vector<double> prior,
            std::size_t horizon, ftpl::FtplOptions options = {});

  Mode mode() const { return mode_; }
  std::size_t size() const { return handles_.size(); }
  const std::vector<SubAlgorithmHandle>& handles() const { return handles_; }
  const ftpl::MultiScaleFtpl& ftpl() const { return ftpl_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Ledger of centered losses; round losses are g_t[i_t].
  const RegretLedger& ledger() const { return ledger_; }
  // The same game recorded with uncentered losses.
  const RegretLedger& raw_ledger() const { return raw_ledger_; }

  OcoOutcome oco_round(const LossFunction& f);

  // `reveal_label` is called after the expert has been chosen.
  LearningOutcome learning_round(const Vector& x,
                                 const std::function<double()>& reveal_label,
                                 const SupervisedLoss& loss);

 private:
  void check_range(const std::vector<double>& g) const;
  void record(ExpertIndex chosen, const std::vector<double>& centered,
              const std::vector<double>& raw);

  std::vector<SubAlgorithmHandle> handles_;
  Mode mode_;
  std::vector<std::string> warnings_;
  ftpl::MultiScaleFtpl ftpl_;
  RegretLedger ledger_;
  RegretLedger raw_ledger_;
};

// Builds the meta-learner with c_i = max(1, R_i L_i); sub-unit scales are
// lifted with a warning.
MetaState register_handles(std::vector<SubAlgorithmHandle> handles,
                           std::vector<double> prior, std::size_t horizon,
                           ftpl::FtplOptions options = {});

}  // namespace msol::meta
