#include "msol/meta/meta.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "msol/core/errors.hpp"

namespace msol::meta {
namespace {

constexpr double kPredictionSlack = 1e-9;

Mode mode_of(const std::vector<SubAlgorithmHandle>& handles) {
  if (handles.empty()) throw ConfigError("meta: empty handle list");
  const bool oco = static_cast<bool>(handles.front().learner);
  for (const auto& h : handles) {
    if (static_cast<bool>(h.learner) == static_cast<bool>(h.supervised)) {
      throw ConfigError("meta: handle '" + h.label +
                        "' must carry exactly one learner");
    }
    if (static_cast<bool>(h.learner) != oco) {
      throw ConfigError("meta: cannot mix OCO and supervised handles");
    }
    if (!(h.radius > 0.0) || !std::isfinite(h.radius) ||
        !(h.lipschitz > 0.0) || !std::isfinite(h.lipschitz)) {
      throw ConfigError("meta: handle '" + h.label +
                        "' needs finite positive R and L");
    }
  }
  return oco ? Mode::kOco : Mode::kSupervised;
}

ScaleProfile build_profile(const std::vector<SubAlgorithmHandle>& handles,
                           std::vector<double> prior,
                           std::vector<std::string>& warnings) {
  mode_of(handles);
  if (prior.size() != handles.size()) {
    throw DimensionError("meta: prior has " + std::to_string(prior.size()) +
                         " entries for " + std::to_string(handles.size()) +
                         " handles");
  }
  std::vector<double> scales;
  scales.reserve(handles.size());
  for (const auto& h : handles) scales.push_back(h.radius * h.lipschitz);
  std::vector<std::string> lifted;
  ScaleProfile profile =
      ScaleProfile::lifted(std::move(scales), std::move(prior), &lifted);
  for (std::size_t i = 0; i < handles.size(); ++i) {
    if (handles[i].radius * handles[i].lipschitz < 1.0) {
      std::ostringstream os;
      os << "handle '" << handles[i].label << "': R*L = "
         << handles[i].radius * handles[i].lipschitz << " lifted to scale 1";
      warnings.push_back(os.str());
    }
  }
  return profile;
}

[[noreturn]] void range_error(const SubAlgorithmHandle& h, std::size_t i,
                              double value, double bound, const char* what) {
  std::ostringstream os;
  os << "handle '" << h.label << "' (index " << i << "): " << what;
  throw ScaleViolation(i, value, bound, os.str());
}

}  // namespace

double SubAlgorithmHandle::scale() const {
  return std::max(1.0, radius * lipschitz);
}

MetaState::MetaState(std::vector<SubAlgorithmHandle> handles,
                     std::vector<double> prior, std::size_t horizon,
                     ftpl::FtplOptions options)
    : handles_(std::move(handles)),
      mode_(mode_of(handles_)),
      ftpl_(build_profile(handles_, std::move(prior), warnings_), horizon,
            options),
      ledger_(handles_.size()),
      raw_ledger_(handles_.size()) {}

void MetaState::check_range(const std::vector<double>& g) const {
  const auto& profile = ftpl_.profile();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double c = profile.scale(i);
    if (!std::isfinite(g[i]) ||
        std::fabs(g[i]) > c * (1.0 + LossVector::kRelativeSlack)) {
      range_error(handles_[i], i, g[i], c,
                  "centered loss exceeds the declared range R*L");
    }
  }
}

void MetaState::record(ExpertIndex chosen, const std::vector<double>& centered,
                       const std::vector<double>& raw) {
  const std::size_t t = ftpl_.round();
  ftpl_.observe(LossVector(centered, ftpl_.profile()));
  ledger_.record_round(t, chosen, centered[chosen]);
  ledger_.record_expert_losses(centered);
  raw_ledger_.record_round(t, chosen, raw[chosen]);
  raw_ledger_.record_expert_losses(raw);
}

OcoOutcome MetaState::oco_round(const LossFunction& f) {
  if (mode_ != Mode::kOco) throw ConfigError("meta: oco_round in supervised mode");
  const std::size_t n = handles_.size();
  std::vector<Vector> iterates;
  iterates.reserve(n);
  for (const auto& h : handles_) {
    if (h.learner->dim() != f.dim()) {
      throw DimensionError("meta: handle '" + h.label + "' has dimension " +
                           std::to_string(h.learner->dim()) + ", loss has " +
                           std::to_string(f.dim()));
    }
    iterates.push_back(h.learner->iterate());
  }

  const ftpl::StepResult step = ftpl_.step();

  const double f0 = f.evaluate(Vector::Zero(f.dim()));
  if (!std::isfinite(f0)) {
    throw ConfigError("meta: loss '" + f.name() + "' is not finite at 0");
  }
  OcoOutcome out{iterates[step.chosen], step.chosen, {}, {}};
  out.centered.resize(n);
  out.raw.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.raw[i] = f.evaluate(iterates[i]);
    out.centered[i] = out.raw[i] - f0;
  }
  check_range(out.centered);

  // Full-information feedback to every handle, in index order.
  for (std::size_t i = 0; i < n; ++i) {
    handles_[i].learner->update(f.subgradient(iterates[i]));
  }
  record(step.chosen, out.centered, out.raw);
  return out;
}

LearningOutcome MetaState::learning_round(
    const Vector& x, const std::function<double()>& reveal_label,
    const SupervisedLoss& loss) {
  if (mode_ != Mode::kSupervised) {
    throw ConfigError("meta: learning_round in OCO mode");
  }
  const std::size_t n = handles_.size();
  LearningOutcome out;
  out.predictions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& h = handles_[i];
    const double yhat = h.supervised->predict(x);
    if (!std::isfinite(yhat) ||
        std::fabs(yhat) > h.radius * (1.0 + kPredictionSlack)) {
      range_error(h, i, yhat, h.radius, "prediction exceeds radius R");
    }
    out.predictions[i] = yhat;
  }

  const ftpl::StepResult step = ftpl_.step();
  out.chosen = step.chosen;
  out.prediction = out.predictions[step.chosen];

  out.label = reveal_label();
  if (!std::isfinite(out.label)) throw ConfigError("meta: non-finite label");
  const double l0 = loss.value(0.0, out.label);
  out.centered.resize(n);
  out.raw.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.raw[i] = loss.value(out.predictions[i], out.label);
    out.centered[i] = out.raw[i] - l0;
  }
  check_range(out.centered);

  for (std::size_t i = 0; i < n; ++i) {
    handles_[i].supervised->update(
        x, loss.derivative(out.predictions[i], out.label));
  }
  record(step.chosen, out.centered, out.raw);
  return out;
}

MetaState register_handles(std::vector<SubAlgorithmHandle> handles,
                           std::vector<double> prior, std::size_t horizon,
                           ftpl::FtplOptions options) {
  return MetaState(std::move(handles), std::move(prior), horizon, options);
}

}  // namespace msol::meta
