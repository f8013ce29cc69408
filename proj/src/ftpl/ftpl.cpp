#include "msol/ftpl/ftpl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msol/core/errors.hpp"
#include "msol/core/stats.hpp"
#include "msol/ftpl/rng.hpp"

namespace msol::ftpl {

const char* to_string(PerturbationMode mode) {
  switch (mode) {
    case PerturbationMode::kRademacherExact:
      return "rademacher";
    case PerturbationMode::kGaussianTail:
      return "gaussian";
  }
  return "unknown";
}

PerturbationMode perturbation_mode_from_string(const std::string& name) {
  if (name == "rademacher" || name == "rademacher-exact") {
    return PerturbationMode::kRademacherExact;
  }
  if (name == "gaussian" || name == "gaussian-tail") {
    return PerturbationMode::kGaussianTail;
  }
  throw ConfigError("unknown perturbation mode '" + name + "'");
}

double compute_bound(double scale, std::size_t horizon, double prior) {
  if (!(scale >= 1.0) || horizon == 0 || !(prior > 0.0) || prior > 1.0) {
    throw ConfigError("compute_bound: need c >= 1, n >= 1, pi in (0, 1]");
  }
  const double n = static_cast<double>(horizon);
  const double ratio = 4.0 * scale * scale * n / prior;
  if (!std::isfinite(ratio)) {
    throw SizeError(
        "compute_bound: 4 c^2 n / pi overflows; reduce the scale or horizon");
  }
  return 5.0 * scale * std::sqrt(n * std::log(ratio));
}

TailPerturbation draw_tail(std::size_t num_experts, std::size_t remaining,
                           PerturbationMode mode, std::mt19937_64& rng) {
  TailPerturbation tail{std::vector<double>(num_experts, 0.0)};
  if (remaining == 0) return tail;
  if (mode == PerturbationMode::kRademacherExact) {
    for (auto& z : tail.z) z = static_cast<double>(rademacher_sum(rng, remaining));
  } else {
    std::normal_distribution<double> normal(
        0.0, std::sqrt(static_cast<double>(remaining)));
    for (auto& z : tail.z) z = normal(rng);
  }
  return tail;
}

MultiScaleFtpl::MultiScaleFtpl(ScaleProfile profile, std::size_t horizon,
                               FtplOptions options)
    : profile_(std::move(profile)),
      horizon_(horizon),
      options_(options),
      cumulative_(profile_.size()) {
  if (horizon_ == 0) throw ConfigError("FTPL horizon must be >= 1");
  bounds_.reserve(profile_.size());
  for (std::size_t i = 0; i < profile_.size(); ++i) {
    bounds_.push_back(compute_bound(profile_.scale(i), horizon_, profile_.prior(i)));
  }
  epsilon_ = options_.epsilon.value_or(
      saddle::default_epsilon(horizon_, profile_.scales()));
  if (!(epsilon_ > 0.0)) throw ConfigError("FTPL epsilon must be positive");
}

std::vector<double> MultiScaleFtpl::cumulative() const {
  std::vector<double> g;
  g.reserve(cumulative_.size());
  for (const auto& s : cumulative_) g.push_back(s.value());
  return g;
}

TailPerturbation MultiScaleFtpl::draw_tail_perturbation() const {
  if (finished()) throw std::logic_error("FTPL: horizon exhausted");
  auto rng = derived_engine(options_.seed, round_, StreamPurpose::kPerturbation);
  return draw_tail(size(), horizon_ - round_, options_.mode, rng);
}

StepResult MultiScaleFtpl::step() {
  if (finished()) throw std::logic_error("FTPL: step called after round n");
  TailPerturbation tail = draw_tail_perturbation();
  const auto problem = saddle::build_saddle_coefficients(cumulative(), tail.z,
                                                         profile_, bounds_);
  saddle::SaddleSolution solution = [&] {
    try {
      return saddle::solve(problem, epsilon_);
    } catch (const saddle::SolverError& e) {
      throw saddle::SolverError(
          "round " + std::to_string(round_) + ": " + e.what(), e.best());
    }
  }();
  auto rng = derived_engine(options_.seed, round_, StreamPurpose::kSampling);
  const ExpertIndex chosen = solution.p.sample(uniform01(rng));
  last_step_ = StepResult{round_, solution.p, chosen, std::move(tail), solution};
  return *last_step_;
}

void MultiScaleFtpl::observe(const LossVector& g) {
  if (finished()) throw std::logic_error("FTPL: observe called after round n");
  if (g.size() != size()) throw DimensionError("FTPL: loss vector length");
  // LossVector validates against its own profile; recheck against ours.
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::fabs(g[i]) > profile_.scale(i) * (1.0 + LossVector::kRelativeSlack)) {
      throw ScaleViolation(i, g[i], profile_.scale(i),
                           "round " + std::to_string(round_));
    }
  }
  for (std::size_t i = 0; i < size(); ++i) cumulative_[i].add(g[i]);
  ++round_;
}

RelaxationEstimate relaxation_estimate(const std::vector<double>& cumulative,
                                       const ScaleProfile& profile,
                                       const std::vector<double>& bounds,
                                       std::size_t remaining,
                                       std::size_t samples,
                                       std::mt19937_64& rng,
                                       PerturbationMode mode) {
  const std::size_t n = profile.size();
  if (cumulative.size() != n || bounds.size() != n) {
    throw DimensionError("relaxation_estimate: length mismatch");
  }
  if (samples == 0) throw ConfigError("relaxation_estimate: samples >= 1");

  auto sup_value = [&](const std::vector<double>& z) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      best = std::max(best, -cumulative[i] + 4.0 * z[i] * profile.scale(i) -
                                bounds[i]);
    }
    return best;
  };

  if (remaining == 0) {
    return {sup_value(std::vector<double>(n, 0.0)), 0.0};
  }
  RunningStats stats;
  for (std::size_t s = 0; s < samples; ++s) {
    stats.add(sup_value(draw_tail(n, remaining, mode, rng).z));
  }
  return {stats.mean(), stats.standard_error()};
}

}  // namespace msol::ftpl
