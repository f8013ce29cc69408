#include "msol/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "msol/core/errors.hpp"
#include "msol/core/exact_sum.hpp"

namespace msol {

namespace {

std::string scale_message(std::size_t index, double value, double bound,
                          const std::string& context) {
  std::ostringstream os;
  os.precision(17);
  os << "loss " << value << " at expert " << index << " exceeds scale "
     << bound;
  if (!context.empty()) os << " (" << context << ")";
  return os.str();
}

void validate_prior(const std::vector<double>& prior) {
  ExactSum total;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    if (!(prior[i] > 0.0) || !std::isfinite(prior[i])) {
      throw ConfigError("prior weight at index " + std::to_string(i) +
                        " must be positive");
    }
    total += prior[i];
  }
  if (std::fabs(total.value() - 1.0) > 1e-12) {
    throw ConfigError("prior must sum to 1");
  }
}

}  // namespace

ScaleViolation::ScaleViolation(std::size_t index, double value, double bound,
                               const std::string& context)
    : std::out_of_range(scale_message(index, value, bound, context)),
      index_(index),
      value_(value),
      bound_(bound) {}

ScaleProfile::ScaleProfile(std::vector<double> scales,
                           std::vector<double> prior)
    : scales_(std::move(scales)), prior_(std::move(prior)) {
  if (scales_.empty()) throw ConfigError("scale profile needs N >= 1 experts");
  if (scales_.size() != prior_.size()) {
    throw DimensionError("scale and prior lengths differ");
  }
  for (std::size_t i = 0; i < scales_.size(); ++i) {
    if (!(scales_[i] >= 1.0) || !std::isfinite(scales_[i])) {
      throw ConfigError("scale at index " + std::to_string(i) +
                        " must be a finite value >= 1");
    }
  }
  validate_prior(prior_);
}

ScaleProfile ScaleProfile::lifted(std::vector<double> scales,
                                  std::vector<double> prior,
                                  std::vector<std::string>* warnings) {
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 1.0 && scales[i] >= 0.0) {
      if (warnings) {
        std::ostringstream os;
        os << "scale " << scales[i] << " at expert " << i << " lifted to 1";
        warnings->push_back(os.str());
      }
      scales[i] = 1.0;
    }
  }
  return ScaleProfile(std::move(scales), std::move(prior));
}

ScaleProfile ScaleProfile::uniform(std::vector<double> scales) {
  const std::size_t n = scales.size();
  if (n == 0) throw ConfigError("scale profile needs N >= 1 experts");
  return ScaleProfile(std::move(scales),
                      std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double ScaleProfile::max_scale() const {
  return *std::max_element(scales_.begin(), scales_.end());
}

LossVector::LossVector(std::vector<double> values, const ScaleProfile& profile)
    : values_(std::move(values)) {
  if (values_.size() != profile.size()) {
    throw DimensionError("loss vector length differs from scale profile");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double c = profile.scale(i);
    if (!std::isfinite(values_[i]) ||
        std::fabs(values_[i]) > c * (1.0 + kRelativeSlack)) {
      throw ScaleViolation(i, values_[i], c);
    }
  }
}

SimplexWeights::SimplexWeights(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw ConfigError("simplex weights need N >= 1 entries");
  ExactSum total;
  for (double v : p_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("simplex weights must be nonnegative");
    }
    total += v;
  }
  if (std::fabs(total.value() - 1.0) > kSumTolerance) {
    throw ConfigError("simplex weights must sum to 1");
  }
}

SimplexWeights SimplexWeights::uniform(std::size_t n) {
  return SimplexWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ExpertIndex SimplexWeights::sample(double u) const {
  double cumulative = 0.0;
  ExpertIndex last_positive = 0;
  for (ExpertIndex i = 0; i < p_.size(); ++i) {
    if (p_[i] <= 0.0) continue;
    last_positive = i;
    cumulative += p_[i];
    if (u < cumulative) return i;
  }
  // u landed in the rounding gap above the last partial sum.
  return last_positive;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace msol
