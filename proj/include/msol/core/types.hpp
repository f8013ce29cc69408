#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace msol {

using ExpertIndex = std::size_t;

// Per-expert loss ranges c_i >= 1 and a strictly positive prior pi.
class ScaleProfile {
 public:
  ScaleProfile(std::vector<double> scales, std::vector<double> prior);

  // Scales below 1 are raised to 1; one warning per lifted entry is appended.
  static ScaleProfile lifted(std::vector<double> scales,
                             std::vector<double> prior,
                             std::vector<std::string>* warnings = nullptr);

  static ScaleProfile uniform(std::vector<double> scales);

  std::size_t size() const { return scales_.size(); }
  const std::vector<double>& scales() const { return scales_; }
  const std::vector<double>& prior() const { return prior_; }
  double scale(ExpertIndex i) const { return scales_[i]; }
  double prior(ExpertIndex i) const { return prior_[i]; }
  double max_scale() const;

 private:
  std::vector<double> scales_;
  std::vector<double> prior_;
};

// One round of expert losses, validated against a scale profile.
class LossVector {
 public:
  static constexpr double kRelativeSlack = 1e-12;

  LossVector(std::vector<double> values, const ScaleProfile& profile);

  std::size_t size() const { return values_.size(); }
  double operator[](ExpertIndex i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

// A probability vector over experts.
class SimplexWeights {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit SimplexWeights(std::vector<double> p);
  static SimplexWeights uniform(std::size_t n);

  std::size_t size() const { return p_.size(); }
  double operator[](ExpertIndex i) const { return p_[i]; }
  const std::vector<double>& values() const { return p_; }

  // Inverse-CDF draw over ascending index; u must lie in [0, 1).
  ExpertIndex sample(double u) const;

 private:
  std::vector<double> p_;
};

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace msol
