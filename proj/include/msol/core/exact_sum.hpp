#pragma once

#include <vector>

namespace msol {

// Exactly rounded floating-point summation (Shewchuk's non-overlapping
// partials). The running value is the correctly rounded sum of every term
// added so far, so it does not depend on the order in which terms arrive.
class ExactSum {
 public:
  ExactSum() = default;
  explicit ExactSum(double initial) { add(initial); }

  void add(double x);
  ExactSum& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const;
  void clear() { partials_.clear(); }

 private:
  std::vector<double> partials_;
};

double exact_sum(const std::vector<double>& values);

}  // namespace msol
