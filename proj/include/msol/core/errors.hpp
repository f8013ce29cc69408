#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msol {

// Invalid configuration: bad parameters, violated preconditions on inputs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Vectors whose lengths must agree do not.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A problem is too large for an exhaustive routine.
class SizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A loss value falls outside its declared range |g[i]| <= c_i.
class ScaleViolation : public std::out_of_range {
 public:
  ScaleViolation(std::size_t index, double value, double bound,
                 const std::string& context = {});

  std::size_t index() const { return index_; }
  double value() const { return value_; }
  double bound() const { return bound_; }

 private:
  std::size_t index_;
  double value_;
  double bound_;
};

}  // namespace msol
