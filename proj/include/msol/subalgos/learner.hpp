#pragma once

#include <memory>
#include <string>

#include "msol/core/loss.hpp"

namespace msol::subalgos {

// A full-information online learner fed with subgradients at its own iterate.
// Matrix learners expose their decision as a column-major vectorization.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  virtual int dim() const = 0;
  virtual Vector iterate() const = 0;
  virtual void update(const Vector& gradient) = 0;
  virtual std::unique_ptr<OnlineLearner> clone() const = 0;
  virtual std::string name() const = 0;
};

// A learner that predicts a scalar for a context and is fed the derivative of
// the loss at its own prediction.
class SupervisedLearner {
 public:
  virtual ~SupervisedLearner() = default;

  virtual double predict(const Vector& x) const = 0;
  virtual void update(const Vector& x, double loss_derivative) = 0;
  virtual std::unique_ptr<SupervisedLearner> clone() const = 0;
  virtual std::string name() const = 0;
};

}  // namespace msol::subalgos
