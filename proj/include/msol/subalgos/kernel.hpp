#pragma once

#include <functional>
#include <string>
#include <vector>

#include "msol/core/loss.hpp"
#include "msol/subalgos/learner.hpp"

namespace msol::subalgos {

struct Kernel {
  std::string name;
  std::function<double(const Vector&, const Vector&)> eval;
  // sup sqrt(K(x, x)) over the unit l2 ball of contexts.
  double bound = 1.0;
};

Kernel linear_kernel();
Kernel gaussian_kernel(double bandwidth);
Kernel polynomial_kernel(int degree, double offset);

// Throws ConfigError if the Gram matrix of `points` has an eigenvalue below
// -1e-8.
void check_positive_definite(const Kernel& kernel,
                             const std::vector<Vector>& points);

// f = sum_j alpha_j K(x_j, .) inside the RKHS ball of the given radius.
struct KernelLearnerState {
  std::vector<Vector> support;
  std::vector<double> alpha;
  Kernel kernel;
  double radius = 1.0;
  double eta = 1.0;
  double norm_squared = 0.0;  // alpha^T K alpha, maintained incrementally
};

KernelLearnerState kernel_init(Kernel kernel, double radius, double eta);

double kernel_predict(const KernelLearnerState& state, const Vector& x);

// RKHS norm recomputed from the full Gram matrix.
double rkhs_norm(const KernelLearnerState& state);

KernelLearnerState kernel_ogd_step(const KernelLearnerState& state,
                                   const Vector& x, double loss_grad);
void kernel_ogd_update(KernelLearnerState& state, const Vector& x,
                       double loss_grad);

class KernelOgdLearner : public SupervisedLearner {
 public:
  explicit KernelOgdLearner(KernelLearnerState state);

  double predict(const Vector& x) const override;
  void update(const Vector& x, double loss_derivative) override;
  std::unique_ptr<SupervisedLearner> clone() const override;
  std::string name() const override;

  const KernelLearnerState& state() const { return state_; }

 private:
  KernelLearnerState state_;
};

}  // namespace msol::subalgos
