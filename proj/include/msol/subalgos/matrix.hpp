#pragma once

#include <Eigen/Dense>
#include <variant>

#include "msol/core/loss.hpp"
#include "msol/subalgos/learner.hpp"

namespace msol::subalgos {

using Matrix = Eigen::MatrixXd;

// {0 <= W <= I, tr W = k}
struct CappedSpectraplex {
  int k = 1;
};
// {W >= 0, ||W||_trace <= r}
struct TraceBall {
  double r = 1.0;
};

using MatrixConstraint = std::variant<CappedSpectraplex, TraceBall>;

struct MatrixLearnerState {
  Matrix W;
  MatrixConstraint constraint;
  double eta = 1.0;
  // Sum of the loss matrices seen so far; the iterate is a function of it.
  Matrix accumulated;

  int dim() const { return static_cast<int>(W.rows()); }
};

struct SymmetricEigen {
  Vector values;  // ascending
  Matrix vectors;
};

// Decomposes (A + A^T)/2. Throws ConfigError if the reconstruction residual
// exceeds 1e-10 relative to max(1, ||A||).
SymmetricEigen symmetric_eigen(const Matrix& a);

// Relative-entropy projection of a nonnegative spectrum onto
// {0 <= l <= 1, sum l = k}: l'_i = min(1, alpha l_i).
Vector capped_spectraplex_project(const Vector& eigs, int k);
// Same, given log-eigenvalues (entries may be -inf).
Vector capped_spectraplex_project_log(const Vector& log_eigs, int k);

// Online PCA learner on the capped spectraplex, k <= d/2. Losses are
// f(W) = <I - W, Y> with 0 <= Y, ||Y||_op <= 1.
MatrixLearnerState matrix_eg_init(int d, int k, double eta);
MatrixLearnerState matrix_eg_step(const MatrixLearnerState& state,
                                  const Matrix& Y);

// Matrix multiplicative weights on {W >= 0, tr W <= r}; losses <W, Y> with
// symmetric Y, ||Y||_op <= 1.
MatrixLearnerState mmw_init(int d, double r, double eta);
MatrixLearnerState mmw_step(const MatrixLearnerState& state, const Matrix& Y);

Vector vectorize(const Matrix& m);
Matrix unvectorize(const Vector& v, int d);

// Both learners take the subgradient of their centered linear loss in
// vectorized form. For PCA the loss matrix is Y = -gradient.
class MatrixEgLearner : public OnlineLearner {
 public:
  explicit MatrixEgLearner(MatrixLearnerState state);
  int dim() const override { return state_.dim() * state_.dim(); }
  Vector iterate() const override { return vectorize(state_.W); }
  void update(const Vector& gradient) override;
  std::unique_ptr<OnlineLearner> clone() const override;
  std::string name() const override;
  const MatrixLearnerState& state() const { return state_; }

 private:
  MatrixLearnerState state_;
};

class MmwLearner : public OnlineLearner {
 public:
  explicit MmwLearner(MatrixLearnerState state);
  int dim() const override { return state_.dim() * state_.dim(); }
  Vector iterate() const override { return vectorize(state_.W); }
  void update(const Vector& gradient) override;
  std::unique_ptr<OnlineLearner> clone() const override;
  std::string name() const override;
  const MatrixLearnerState& state() const { return state_; }

 private:
  MatrixLearnerState state_;
};

}  // namespace msol::subalgos
