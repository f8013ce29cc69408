#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "msol/core/loss.hpp"
#include "msol/subalgos/learner.hpp"

namespace msol::subalgos {

enum class Regularizer { kHalfSquaredL2, kHalfSquaredLp, kNegativeEntropy };

// Decision sets:
//   half-squared l2 / lp: the l_p ball of radius R, R(w) = 1/2 ||w||_p^2.
//   negative entropy: {w >= 0, sum w = R}, R(w) = sum w_i ln(d w_i / R),
//   which is (1/R)-strongly convex w.r.t. l1 on that set.
struct MirrorDescentState {
  Vector w;
  double eta = 1.0;
  double radius = 1.0;
  Regularizer regularizer = Regularizer::kHalfSquaredL2;
  double p = 2.0;
  double strong_convexity = 1.0;

  int dim() const { return static_cast<int>(w.size()); }
};

// Starts at argmin R: the origin for the balls, uniform for the simplex.
MirrorDescentState md_init(int dim, double eta, double radius,
                           Regularizer regularizer, double p = 2.0);

MirrorDescentState md_step(const MirrorDescentState& state, const Vector& g);
void md_update(MirrorDescentState& state, const Vector& g);

// Bregman projection of a point onto the decision set.
Vector md_project(const MirrorDescentState& state, const Vector& w);

// Mirror maps of 1/2 ||.||_p^2 and its conjugate 1/2 ||.||_q^2.
Vector lp_mirror_map(const Vector& w, double p);
Vector lp_inverse_mirror_map(const Vector& theta, double p);

double regularizer_value(const MirrorDescentState& params, const Vector& w);
double bregman_divergence(const MirrorDescentState& params, const Vector& u,
                          const Vector& v);
// Dual norm of the regularizer's primal norm.
double dual_norm(const MirrorDescentState& params, const Vector& g);
// Primal norm used to describe the decision set.
double primal_norm(const MirrorDescentState& params, const Vector& w);

struct TraceEntry {
  Vector w;
  Vector g;
};

struct RegretCertificate {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds(double slack = 1e-9) const {
    return lhs <= rhs + slack * (1.0 + std::abs(rhs));
  }
};

// Both sides of sum <w_t - w, g_t> <= (eta / 2 lambda) sum ||g_t||_*^2 + R(w)/eta.
RegretCertificate md_regret_certificate(const std::vector<TraceEntry>& trace,
                                        const Vector& comparator,
                                        const MirrorDescentState& params);

class MirrorDescentLearner : public OnlineLearner {
 public:
  explicit MirrorDescentLearner(MirrorDescentState state);

  int dim() const override { return state_.dim(); }
  Vector iterate() const override { return state_.w; }
  void update(const Vector& gradient) override;
  std::unique_ptr<OnlineLearner> clone() const override;
  std::string name() const override;

  const MirrorDescentState& state() const { return state_; }

 private:
  MirrorDescentState state_;
};

// Linear predictor x -> <w, x> trained by mirror descent on the chain-rule
// gradient loss_derivative * x.
class LinearSupervisedLearner : public SupervisedLearner {
 public:
  explicit LinearSupervisedLearner(MirrorDescentState state);

  double predict(const Vector& x) const override;
  void update(const Vector& x, double loss_derivative) override;
  std::unique_ptr<SupervisedLearner> clone() const override;
  std::string name() const override;

  const MirrorDescentState& state() const { return state_; }

 private:
  MirrorDescentState state_;
};

}  // namespace msol::subalgos
