#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>

namespace msol {

using Vector = Eigen::VectorXd;

// A convex loss over R^dim with a hand-coded subgradient.
//
// `lipschitz(p)` returns the Lipschitz constant with respect to the l_p norm
// on decisions (equivalently, a bound on the dual l_{p'} norm of
// subgradients). Infinity means no finite bound is known.
class LossFunction {
 public:
  using Eval = std::function<double(const Vector&)>;
  using Grad = std::function<Vector(const Vector&)>;
  using Lipschitz = std::function<double(double p)>;

  LossFunction(int dim, Eval evaluate, Grad subgradient, Lipschitz lipschitz,
               std::string name = "loss");

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }

  double operator()(const Vector& w) const { return evaluate(w); }
  double evaluate(const Vector& w) const;
  Vector subgradient(const Vector& w) const;
  double lipschitz(double p = 2.0) const { return lipschitz_(p); }

 private:
  int dim_;
  Eval evaluate_;
  Grad subgradient_;
  Lipschitz lipschitz_;
  std::string name_;
};

// Conjugate exponent p' with 1/p + 1/p' = 1 (p = 1 maps to infinity).
double dual_exponent(double p);
double lp_norm(const Vector& v, double p);

// f(w) = <g, w> + offset
LossFunction linear_loss(Vector g, double offset = 0.0);
// f(w) = |<x, w> - y|
LossFunction absolute_loss(Vector x, double y);
// f(w) = max(0, 1 - y <x, w>)
LossFunction hinge_loss(Vector x, double y);

// f~(w) = f(w) - f(0). Throws ConfigError if f(0) is not finite.
LossFunction center_loss(const LossFunction& f);

// A loss on scalar predictions, l(yhat, y), with derivative in yhat.
struct SupervisedLoss {
  std::function<double(double yhat, double y)> value;
  std::function<double(double yhat, double y)> derivative;
  double lipschitz = 1.0;
  std::string name;
};

SupervisedLoss absolute_supervised_loss();

}  // namespace msol
