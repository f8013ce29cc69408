#include "msol/core/loss.hpp"

#include <cmath>
#include <stdexcept>

#include "msol/core/errors.hpp"

namespace msol {

LossFunction::LossFunction(int dim, Eval evaluate, Grad subgradient,
                           Lipschitz lipschitz, std::string name)
    : dim_(dim),
      evaluate_(std::move(evaluate)),
      subgradient_(std::move(subgradient)),
      lipschitz_(std::move(lipschitz)),
      name_(std::move(name)) {
  if (dim_ < 1) throw ConfigError("loss dimension must be positive");
}

double LossFunction::evaluate(const Vector& w) const {
  if (w.size() != dim_) throw DimensionError("loss: decision has wrong size");
  return evaluate_(w);
}

Vector LossFunction::subgradient(const Vector& w) const {
  if (w.size() != dim_) throw DimensionError("loss: decision has wrong size");
  return subgradient_(w);
}

double dual_exponent(double p) {
  if (p <= 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double lp_norm(const Vector& v, double p) {
  if (std::isinf(p)) return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
  if (p == 2.0) return v.norm();
  if (p == 1.0) return v.cwiseAbs().sum();
  const double scale = v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    s += std::pow(std::fabs(v[i]) / scale, p);
  }
  return scale * std::pow(s, 1.0 / p);
}

LossFunction linear_loss(Vector g, double offset) {
  const int dim = static_cast<int>(g.size());
  return LossFunction(
      dim, [g, offset](const Vector& w) { return g.dot(w) + offset; },
      [g](const Vector&) { return g; },
      [g](double p) { return lp_norm(g, dual_exponent(p)); }, "linear");
}

LossFunction absolute_loss(Vector x, double y) {
  const int dim = static_cast<int>(x.size());
  return LossFunction(
      dim, [x, y](const Vector& w) { return std::fabs(x.dot(w) - y); },
      [x, y](const Vector& w) -> Vector {
        const double r = x.dot(w) - y;
        if (r > 0.0) return x;
        if (r < 0.0) return -x;
        return Vector::Zero(x.size());
      },
      [x](double p) { return lp_norm(x, dual_exponent(p)); }, "absolute");
}

LossFunction hinge_loss(Vector x, double y) {
  const int dim = static_cast<int>(x.size());
  return LossFunction(
      dim,
      [x, y](const Vector& w) { return std::max(0.0, 1.0 - y * x.dot(w)); },
      [x, y](const Vector& w) -> Vector {
        if (1.0 - y * x.dot(w) > 0.0) return -y * x;
        return Vector::Zero(x.size());
      },
      [x, y](double p) {
        return std::fabs(y) * lp_norm(x, dual_exponent(p));
      },
      "hinge");
}

LossFunction center_loss(const LossFunction& f) {
  double at_zero;
  try {
    at_zero = f.evaluate(Vector::Zero(f.dim()));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot center loss: evaluation at 0 "
                                  "failed (decision set must contain 0): ") +
                      e.what());
  }
  if (!std::isfinite(at_zero)) {
    throw ConfigError(
        "cannot center loss: f(0) is not finite (decision set must contain "
        "0)");
  }
  return LossFunction(
      f.dim(), [f, at_zero](const Vector& w) { return f.evaluate(w) - at_zero; },
      [f](const Vector& w) { return f.subgradient(w); },
      [f](double p) { return f.lipschitz(p); }, f.name());
}

SupervisedLoss absolute_supervised_loss() {
  return SupervisedLoss{
      [](double yhat, double y) { return std::fabs(yhat - y); },
      [](double yhat, double y) {
        if (yhat > y) return 1.0;
        if (yhat < y) return -1.0;
        return 0.0;
      },
      1.0, "absolute"};
}

}  // namespace msol
