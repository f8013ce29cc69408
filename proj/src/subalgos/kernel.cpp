#include "msol/subalgos/kernel.hpp"

#include <cmath>
#include <sstream>

#include "msol/core/errors.hpp"
#include "msol/core/exact_sum.hpp"

namespace msol::subalgos {
namespace {

constexpr double kNegativeTolerance = 1e-8;

void check_context(const Vector& x) {
  if (!x.allFinite()) throw ConfigError("kernel learner: non-finite context");
}

}  // namespace

Kernel linear_kernel() {
  return {"linear", [](const Vector& a, const Vector& b) { return a.dot(b); },
          1.0};
}

Kernel gaussian_kernel(double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ConfigError("gaussian kernel: bandwidth must be positive");
  }
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  std::ostringstream os;
  os << "rbf(" << bandwidth << ")";
  return {os.str(),
          [inv](const Vector& a, const Vector& b) {
            return std::exp(-(a - b).squaredNorm() * inv);
          },
          1.0};
}

Kernel polynomial_kernel(int degree, double offset) {
  if (degree < 1) throw ConfigError("polynomial kernel: degree must be >= 1");
  if (!(offset >= 0.0) || !std::isfinite(offset)) {
    throw ConfigError("polynomial kernel: offset must be >= 0");
  }
  std::ostringstream os;
  os << "poly(" << degree << "," << offset << ")";
  return {os.str(),
          [degree, offset](const Vector& a, const Vector& b) {
            return std::pow(a.dot(b) + offset, degree);
          },
          std::pow(1.0 + offset, 0.5 * degree)};
}

void check_positive_definite(const Kernel& kernel,
                             const std::vector<Vector>& points) {
  const auto m = static_cast<Eigen::Index>(points.size());
  if (m == 0) return;
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      gram(i, j) = gram(j, i) = kernel.eval(points[i], points[j]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      gram, Eigen::EigenvaluesOnly);
  const double lowest = solver.eigenvalues().minCoeff();
  if (lowest < -kNegativeTolerance) {
    std::ostringstream os;
    os << "kernel " << kernel.name
       << " is not positive definite: Gram eigenvalue " << lowest;
    throw ConfigError(os.str());
  }
}

KernelLearnerState kernel_init(Kernel kernel, double radius, double eta) {
  if (!kernel.eval) throw ConfigError("kernel learner: missing kernel");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("kernel learner: radius must be positive");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("kernel learner: learning rate must be positive");
  }
  KernelLearnerState s;
  s.kernel = std::move(kernel);
  s.radius = radius;
  s.eta = eta;
  return s;
}

double kernel_predict(const KernelLearnerState& s, const Vector& x) {
  check_context(x);
  double out = 0.0;
  for (std::size_t j = 0; j < s.support.size(); ++j) {
    out += s.alpha[j] * s.kernel.eval(s.support[j], x);
  }
  return out;
}

double rkhs_norm(const KernelLearnerState& s) {
  ExactSum sum;
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    for (std::size_t j = 0; j < s.support.size(); ++j) {
      sum.add(s.alpha[i] * s.alpha[j] *
              s.kernel.eval(s.support[i], s.support[j]));
    }
  }
  return std::sqrt(std::max(0.0, sum.value()));
}

void kernel_ogd_update(KernelLearnerState& s, const Vector& x,
                       double loss_grad) {
  check_context(x);
  if (!std::isfinite(loss_grad)) {
    throw ConfigError("kernel learner: non-finite loss gradient");
  }
  if (loss_grad == 0.0) return;
  const double kxx = s.kernel.eval(x, x);
  const double fx = kernel_predict(s, x);
  const double a = -s.eta * loss_grad;
  const double norm_sq = s.norm_squared + 2.0 * a * fx + a * a * kxx;
  const double scale = 1.0 + s.norm_squared + a * a * std::abs(kxx);
  if (kxx < -kNegativeTolerance || norm_sq < -kNegativeTolerance * scale) {
    std::ostringstream os;
    os << "kernel " << s.kernel.name
       << " is not positive definite: negative RKHS norm " << norm_sq;
    throw ConfigError(os.str());
  }
  s.support.push_back(x);
  s.alpha.push_back(a);
  s.norm_squared = std::max(0.0, norm_sq);

  const double norm = std::sqrt(s.norm_squared);
  if (norm > s.radius) {
    const double shrink = s.radius / norm;
    for (double& v : s.alpha) v *= shrink;
    s.norm_squared = s.radius * s.radius;
  }
}

KernelLearnerState kernel_ogd_step(const KernelLearnerState& state,
                                   const Vector& x, double loss_grad) {
  KernelLearnerState next = state;
  kernel_ogd_update(next, x, loss_grad);
  return next;
}

KernelOgdLearner::KernelOgdLearner(KernelLearnerState state)
    : state_(std::move(state)) {}

double KernelOgdLearner::predict(const Vector& x) const {
  return kernel_predict(state_, x);
}

void KernelOgdLearner::update(const Vector& x, double loss_derivative) {
  kernel_ogd_update(state_, x, loss_derivative);
}

std::unique_ptr<SupervisedLearner> KernelOgdLearner::clone() const {
  return std::make_unique<KernelOgdLearner>(*this);
}

std::string KernelOgdLearner::name() const {
  std::ostringstream os;
  os << "kernel-ogd(" << state_.kernel.name << ",R=" << state_.radius << ")";
  return os.str();
}

}  // namespace msol::subalgos
