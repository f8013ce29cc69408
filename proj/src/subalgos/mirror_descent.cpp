#include "msol/subalgos/mirror_descent.hpp"

#include <cmath>
#include <sstream>

#include "msol/core/errors.hpp"
#include "msol/core/exact_sum.hpp"

namespace msol::subalgos {
namespace {

bool is_ball(Regularizer r) { return r != Regularizer::kNegativeEntropy; }

void check_gradient(const MirrorDescentState& s, const Vector& g) {
  if (g.size() != s.w.size()) {
    throw DimensionError("mirror descent: gradient has dimension " +
                         std::to_string(g.size()) + ", expected " +
                         std::to_string(s.w.size()));
  }
  if (!g.allFinite()) {
    throw ConfigError("mirror descent: non-finite gradient");
  }
}

// sign(v_i) |v_i|^(r-1) scaled by ||v||_r^(2-r), evaluated without forming
// large powers.
Vector power_map(const Vector& v, double r) {
  if (r == 2.0) return v;
  const double norm = lp_norm(v, r);
  if (norm == 0.0) return Vector::Zero(v.size());
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double ratio = std::abs(v[i]) / norm;
    out[i] = std::copysign(norm * std::pow(ratio, r - 1.0), v[i]);
  }
  return out;
}

}  // namespace

MirrorDescentState md_init(int dim, double eta, double radius,
                           Regularizer regularizer, double p) {
  if (dim < 1) throw ConfigError("mirror descent: dimension must be >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("mirror descent: learning rate must be positive");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("mirror descent: radius must be positive");
  }
  MirrorDescentState s;
  s.eta = eta;
  s.radius = radius;
  s.regularizer = regularizer;
  switch (regularizer) {
    case Regularizer::kHalfSquaredL2:
      s.p = 2.0;
      s.strong_convexity = 1.0;
      s.w = Vector::Zero(dim);
      break;
    case Regularizer::kHalfSquaredLp:
      // 1/2 ||.||_p^2 is (p-1)-strongly convex only for p in (1, 2].
      if (!(p > 1.0 && p <= 2.0)) {
        throw ConfigError("mirror descent: l_p regularizer needs p in (1, 2]");
      }
      s.p = p;
      s.strong_convexity = p - 1.0;
      s.w = Vector::Zero(dim);
      break;
    case Regularizer::kNegativeEntropy:
      s.p = 1.0;
      s.strong_convexity = 1.0 / radius;
      s.w = Vector::Constant(dim, radius / dim);
      break;
  }
  return s;
}

Vector lp_mirror_map(const Vector& w, double p) { return power_map(w, p); }

Vector lp_inverse_mirror_map(const Vector& theta, double p) {
  return power_map(theta, dual_exponent(p));
}

Vector md_project(const MirrorDescentState& s, const Vector& w) {
  if (is_ball(s.regularizer)) {
    const double norm = lp_norm(w, s.p);
    if (norm <= s.radius) return w;
    return w * (s.radius / norm);
  }
  if ((w.array() < 0.0).any()) {
    throw ConfigError("mirror descent: entropic projection needs w >= 0");
  }
  const double mass = w.sum();
  if (!(mass > 0.0)) {
    throw ConfigError("mirror descent: entropic projection of the zero vector");
  }
  return w * (s.radius / mass);
}

void md_update(MirrorDescentState& s, const Vector& g) {
  check_gradient(s, g);
  if (g.isZero(0.0)) return;
  if (is_ball(s.regularizer)) {
    const Vector theta = lp_mirror_map(s.w, s.p) - s.eta * g;
    s.w = md_project(s, lp_inverse_mirror_map(theta, s.p));
    return;
  }
  const double shift = g.minCoeff();
  Vector next(s.w.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    next[i] = s.w[i] * std::exp(-s.eta * (g[i] - shift));
  }
  s.w = md_project(s, next);
}

MirrorDescentState md_step(const MirrorDescentState& state, const Vector& g) {
  MirrorDescentState next = state;
  md_update(next, g);
  return next;
}

double regularizer_value(const MirrorDescentState& s, const Vector& w) {
  if (is_ball(s.regularizer)) {
    const double n = lp_norm(w, s.p);
    return 0.5 * n * n;
  }
  const double d = static_cast<double>(w.size());
  ExactSum sum;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) sum.add(w[i] * std::log(d * w[i] / s.radius));
  }
  return sum.value();
}

double bregman_divergence(const MirrorDescentState& s, const Vector& u,
                          const Vector& v) {
  if (is_ball(s.regularizer)) {
    return regularizer_value(s, u) - regularizer_value(s, v) -
           lp_mirror_map(v, s.p).dot(u - v);
  }
  ExactSum sum;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] > 0.0) sum.add(u[i] * std::log(u[i] / v[i]));
    sum.add(v[i] - u[i]);
  }
  return sum.value();
}

double dual_norm(const MirrorDescentState& s, const Vector& g) {
  if (is_ball(s.regularizer)) return lp_norm(g, dual_exponent(s.p));
  return g.cwiseAbs().maxCoeff();
}

double primal_norm(const MirrorDescentState& s, const Vector& w) {
  if (is_ball(s.regularizer)) return lp_norm(w, s.p);
  return w.cwiseAbs().sum();
}

RegretCertificate md_regret_certificate(const std::vector<TraceEntry>& trace,
                                        const Vector& comparator,
                                        const MirrorDescentState& params) {
  const double tol = 1e-9 * (1.0 + params.radius);
  if (primal_norm(params, comparator) > params.radius + tol) {
    throw ConfigError("regret certificate: comparator outside the ball");
  }
  if (!is_ball(params.regularizer) &&
      ((comparator.array() < 0.0).any() ||
       std::abs(comparator.sum() - params.radius) > tol)) {
    throw ConfigError("regret certificate: comparator outside the simplex");
  }
  ExactSum lhs;
  ExactSum grad_sq;
  for (const auto& [w, g] : trace) {
    lhs.add((w - comparator).dot(g));
    const double dn = dual_norm(params, g);
    grad_sq.add(dn * dn);
  }
  RegretCertificate cert;
  cert.lhs = lhs.value();
  cert.rhs = params.eta / (2.0 * params.strong_convexity) * grad_sq.value() +
             regularizer_value(params, comparator) / params.eta;
  return cert;
}

namespace {

std::string describe(const MirrorDescentState& s) {
  std::ostringstream os;
  switch (s.regularizer) {
    case Regularizer::kHalfSquaredL2: os << "md-l2"; break;
    case Regularizer::kHalfSquaredLp: os << "md-l" << s.p; break;
    case Regularizer::kNegativeEntropy: os << "md-entropy"; break;
  }
  os << "(R=" << s.radius << ")";
  return os.str();
}

}  // namespace

MirrorDescentLearner::MirrorDescentLearner(MirrorDescentState state)
    : state_(std::move(state)) {}

void MirrorDescentLearner::update(const Vector& gradient) {
  md_update(state_, gradient);
}

std::unique_ptr<OnlineLearner> MirrorDescentLearner::clone() const {
  return std::make_unique<MirrorDescentLearner>(*this);
}

std::string MirrorDescentLearner::name() const { return describe(state_); }

LinearSupervisedLearner::LinearSupervisedLearner(MirrorDescentState state)
    : state_(std::move(state)) {}

double LinearSupervisedLearner::predict(const Vector& x) const {
  if (x.size() != state_.w.size()) {
    throw DimensionError("linear learner: context dimension mismatch");
  }
  return state_.w.dot(x);
}

void LinearSupervisedLearner::update(const Vector& x, double loss_derivative) {
  if (!std::isfinite(loss_derivative)) {
    throw ConfigError("linear learner: non-finite loss derivative");
  }
  md_update(state_, loss_derivative * x);
}

std::unique_ptr<SupervisedLearner> LinearSupervisedLearner::clone() const {
  return std::make_unique<LinearSupervisedLearner>(*this);
}

std::string LinearSupervisedLearner::name() const {
  return "linear-" + describe(state_);
}

}  // namespace msol::subalgos
