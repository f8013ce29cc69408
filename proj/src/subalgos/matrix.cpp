#include "msol/subalgos/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "msol/core/errors.hpp"

namespace msol::subalgos {
namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kSpectralSlack = 1e-9;

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

void check_loss_matrix(const MatrixLearnerState& s, const Matrix& Y,
                       const char* who) {
  const int d = s.dim();
  if (Y.rows() != d || Y.cols() != d) {
    throw DimensionError(std::string(who) + ": loss matrix must be " +
                         std::to_string(d) + "x" + std::to_string(d));
  }
  if (!Y.allFinite()) {
    throw ConfigError(std::string(who) + ": non-finite loss matrix");
  }
  const double scale = std::max(1.0, Y.cwiseAbs().maxCoeff());
  if ((Y - Y.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw ConfigError(std::string(who) + ": loss matrix is not symmetric");
  }
}

Matrix compose(const SymmetricEigen& e, const Vector& spectrum) {
  return symmetrize(e.vectors * spectrum.asDiagonal() *
                    e.vectors.transpose());
}

double log_sum_exp(const Vector& v, const std::vector<int>& idx,
                   std::size_t from) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = from; j < idx.size(); ++j) m = std::max(m, v[idx[j]]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t j = from; j < idx.size(); ++j) s += std::exp(v[idx[j]] - m);
  return m + std::log(s);
}

}  // namespace

SymmetricEigen symmetric_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("symmetric_eigen: matrix must be square");
  }
  const Matrix sym = symmetrize(a);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ConfigError("symmetric_eigen: decomposition failed");
  }
  SymmetricEigen out{solver.eigenvalues(), solver.eigenvectors()};
  if (sym.size() > 0) {
    const double residual =
        (out.vectors * out.values.asDiagonal() * out.vectors.transpose() - sym)
            .cwiseAbs()
            .maxCoeff();
    if (residual > 1e-10 * std::max(1.0, sym.cwiseAbs().maxCoeff())) {
      throw ConfigError("symmetric_eigen: residual above 1e-10");
    }
  }
  return out;
}

Vector capped_spectraplex_project_log(const Vector& log_eigs, int k) {
  const auto d = static_cast<int>(log_eigs.size());
  if (k < 1 || k > d) {
    throw ConfigError("capped projection: need 1 <= k <= d, got k=" +
                      std::to_string(k) + ", d=" + std::to_string(d));
  }
  int support = 0;
  for (int i = 0; i < d; ++i) {
    if (std::isnan(log_eigs[i]) || log_eigs[i] == std::numeric_limits<double>::infinity()) {
      throw ConfigError("capped projection: invalid eigenvalue");
    }
    if (std::isfinite(log_eigs[i])) ++support;
  }
  if (support < k) {
    throw ConfigError("capped projection: infeasible, only " +
                      std::to_string(support) + " positive eigenvalues for k=" +
                      std::to_string(k));
  }
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return log_eigs[a] > log_eigs[b]; });

  Vector out = Vector::Zero(d);
  for (int m = 0; m < k; ++m) {
    const double log_alpha =
        std::log(static_cast<double>(k - m)) - log_sum_exp(log_eigs, idx, m);
    if (log_eigs[idx[m]] + log_alpha <= 1e-15 || m == k - 1) {
      for (int j = 0; j < m; ++j) out[idx[j]] = 1.0;
      for (int j = m; j < d; ++j) {
        out[idx[j]] = std::min(1.0, std::exp(log_eigs[idx[j]] + log_alpha));
      }
      return out;
    }
  }
  return out;  // unreachable
}

Vector capped_spectraplex_project(const Vector& eigs, int k) {
  Vector logs(eigs.size());
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (!(eigs[i] >= 0.0) || !std::isfinite(eigs[i])) {
      throw ConfigError("capped projection: eigenvalues must be finite and >= 0");
    }
    logs[i] = std::log(eigs[i]);
  }
  return capped_spectraplex_project_log(logs, k);
}

MatrixLearnerState matrix_eg_init(int d, int k, double eta) {
  if (d < 2 || k < 1 || 2 * k > d) {
    throw ConfigError("matrix EG: need 1 <= k <= d/2, got k=" +
                      std::to_string(k) + ", d=" + std::to_string(d));
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("matrix EG: learning rate must be positive");
  }
  MatrixLearnerState s;
  s.W = Matrix::Identity(d, d) * (static_cast<double>(k) / d);
  s.constraint = CappedSpectraplex{k};
  s.eta = eta;
  s.accumulated = Matrix::Zero(d, d);
  return s;
}

MatrixLearnerState matrix_eg_step(const MatrixLearnerState& state,
                                  const Matrix& Y) {
  const auto* cap = std::get_if<CappedSpectraplex>(&state.constraint);
  if (cap == nullptr) {
    throw ConfigError("matrix EG: state is not on a capped spectraplex");
  }
  check_loss_matrix(state, Y, "matrix EG");
  const Matrix y = symmetrize(Y);
  if (y.isZero(0.0)) return state;
  const SymmetricEigen ey = symmetric_eigen(y);
  if (ey.values.minCoeff() < -kSpectralSlack ||
      ey.values.maxCoeff() > 1.0 + kSpectralSlack) {
    throw ConfigError("matrix EG: loss matrix must satisfy 0 <= Y <= I");
  }

  MatrixLearnerState next = state;
  next.accumulated = symmetrize(state.accumulated + y);
  // Exponentiated gradient on the complement I - W, whose trace is d - k.
  const SymmetricEigen es = symmetric_eigen(next.accumulated);
  const int d = state.dim();
  const Vector complement =
      capped_spectraplex_project_log(-state.eta * es.values, d - cap->k);
  next.W = compose(es, Vector::Ones(d) - complement);
  return next;
}

MatrixLearnerState mmw_init(int d, double r, double eta) {
  if (d < 1) throw ConfigError("MMW: dimension must be >= 1");
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw ConfigError("MMW: trace radius must be positive");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("MMW: learning rate must be positive");
  }
  MatrixLearnerState s;
  s.W = Matrix::Identity(d, d) * (r / (d + 1));
  s.constraint = TraceBall{r};
  s.eta = eta;
  s.accumulated = Matrix::Zero(d, d);
  return s;
}

MatrixLearnerState mmw_step(const MatrixLearnerState& state, const Matrix& Y) {
  const auto* ball = std::get_if<TraceBall>(&state.constraint);
  if (ball == nullptr) throw ConfigError("MMW: state is not on a trace ball");
  check_loss_matrix(state, Y, "MMW");
  const Matrix y = symmetrize(Y);
  if (y.isZero(0.0)) return state;
  const SymmetricEigen ey = symmetric_eigen(y);
  if (ey.values.cwiseAbs().maxCoeff() > 1.0 + kSpectralSlack) {
    throw ConfigError("MMW: loss matrix has spectral norm above 1");
  }

  MatrixLearnerState next = state;
  next.accumulated = symmetrize(state.accumulated + y);
  const SymmetricEigen es = symmetric_eigen(next.accumulated);
  // The dummy coordinate has accumulated loss 0.
  const Vector logits = -state.eta * es.values;
  const double top = std::max(logits.maxCoeff(), 0.0);
  const Vector weights = (logits.array() - top).exp().matrix();
  const double z = weights.sum() + std::exp(-top);
  next.W = compose(es, weights * (ball->r / z));
  return next;
}

Vector vectorize(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvectorize(const Vector& v, int d) {
  if (v.size() != static_cast<Eigen::Index>(d) * d) {
    throw DimensionError("unvectorize: expected " + std::to_string(d * d) +
                         " entries, got " + std::to_string(v.size()));
  }
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

MatrixEgLearner::MatrixEgLearner(MatrixLearnerState state)
    : state_(std::move(state)) {}

void MatrixEgLearner::update(const Vector& gradient) {
  state_ = matrix_eg_step(state_, -unvectorize(gradient, state_.dim()));
}

std::unique_ptr<OnlineLearner> MatrixEgLearner::clone() const {
  return std::make_unique<MatrixEgLearner>(*this);
}

std::string MatrixEgLearner::name() const {
  return "pca-eg(k=" + std::to_string(std::get<CappedSpectraplex>(state_.constraint).k) + ")";
}

MmwLearner::MmwLearner(MatrixLearnerState state) : state_(std::move(state)) {}

void MmwLearner::update(const Vector& gradient) {
  state_ = mmw_step(state_, unvectorize(gradient, state_.dim()));
}

std::unique_ptr<OnlineLearner> MmwLearner::clone() const {
  return std::make_unique<MmwLearner>(*this);
}

std::string MmwLearner::name() const {
  std::ostringstream os;
  os << "mmw(r=" << std::get<TraceBall>(state_.constraint).r << ")";
  return os.str();
}

}  // namespace msol::subalgos
