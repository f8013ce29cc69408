#include "msol/saddle/saddle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "msol/core/errors.hpp"

namespace msol::saddle {

namespace {

using Real = long double;

void validate(const SaddleProblem& problem) {
  if (problem.c.empty()) throw ConfigError("saddle problem needs N >= 1");
  if (problem.a.size() != problem.c.size()) {
    throw DimensionError("saddle problem: len(a) != len(c)");
  }
  for (std::size_t i = 0; i < problem.size(); ++i) {
    if (!std::isfinite(problem.c[i]) || !(problem.c[i] >= 1.0)) {
      throw ConfigError("saddle problem: scale c[" + std::to_string(i) +
                        "] must be finite and >= 1");
    }
    if (!std::isfinite(problem.a[i])) {
      throw ConfigError("saddle problem: coefficient a[" + std::to_string(i) +
                        "] is not finite");
    }
  }
}

// Indices sorted by a descending; equal entries keep ascending index order.
std::vector<std::size_t> order_by_a(const SaddleProblem& problem) {
  std::vector<std::size_t> order(problem.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return problem.a[i] > problem.a[j];
  });
  return order;
}

std::size_t cheapest_index(const std::vector<double>& c) {
  return static_cast<std::size_t>(
      std::min_element(c.begin(), c.end()) - c.begin());
}

Real closed_form_value_ld(const SaddleProblem& problem,
                          const std::vector<double>& p) {
  Real linear = 0.0L;
  Real worst = -std::numeric_limits<Real>::infinity();
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const Real pc = static_cast<Real>(p[i]) * problem.c[i];
    linear += pc;
    worst = std::max(worst, static_cast<Real>(problem.a[i]) - 2.0L * pc);
  }
  return linear + worst;
}

std::vector<double> normalized(std::vector<Real> p) {
  Real total = 0.0L;
  for (auto& v : p) {
    v = std::max(v, 0.0L);
    total += v;
  }
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = static_cast<double>(p[i] / total);
  }
  return out;
}

}  // namespace

SolverError::SolverError(const std::string& what, SaddleSolution best)
    : std::runtime_error(what), best_(std::move(best)) {}

SaddleProblem build_saddle_coefficients(const std::vector<double>& cumulative,
                                        const std::vector<double>& tails,
                                        const ScaleProfile& profile,
                                        const std::vector<double>& bounds) {
  const std::size_t n = profile.size();
  if (cumulative.size() != n || tails.size() != n || bounds.size() != n) {
    throw DimensionError("build_saddle_coefficients: length mismatch");
  }
  SaddleProblem problem{profile.scales(), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double c = profile.scale(i);
    problem.a[i] = c - cumulative[i] + 4.0 * tails[i] * c - bounds[i];
  }
  return problem;
}

double closed_form_value(const SaddleProblem& problem, const SimplexWeights& p) {
  if (p.size() != problem.size()) {
    throw DimensionError("closed_form_value: weight length mismatch");
  }
  return static_cast<double>(closed_form_value_ld(problem, p.values()));
}

double dual_bound(const SaddleProblem& problem) {
  validate(problem);
  const std::size_t n = problem.size();
  const auto order = order_by_a(problem);
  const Real c_min = *std::min_element(problem.c.begin(), problem.c.end());

  Real best = -std::numeric_limits<Real>::infinity();

  // Candidate levels m_k where the top-k coordinates (by a) exactly absorb the
  // unit mass with q_j = (1 - m / c_j) / 2. Each admissible one is the
  // objective of a feasible dual point.
  Real inv_sum = 0.0L;
  for (std::size_t k = 1; k <= n; ++k) {
    inv_sum += 0.5L / problem.c[order[k - 1]];
    const Real m = (static_cast<Real>(k) / 2.0L - 1.0L) / inv_sum;
    if (m > c_min) continue;
    Real value = m;
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t j = order[r];
      value += 0.5L * (1.0L - m / problem.c[j]) * problem.a[j];
    }
    best = std::max(best, value);
  }

  // Boundary level m = c_min with a greedy fill by descending a.
  {
    Real remaining = 1.0L;
    Real value = c_min;
    Real capacity = 0.0L;
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t j = order[r];
      const Real u = std::max(0.0L, 0.5L * (1.0L - c_min / problem.c[j]));
      capacity += u;
      const Real q = std::min(u, remaining);
      value += q * problem.a[j];
      remaining -= q;
    }
    if (capacity >= 1.0L) best = std::max(best, value);
  }
  return static_cast<double>(best);
}

double default_epsilon(std::size_t horizon, const std::vector<double>& scales) {
  if (horizon == 0 || scales.empty()) {
    throw ConfigError("default_epsilon: need n >= 1 and N >= 1");
  }
  const double c_max = *std::max_element(scales.begin(), scales.end());
  return 1.0 / (std::sqrt(static_cast<double>(horizon)) * c_max);
}

SaddleSolution solve(const SaddleProblem& problem, double epsilon,
                     const SolveOptions& options) {
  if (!(epsilon > 0.0)) throw ConfigError("solve: epsilon must be positive");
  validate(problem);
  const std::size_t n = problem.size();
  const auto& c = problem.c;
  // Work relative to max a, so a common shift of a leaves p bit-identical.
  const Real a_top = *std::max_element(problem.a.begin(), problem.a.end());
  std::vector<Real> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = problem.a[i] - a_top;
  const std::size_t cheapest = cheapest_index(c);
  const Real c_min = c[cheapest];

  if (n == 1) {
    SimplexWeights p({1.0});
    const double value = closed_form_value(problem, p);
    return {p, value, 0.0};
  }

  const auto order = order_by_a(problem);

  // Smallest feasible level s0: sum_i max(0, (a_i - s) / (2 c_i)) = 1.
  Real level = 0.0L;
  {
    Real weighted = 0.0L;
    Real inv_sum = 0.0L;
    for (std::size_t k = 1; k <= n; ++k) {
      const std::size_t i = order[k - 1];
      weighted += static_cast<Real>(a[i]) / (2.0L * c[i]);
      inv_sum += 1.0L / (2.0L * c[i]);
      level = (weighted - 1.0L) / inv_sum;
      if (k == n || level >= static_cast<Real>(a[order[k]])) break;
    }
  }

  // Walk right through breakpoints while the objective still decreases.
  // Slope of s + c_min + sum_i (c_i - c_min) max(0, (a_i - s) / (2 c_i)).
  std::size_t iterations = 0;
  for (;;) {
    if (++iterations > options.iteration_budget) break;
    Real slope = 1.0L;
    Real next = std::numeric_limits<Real>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<Real>(a[i]) > level) {
        slope -= (static_cast<Real>(c[i]) - c_min) / (2.0L * c[i]);
        next = std::min(next, static_cast<Real>(a[i]));
      }
    }
    if (slope >= -1e-15L || !std::isfinite(static_cast<double>(next))) break;
    level = next;
  }

  std::vector<Real> weights(n);
  Real mass = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = std::max(0.0L, (static_cast<Real>(a[i]) - level) / (2.0L * c[i]));
    mass += weights[i];
  }
  weights[cheapest] += std::max(0.0L, 1.0L - mass);

  SimplexWeights p(normalized(std::move(weights)));
  const Real value = closed_form_value_ld(problem, p.values());
  const Real lower = static_cast<Real>(dual_bound(problem));
  const double gap = static_cast<double>(std::max(0.0L, value - lower));
  SaddleSolution solution{p, static_cast<double>(value), gap};

  if (iterations > options.iteration_budget || gap > epsilon) {
    std::ostringstream os;
    os.precision(17);
    os << "saddle solve: certified gap " << gap << " exceeds epsilon "
       << epsilon << " after " << iterations << " iterations";
    throw SolverError(os.str(), solution);
  }
  return solution;
}

SaddleSolution solve_exact_small(const SaddleProblem& problem) {
  validate(problem);
  const std::size_t n = problem.size();
  if (n > kExactSmallMaxExperts) {
    throw SizeError("solve_exact_small supports N <= 6, got N = " +
                    std::to_string(n));
  }
  const std::size_t dim = n + 1;  // (p_1..p_N, s)
  const std::size_t num_constraints = 2 * n;

  struct Candidate {
    std::vector<double> p;
    double value;
    std::vector<std::size_t> support;
  };
  std::optional<Candidate> best;

  auto support_of = [](const std::vector<double>& p) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 1e-12) s.push_back(i);
    }
    return s;
  };
  auto preferred = [](const Candidate& x, const Candidate& y) {
    if (x.support != y.support) return x.support < y.support;
    return x.p > y.p;
  };

  // Enumerate every choice of n active inequalities out of 2n.
  std::vector<bool> active(num_constraints, false);
  std::fill(active.begin(), active.begin() + static_cast<long>(n), true);
  do {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    for (std::size_t j = 0; j < n; ++j) m(0, j) = 1.0;
    rhs[0] = 1.0;
    std::size_t row = 1;
    for (std::size_t r = 0; r < num_constraints; ++r) {
      if (!active[r]) continue;
      if (r < n) {
        m(row, r) = 1.0;  // p_r = 0
      } else {
        const std::size_t i = r - n;  // s + 2 c_i p_i = a_i
        m(row, i) = 2.0 * problem.c[i];
        m(row, n) = 1.0;
        rhs[row] = problem.a[i];
      }
      ++row;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (lu.rank() < static_cast<Eigen::Index>(dim)) continue;
    const Eigen::VectorXd x = lu.solve(rhs);

    bool feasible = true;
    for (std::size_t i = 0; i < n && feasible; ++i) {
      if (x[i] < -1e-10) feasible = false;
      if (x[n] + 2.0 * problem.c[i] * x[i] < problem.a[i] - 1e-9) {
        feasible = false;
      }
    }
    if (!feasible) continue;

    std::vector<Real> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = x[i];
    Candidate cand;
    cand.p = normalized(std::move(raw));
    cand.value = static_cast<double>(closed_form_value_ld(problem, cand.p));
    cand.support = support_of(cand.p);

    if (!best) {
      best = std::move(cand);
      continue;
    }
    const double tol = 1e-12 * (1.0 + std::fabs(best->value));
    if (cand.value < best->value - tol) {
      best = std::move(cand);
    } else if (cand.value <= best->value + tol && preferred(cand, *best)) {
      best = std::move(cand);
    }
  } while (std::prev_permutation(active.begin(), active.end()));

  if (!best) throw std::logic_error("solve_exact_small: no feasible vertex");
  return {SimplexWeights(best->p), best->value, 0.0};
}

}  // namespace msol::saddle
