#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "msol/core/types.hpp"

namespace msol::saddle {

// Per-round min-max problem
//   min_{p in simplex} <p, c> + max_i (a[i] - 2 p[i] c[i]),
// the exact inner supremum over loss vectors |g[i]| <= c[i].
struct SaddleProblem {
  std::vector<double> c;
  std::vector<double> a;

  std::size_t size() const { return c.size(); }
};

struct SaddleSolution {
  SimplexWeights p;
  double value;
  // Certified additive gap: value - (dual lower bound).
  double accuracy;
};

// Carries the best iterate and its certified gap.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SaddleSolution best);
  const SaddleSolution& best() const { return best_; }

 private:
  SaddleSolution best_;
};

// a[i] = c_i - G[i] + 4 tails[i] c_i - B[i]
SaddleProblem build_saddle_coefficients(const std::vector<double>& cumulative,
                                        const std::vector<double>& tails,
                                        const ScaleProfile& profile,
                                        const std::vector<double>& bounds);

double closed_form_value(const SaddleProblem& problem, const SimplexWeights& p);

// Largest dual objective <q,a> + min_j c_j (1 - 2 q_j) over q in the simplex.
// A lower bound on the optimal value (equal to it by LP duality).
double dual_bound(const SaddleProblem& problem);

// Default accuracy 1 / (sqrt(n) * max_i c_i).
double default_epsilon(std::size_t horizon, const std::vector<double>& scales);

struct SolveOptions {
  std::size_t iteration_budget = 100000;
};

// Parametric sweep over the epigraph variable of the LP form. The result is
// certified by `dual_bound`; SolverError if the certified gap exceeds epsilon.
// Among optimal epigraph levels the smallest is taken and residual mass goes
// to the lowest index of minimal scale, so results are reproducible.
SaddleSolution solve(const SaddleProblem& problem, double epsilon,
                     const SolveOptions& options = {});

// Exhaustive vertex enumeration of the LP (test oracle), N <= 6.
// Ties between optimal vertices resolve to the lexicographically smallest
// support.
SaddleSolution solve_exact_small(const SaddleProblem& problem);

inline constexpr std::size_t kExactSmallMaxExperts = 6;

}  // namespace msol::saddle
