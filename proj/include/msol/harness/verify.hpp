#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace msol::harness {

struct ScalePoint {
  std::vector<double> w;
  std::vector<double> c;
};

struct EnumerationReport {
  std::size_t points = 0;
  std::size_t violations = 0;
  double max_violation = 0.0;  // max of LHS - RHS
  double tolerance = 1e-12;
  bool passed() const { return violations == 0; }
};

// Both sides of
//   sup_sigma E_eps max_i {w_i + s eps sigma_i c_i}
//     <= E_sigma max_i {w_i + 2 s sigma_i c_i}
// by full enumeration; s = 1 is the two-expert lemma, s = 2 the general
// perturbation inequality.
struct SidePair {
  double lhs;
  double rhs;
};
SidePair perturbation_sides(const std::vector<double>& w,
                            const std::vector<double>& c, double s);

EnumerationReport verify_lemma_n2(const std::vector<ScalePoint>& grid);

inline constexpr std::size_t kPerturbationMaxExperts = 4;
EnumerationReport verify_perturbation_theorem(std::size_t N,
                                              const std::vector<ScalePoint>& grid);

// Random grid points with w ~ U[-w_range, w_range], c ~ U[0, c_range].
std::vector<ScalePoint> random_scale_grid(std::size_t N, std::size_t count,
                                          double w_range, double c_range,
                                          std::mt19937_64& rng);

struct MaximalInequalitySpec {
  std::vector<double> h;
  double p_exp = 2.0;
  std::vector<double> pi;
};

// Draws one realization of (X_1, ..., X_N).
using ProcessSampler = std::function<std::vector<double>(std::mt19937_64&)>;

// X_i = 2 c_i sum_{t <= n} sigma_t[i], with independent signs; satisfies the
// mgf premise with h_i = 4 c_i^2 n, p = 2.
ProcessSampler rademacher_process(std::vector<double> c, std::size_t n);

struct MaximalInequalityReport {
  double lhs_mean = 0.0;
  double standard_error = 0.0;
  double rhs = 0.0;
  std::size_t samples = 0;
  bool passed() const { return lhs_mean <= rhs + 3.0 * standard_error; }
};

// (2 + 1/p) h^(1/p) (ln h + ln(1/pi))^(1 - 1/p)
double maximal_penalty(double h, double p_exp, double pi);

MaximalInequalityReport verify_maximal_inequality(
    const MaximalInequalitySpec& spec, const ProcessSampler& process,
    std::size_t samples, std::mt19937_64& rng);

}  // namespace msol::harness

namespace msol::harness {

struct SuiteLine {
  std::string name;
  bool passed;
  std::string detail;
};

// The enumeration checks over `grid_points` random (w, c) per size, plus
// `maximal_specs` random maximal-inequality specs with `samples` draws each.
std::vector<SuiteLine> run_verification_suite(std::size_t samples,
                                              std::uint64_t seed,
                                              std::size_t grid_points = 1000,
                                              std::size_t maximal_specs = 10);

}  // namespace msol::harness
