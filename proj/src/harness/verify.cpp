#include "msol/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "msol/core/errors.hpp"
#include "msol/core/exact_sum.hpp"
#include "msol/core/stats.hpp"
#include "msol/ftpl/rng.hpp"

namespace msol::harness {
namespace {

double max_shifted(const std::vector<double>& w, const std::vector<double>& c,
                   unsigned mask, double scale) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double sigma = (mask >> i) & 1u ? 1.0 : -1.0;
    best = std::max(best, w[i] + scale * sigma * c[i]);
  }
  return best;
}

void check_point(const ScalePoint& pt, std::size_t N) {
  if (pt.w.size() != N || pt.c.size() != N) {
    throw DimensionError("verify: grid point has wrong length");
  }
  for (double v : pt.c) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("verify: scales must be finite and >= 0");
    }
  }
}

EnumerationReport run_grid(std::size_t N, const std::vector<ScalePoint>& grid,
                           double s) {
  EnumerationReport report;
  for (const auto& pt : grid) {
    check_point(pt, N);
    const SidePair sides = perturbation_sides(pt.w, pt.c, s);
    const double gap = sides.lhs - sides.rhs;
    report.max_violation = report.points == 0 ? gap : std::max(report.max_violation, gap);
    if (gap > report.tolerance) ++report.violations;
    ++report.points;
  }
  return report;
}

}  // namespace

SidePair perturbation_sides(const std::vector<double>& w,
                            const std::vector<double>& c, double s) {
  const std::size_t N = w.size();
  const unsigned patterns = 1u << N;
  double lhs = -std::numeric_limits<double>::infinity();
  ExactSum rhs;
  for (unsigned mask = 0; mask < patterns; ++mask) {
    // eps = +1 uses sigma, eps = -1 uses the complementary pattern.
    ExactSum avg;
    avg.add(0.5 * max_shifted(w, c, mask, s));
    avg.add(0.5 * max_shifted(w, c, ~mask & (patterns - 1), s));
    lhs = std::max(lhs, avg.value());
    rhs.add(max_shifted(w, c, mask, 2.0 * s));
  }
  return {lhs, rhs.value() / static_cast<double>(patterns)};
}

EnumerationReport verify_lemma_n2(const std::vector<ScalePoint>& grid) {
  return run_grid(2, grid, 1.0);
}

EnumerationReport verify_perturbation_theorem(
    std::size_t N, const std::vector<ScalePoint>& grid) {
  if (N < 1 || N > kPerturbationMaxExperts) {
    throw SizeError("verify_perturbation_theorem: N must be in [1, 4], got " +
                    std::to_string(N));
  }
  return run_grid(N, grid, 2.0);
}

std::vector<ScalePoint> random_scale_grid(std::size_t N, std::size_t count,
                                          double w_range, double c_range,
                                          std::mt19937_64& rng) {
  std::vector<ScalePoint> grid(count);
  for (auto& pt : grid) {
    pt.w.resize(N);
    pt.c.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      pt.w[i] = w_range * (2.0 * uniform01(rng) - 1.0);
      pt.c[i] = c_range * uniform01(rng);
    }
  }
  return grid;
}

ProcessSampler rademacher_process(std::vector<double> c, std::size_t n) {
  return [c = std::move(c), n](std::mt19937_64& rng) {
    std::vector<double> x(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      x[i] = 2.0 * c[i] * static_cast<double>(rademacher_sum(rng, n));
    }
    return x;
  };
}

double maximal_penalty(double h, double p_exp, double pi) {
  return (2.0 + 1.0 / p_exp) * std::pow(h, 1.0 / p_exp) *
         std::pow(std::log(h) + std::log(1.0 / pi), 1.0 - 1.0 / p_exp);
}

MaximalInequalityReport verify_maximal_inequality(
    const MaximalInequalitySpec& spec, const ProcessSampler& process,
    std::size_t samples, std::mt19937_64& rng) {
  const std::size_t N = spec.h.size();
  if (N == 0 || spec.pi.size() != N) {
    throw DimensionError("maximal inequality: h and pi must have equal length");
  }
  if (!(spec.p_exp > 0.0)) throw ConfigError("maximal inequality: need p > 0");
  if (samples == 0) throw ConfigError("maximal inequality: need samples >= 1");
  std::vector<double> penalty(N);
  ExactSum rhs;
  for (std::size_t i = 0; i < N; ++i) {
    if (!(spec.h[i] > 0.0) || !(spec.pi[i] > 0.0)) {
      throw ConfigError("maximal inequality: h and pi must be positive");
    }
    if (spec.h[i] / spec.pi[i] < std::exp(1.0)) {
      throw ConfigError("maximal inequality: h_i / pi_i >= e violated at index " +
                        std::to_string(i));
    }
    penalty[i] = maximal_penalty(spec.h[i], spec.p_exp, spec.pi[i]);
    rhs.add(spec.pi[i] / spec.h[i]);
  }
  RunningStats stats;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::vector<double> x = process(rng);
    if (x.size() != N) throw DimensionError("maximal inequality: sampler length");
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) sup = std::max(sup, x[i] - penalty[i]);
    stats.add(sup);
  }
  return {stats.mean(), stats.standard_error(), rhs.value(), samples};
}

}  // namespace msol::harness

namespace msol::harness {
namespace {

std::string describe(const EnumerationReport& r) {
  std::ostringstream os;
  os << r.points << " points, " << r.violations << " violations, max LHS-RHS "
     << r.max_violation;
  return os.str();
}

}  // namespace

std::vector<SuiteLine> run_verification_suite(std::size_t samples,
                                              std::uint64_t seed,
                                              std::size_t grid_points,
                                              std::size_t maximal_specs) {
  std::vector<SuiteLine> lines;
  auto rng = derived_engine(seed, 0, StreamPurpose::kMonteCarlo);

  auto grid2 = random_scale_grid(2, grid_points, 10.0, 5.0, rng);
  grid2.push_back({{0.0, 0.0}, {1.0, 1.0}});
  grid2.push_back({{0.0, 0.0}, {0.0, 0.0}});
  grid2.push_back({{10.0, 0.0}, {1.0, 1.0}});
  const EnumerationReport n2 = verify_lemma_n2(grid2);
  lines.push_back({"lemma N=2", n2.passed(), describe(n2)});

  for (std::size_t N = 1; N <= kPerturbationMaxExperts; ++N) {
    const auto grid = random_scale_grid(N, grid_points, 10.0, 5.0, rng);
    const EnumerationReport r = verify_perturbation_theorem(N, grid);
    lines.push_back({"perturbation N=" + std::to_string(N), r.passed(), describe(r)});
  }

  for (std::size_t s = 0; s < maximal_specs; ++s) {
    const std::size_t N = 1 + rng() % 5;
    const std::size_t n = 1 + rng() % 200;
    std::vector<double> c(N);
    std::vector<double> pi(N);
    double mass = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      c[i] = 1.0 + 9.0 * uniform01(rng);
      pi[i] = 0.05 + uniform01(rng);
      mass += pi[i];
    }
    MaximalInequalitySpec spec;
    spec.p_exp = 2.0;
    for (std::size_t i = 0; i < N; ++i) {
      pi[i] /= mass;
      spec.h.push_back(4.0 * c[i] * c[i] * static_cast<double>(n));
    }
    spec.pi = pi;
    auto mc = derived_engine(seed, s + 1, StreamPurpose::kMonteCarlo);
    const MaximalInequalityReport r =
        verify_maximal_inequality(spec, rademacher_process(c, n), samples, mc);
    std::ostringstream os;
    os << "N=" << N << " n=" << n << " LHS " << r.lhs_mean << " +- "
       << r.standard_error << " vs RHS " << r.rhs;
    lines.push_back({"maximal spec " + std::to_string(s + 1), r.passed(), os.str()});
  }
  return lines;
}

}  // namespace msol::harness
