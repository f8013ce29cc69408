#include "msol/harness/generators.hpp"

#include <algorithm>
#include <cmath>

#include "msol/core/errors.hpp"
#include "msol/ftpl/rng.hpp"

namespace msol::harness {
namespace {

std::mt19937_64 adversary_engine(std::uint64_t seed) {
  return derived_engine(seed, 0, StreamPurpose::kAdversary);
}

double sign(std::mt19937_64& rng) { return (rng() & 1) ? 1.0 : -1.0; }

}  // namespace

Vector random_unit_sphere(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(d);
  do {
    for (int i = 0; i < d; ++i) v[i] = normal(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

Vector random_unit_ball(int d, std::mt19937_64& rng) {
  const Vector v = random_unit_sphere(d, rng);
  return v * std::pow(uniform01(rng), 1.0 / d);
}

std::vector<LossFunction> gen_linear_stream(int d, std::size_t n, double L,
                                            const Vector& bias_direction,
                                            double beta, double noise_scale,
                                            std::uint64_t seed, double p) {
  if (d < 1) throw ConfigError("linear stream: d must be >= 1");
  if (bias_direction.size() != d) {
    throw DimensionError("linear stream: bias direction has wrong dimension");
  }
  if (!(L >= 0.0) || !(noise_scale >= 0.0)) {
    throw ConfigError("linear stream: L and noise must be >= 0");
  }
  const double q = dual_exponent(p);
  auto rng = adversary_engine(seed);
  std::normal_distribution<double> normal;
  std::vector<LossFunction> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    Vector g = -beta * bias_direction;
    if (noise_scale > 0.0) {
      for (int i = 0; i < d; ++i) g[i] += noise_scale * normal(rng);
    }
    const double norm = lp_norm(g, q);
    if (norm > L) g *= L / norm;
    out.push_back(linear_loss(g));
  }
  return out;
}

std::vector<Example> gen_supervised_stream(
    int d, std::size_t n, const std::function<double(const Vector&)>& target,
    double label_noise, double label_bound, std::uint64_t seed) {
  if (d < 1) throw ConfigError("supervised stream: d must be >= 1");
  if (!(label_bound > 0.0)) {
    throw ConfigError("supervised stream: label bound must be positive");
  }
  auto rng = adversary_engine(seed);
  std::normal_distribution<double> normal;
  std::vector<Example> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    Vector x = random_unit_ball(d, rng);
    double y = target(x);
    if (label_noise > 0.0) y += label_noise * normal(rng);
    out.push_back({std::move(x), std::clamp(y, -label_bound, label_bound)});
  }
  return out;
}

std::vector<LossFunction> gen_planted_absolute_stream(const Vector& w_star,
                                                      std::size_t n,
                                                      double noise,
                                                      std::uint64_t seed) {
  const auto d = static_cast<int>(w_star.size());
  if (d < 1) throw ConfigError("planted stream: empty comparator");
  auto rng = adversary_engine(seed);
  std::normal_distribution<double> normal;
  std::vector<LossFunction> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    Vector x = random_unit_sphere(d, rng);
    double y = x.dot(w_star);
    if (noise > 0.0) y += noise * normal(rng);
    out.push_back(absolute_loss(std::move(x), y));
  }
  return out;
}

std::vector<subalgos::Matrix> gen_spike_stream(const Vector& u, std::size_t n,
                                               double noise,
                                               std::uint64_t seed) {
  const auto d = static_cast<int>(u.size());
  if (d < 1 || u.norm() == 0.0) throw ConfigError("spike stream: bad direction");
  const Vector dir = u / u.norm();
  auto rng = adversary_engine(seed);
  std::normal_distribution<double> normal;
  std::vector<subalgos::Matrix> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    Vector x = dir;
    for (int i = 0; i < d; ++i) x[i] += noise * normal(rng);
    if (x.norm() == 0.0) x = dir;
    x /= x.norm();
    subalgos::Matrix y = x * x.transpose();
    out.push_back(0.5 * (y + y.transpose()));
  }
  return out;
}

std::vector<subalgos::Matrix> gen_alternating_spike(int d, std::size_t n) {
  std::vector<subalgos::Matrix> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    subalgos::Matrix y = subalgos::Matrix::Zero(d, d);
    y(0, 0) = (t % 2 == 0) ? 1.0 : -1.0;
    out.push_back(y);
  }
  return out;
}

const char* to_string(ExpertAdversary a) {
  switch (a) {
    case ExpertAdversary::kIidSigns: return "iid-signs";
    case ExpertAdversary::kAlternating: return "alternating";
    case ExpertAdversary::kOneGood: return "one-good";
    case ExpertAdversary::kSwitchingLeader: return "switching-leader";
    case ExpertAdversary::kMultiScaleMix: return "multi-scale-mix";
  }
  return "?";
}

std::vector<ExpertAdversary> all_expert_adversaries() {
  return {ExpertAdversary::kIidSigns, ExpertAdversary::kAlternating,
          ExpertAdversary::kOneGood, ExpertAdversary::kSwitchingLeader,
          ExpertAdversary::kMultiScaleMix};
}

std::vector<std::vector<double>> gen_expert_stream(ExpertAdversary kind,
                                                   const ScaleProfile& profile,
                                                   std::size_t n,
                                                   std::uint64_t seed) {
  const std::size_t N = profile.size();
  auto rng = adversary_engine(seed);
  std::vector<std::vector<double>> out(n, std::vector<double>(N));
  const std::size_t phase = std::max<std::size_t>(1, n / 5);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      const double c = profile.scale(i);
      double v = 0.0;
      switch (kind) {
        case ExpertAdversary::kIidSigns:
          v = c * sign(rng);
          break;
        case ExpertAdversary::kAlternating:
          v = ((t + i) % 2 == 0) ? c : -c;
          break;
        case ExpertAdversary::kOneGood:
          v = i == 0 ? -0.5 * c + 0.5 * c * sign(rng) : c * sign(rng);
          break;
        case ExpertAdversary::kSwitchingLeader: {
          const std::size_t leader = (t / phase) % N;
          v = i == leader ? -c : c * (2.0 * uniform01(rng) - 1.0);
          break;
        }
        case ExpertAdversary::kMultiScaleMix:
          v = (i % 2 == 0) ? -0.2 * c * uniform01(rng) : c * sign(rng);
          break;
      }
      out[t][i] = v;
    }
  }
  return out;
}

std::vector<std::vector<double>> gen_two_scale_stream(double C, std::size_t n) {
  std::vector<std::vector<double>> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    out[t] = {-1.0, (t % 2 == 0) ? C : -C};
  }
  return out;
}

LossFunction pca_loss(const subalgos::Matrix& Y) {
  const auto d = static_cast<int>(Y.rows());
  const Vector y = subalgos::vectorize(Y);
  const double trace = Y.trace();
  return LossFunction(
      d * d, [y, trace](const Vector& w) { return trace - y.dot(w); },
      [y](const Vector&) -> Vector { return -y; },
      [](double) { return 1.0; }, "pca");
}

LossFunction trace_loss(const subalgos::Matrix& Y) {
  const auto d = static_cast<int>(Y.rows());
  const Vector y = subalgos::vectorize(Y);
  return LossFunction(
      d * d, [y](const Vector& w) { return y.dot(w); },
      [y](const Vector&) -> Vector { return y; },
      [](double) { return 1.0; }, "trace");
}

}  // namespace msol::harness
