#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "msol/core/loss.hpp"
#include "msol/core/types.hpp"
#include "msol/subalgos/matrix.hpp"

namespace msol::harness {

// All generators are oblivious: the whole stream is drawn up front from the
// seed, before any play.

// f_t(w) = <g_t, w> with g_t = -beta u + noise xi_t, rescaled so that
// ||g_t||_q <= L for the dual exponent q of `p`.
std::vector<LossFunction> gen_linear_stream(int d, std::size_t n, double L,
                                            const Vector& bias_direction,
                                            double beta, double noise_scale,
                                            std::uint64_t seed, double p = 2.0);

// Uniform on the unit l2 ball.
Vector random_unit_ball(int d, std::mt19937_64& rng);
// Uniform on the unit l2 sphere.
Vector random_unit_sphere(int d, std::mt19937_64& rng);

struct Example {
  Vector x;
  double y;
};

// Contexts on the unit l2 ball, y = target(x) + noise N(0,1), clipped to
// [-label_bound, label_bound].
std::vector<Example> gen_supervised_stream(
    int d, std::size_t n, const std::function<double(const Vector&)>& target,
    double label_noise, double label_bound, std::uint64_t seed);

// f_t(w) = |<x_t, w> - y_t| with x_t on the unit sphere and
// y_t = <x_t, w_star> + noise N(0,1).
std::vector<LossFunction> gen_planted_absolute_stream(const Vector& w_star,
                                                      std::size_t n,
                                                      double noise,
                                                      std::uint64_t seed);

// Rank-one loss matrices Y_t = x_t x_t^T with x_t proportional to
// u + noise xi_t, normalized to unit length.
std::vector<subalgos::Matrix> gen_spike_stream(const Vector& u, std::size_t n,
                                               double noise,
                                               std::uint64_t seed);

// Y_t = +/- e_1 e_1^T alternating, starting with +.
std::vector<subalgos::Matrix> gen_alternating_spike(int d, std::size_t n);

// Expert loss streams with |g_t[i]| <= c_i.
enum class ExpertAdversary {
  kIidSigns,         // g[i] = c_i * sign
  kAlternating,      // g[i] = c_i * (-1)^(t+i)
  kOneGood,          // expert 0 drifts negative, others noise
  kSwitchingLeader,  // the best expert changes every n/5 rounds
  kMultiScaleMix,    // small-scale experts steady, large-scale ones noisy
};

const char* to_string(ExpertAdversary a);
std::vector<ExpertAdversary> all_expert_adversaries();

std::vector<std::vector<double>> gen_expert_stream(ExpertAdversary kind,
                                                   const ScaleProfile& profile,
                                                   std::size_t n,
                                                   std::uint64_t seed);

// Two experts: expert 0 pays a constant -1, expert 1 alternates +C, -C
// starting at +C.
std::vector<std::vector<double>> gen_two_scale_stream(double C, std::size_t n);

// Linear loss matrices as functions of a vectorized d x d decision.
LossFunction pca_loss(const subalgos::Matrix& Y);  // <I - W, Y>
LossFunction trace_loss(const subalgos::Matrix& Y);  // <W, Y>

}  // namespace msol::harness
