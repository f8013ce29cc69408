#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "msol/core/errors.hpp"
#include "msol/core/exact_sum.hpp"
#include "msol/core/ledger.hpp"
#include "msol/core/loss.hpp"
#include "msol/core/stats.hpp"
#include "msol/core/types.hpp"
#include "oracles/finite_difference.hpp"

using namespace msol;

namespace {

Vector random_vector(int d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n;
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = scale * n(rng);
  return v;
}

}  // namespace

TEST_CASE("exact sum is order independent and exactly rounded") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v;
  for (int i = 0; i < 2000; ++i) v.push_back(u(rng) * std::pow(10.0, (i % 13) - 6));
  v.push_back(1e16);
  v.push_back(-1e16);
  const double reference = exact_sum(v);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(exact_sum(v) == reference);
  }

  ExactSum s;
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  CHECK(s.value() == 1.0);

  ExactSum tenth;
  for (int i = 0; i < 10; ++i) tenth.add(0.1);
  CHECK(tenth.value() == 1.0);
}

TEST_CASE("scale profile validation") {
  CHECK_NOTHROW(ScaleProfile({1.0, 2.5}, {0.5, 0.5}));
  CHECK_THROWS_AS(ScaleProfile({}, {}), ConfigError);
  CHECK_THROWS_AS(ScaleProfile({1.0}, {0.5, 0.5}), DimensionError);
  CHECK_THROWS_AS(ScaleProfile({0.5}, {1.0}), ConfigError);
  CHECK_THROWS_AS(ScaleProfile({1.0, 1.0}, {1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(ScaleProfile({1.0, 1.0}, {0.6, 0.6}), ConfigError);
  CHECK_THROWS_AS(ScaleProfile({NAN}, {1.0}), ConfigError);

  std::vector<std::string> warnings;
  const ScaleProfile lifted = ScaleProfile::lifted({0.3, 4.0}, {0.5, 0.5}, &warnings);
  CHECK(lifted.scale(0) == 1.0);
  CHECK(lifted.scale(1) == 4.0);
  CHECK(warnings.size() == 1);
  CHECK(lifted.max_scale() == 4.0);

  const ScaleProfile uni = ScaleProfile::uniform({1.0, 2.0, 3.0});
  CHECK(uni.prior(2) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("loss vector rejects out-of-range entries (property)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<double> c(n);
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) c[i] = 1.0 + 20.0 * u(rng);
    const ScaleProfile profile = ScaleProfile::uniform(c);
    const int bad = static_cast<int>(rng() % (n + 1));  // n means all valid
    for (int i = 0; i < n; ++i) {
      const double sgn = (rng() & 1) ? 1.0 : -1.0;
      g[i] = sgn * c[i] * (i == bad ? 1.0 + 1e-9 + u(rng) : u(rng));
    }
    if (bad == n) {
      CHECK_NOTHROW(LossVector(g, profile));
    } else {
      try {
        LossVector lv(g, profile);
        FAIL("expected ScaleViolation");
      } catch (const ScaleViolation& e) {
        CHECK(e.index() == static_cast<std::size_t>(bad));
      }
    }
  }
  // The boundary itself, and the relative slack.
  const ScaleProfile p = ScaleProfile::uniform({3.0});
  CHECK_NOTHROW(LossVector({3.0}, p));
  CHECK_NOTHROW(LossVector({-3.0 * (1.0 + 0.5e-12)}, p));
  CHECK_THROWS_AS(LossVector({3.0 * (1.0 + 1e-11)}, p), ScaleViolation);
  CHECK_THROWS_AS(LossVector({1.0, 1.0}, p), DimensionError);
}

TEST_CASE("simplex weights") {
  CHECK_THROWS(SimplexWeights({0.5, 0.6}));
  CHECK_THROWS(SimplexWeights({-0.1, 1.1}));
  const SimplexWeights w({0.25, 0.0, 0.75});
  CHECK(w.sample(0.0) == 0);
  CHECK(w.sample(0.2499) == 0);
  CHECK(w.sample(0.25) == 2);
  CHECK(w.sample(0.999999) == 2);
  const SimplexWeights uni = SimplexWeights::uniform(4);
  CHECK(uni[3] == 0.25);
}

TEST_CASE("built-in losses: subgradients match finite differences") {
  std::mt19937_64 rng(99);
  const int d = 4;
  std::vector<LossFunction> losses;
  for (int k = 0; k < 3; ++k) {
    losses.push_back(linear_loss(random_vector(d, rng), 0.3));
    losses.push_back(absolute_loss(random_vector(d, rng), 0.7));
    losses.push_back(hinge_loss(random_vector(d, rng), k % 2 ? 1.0 : -1.0));
  }
  for (const auto& f : losses) {
    int checked = 0;
    while (checked < 10) {
      const Vector x = random_vector(d, rng, 2.0);
      const Vector dir = random_vector(d, rng).normalized();
      const double analytic = f.subgradient(x).dot(dir);
      const double numeric = oracle::directional_derivative(
          [&](const Vector& w) { return f(w); }, x, dir);
      // Skip points within the difference step of a kink.
      const double kink_gap = std::abs(f(x + 1e-5 * dir) + f(x - 1e-5 * dir) - 2 * f(x));
      if (kink_gap > 1e-9) continue;
      CHECK(std::abs(analytic - numeric) <= 1e-4 * std::max(1.0, std::abs(analytic)));
      ++checked;
    }
  }
}

TEST_CASE("lipschitz constants are dual norms") {
  Vector g(3);
  g << 3.0, -4.0, 0.0;
  const LossFunction f = linear_loss(g);
  CHECK(f.lipschitz(2.0) == doctest::Approx(5.0));
  CHECK(f.lipschitz(1.0) == doctest::Approx(4.0));
  CHECK(f.lipschitz(std::numeric_limits<double>::infinity()) == doctest::Approx(7.0));
  CHECK(lp_norm(g, 1.5) == doctest::Approx(std::pow(std::pow(3.0, 1.5) + std::pow(4.0, 1.5), 1 / 1.5)));
}

TEST_CASE("center_loss examples") {
  Vector g(2);
  g << 1.5, -2.0;
  const Vector w = Vector::Constant(2, 0.75);
  SUBCASE("linear loss unchanged") {
    const LossFunction c = center_loss(linear_loss(g));
    CHECK(c(w) == linear_loss(g)(w));
  }
  SUBCASE("constant shift removed") {
    const LossFunction c = center_loss(linear_loss(g, 7.0));
    CHECK(c(w) == doctest::Approx(g.dot(w)));
    CHECK(c(Vector::Zero(2)) == 0.0);
  }
  SUBCASE("|w - 1| over the reals") {
    Vector one(1);
    one << 1.0;
    const LossFunction c = center_loss(absolute_loss(one, 1.0));
    Vector two(1);
    two << 2.0;
    CHECK(c(Vector::Zero(1)) == 0.0);
    CHECK(c(two) == 0.0);
  }
  SUBCASE("subgradients unchanged") {
    const LossFunction f = hinge_loss(g, 1.0);
    const LossFunction c = center_loss(f);
    CHECK(c.subgradient(w) == f.subgradient(w));
  }
  SUBCASE("not finite at zero") {
    const LossFunction bad(1, [](const Vector& v) { return 1.0 / v[0]; },
                           [](const Vector& v) { return v; }, [](double) { return 1.0; });
    CHECK_THROWS_AS(center_loss(bad), ConfigError);
  }
}

TEST_CASE("center_loss is idempotent") {
  std::mt19937_64 rng(3);
  const int d = 3;
  const std::vector<LossFunction> losses{
      linear_loss(random_vector(d, rng), 2.0),
      absolute_loss(random_vector(d, rng), -1.0),
      hinge_loss(random_vector(d, rng), 1.0)};
  for (const auto& f : losses) {
    const LossFunction once = center_loss(f);
    const LossFunction twice = center_loss(once);
    for (int k = 0; k < 50; ++k) {
      const Vector w = random_vector(d, rng, 3.0);
      CHECK(twice(w) == doctest::Approx(once(w)).epsilon(1e-14));
    }
  }
}

TEST_CASE("cumulative_regret examples") {
  RegretLedger a(1);
  for (int t = 1; t <= 3; ++t) a.record_round(t, 0, 1.0);
  CHECK(cumulative_regret(a, 3.0) == 0.0);

  RegretLedger b(1);
  b.record_round(1, 0, 0.0);
  b.record_round(2, 0, 0.0);
  CHECK(cumulative_regret(b, -2.0) == 2.0);

  RegretLedger c(1);
  for (int t = 1; t <= 100; ++t) c.record_round(t, 0, 0.5);
  CHECK(cumulative_regret(c, 40.0) == 10.0);

  CHECK_THROWS_AS(cumulative_regret(RegretLedger(1), 0.0), ConfigError);
}

TEST_CASE("ledger totals are permutation independent") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::vector<double> losses(5000);
  for (double& x : losses) x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 9) - 4);
  RegretLedger base(2);
  for (std::size_t t = 0; t < losses.size(); ++t) {
    base.record_round(t + 1, 0, losses[t]);
    base.record_expert_losses({losses[t], -losses[t]});
  }
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(losses.begin(), losses.end(), rng);
    RegretLedger other(2);
    for (std::size_t t = 0; t < losses.size(); ++t) {
      other.record_round(t + 1, 0, losses[t]);
      other.record_expert_losses({losses[t], -losses[t]});
    }
    CHECK(other.total_loss() == base.total_loss());
    CHECK(other.expert_loss(1) == base.expert_loss(1));
  }
  CHECK(base.total_loss() == -base.expert_loss(1));
  CHECK_THROWS_AS(base.record_expert_losses({1.0}), DimensionError);
}

TEST_CASE("running stats") {
  RunningStats s;
  for (double x : {1.0, 2.0, 3.0, 4.0}) s.add(x);
  CHECK(s.mean() == 2.5);
  CHECK(s.variance() == doctest::Approx(5.0 / 3.0));
  CHECK(s.standard_error() == doctest::Approx(std::sqrt(5.0 / 12.0)));
}
