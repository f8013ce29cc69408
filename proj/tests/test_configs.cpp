#include <cmath>
#include <random>

#include "doctest.h"
#include "msol/configs/configs.hpp"
#include "msol/core/errors.hpp"
#include "msol/harness/experiment.hpp"
#include "msol/harness/generators.hpp"

using namespace msol;
using namespace msol::configs;

TEST_CASE("banach nested config") {
  const auto spec = banach_nested_config(1.0, 1.0, 3);
  REQUIRE(spec.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(spec.handles[i].radius == doctest::Approx(std::exp(static_cast<double>(i))));
    CHECK(spec.handles[i].eta == doctest::Approx(spec.handles[i].radius * std::sqrt(1.0 / 3.0)));
    CHECK(spec.prior[i] == 0.25);
    CHECK(spec.handles[i].kind == LearnerKind::kMirrorDescent);
  }
  const auto capped = banach_nested_config(1.0, 1.0, 2000, 15);
  CHECK(capped.size() == 15);
  CHECK(capped.handles.back().radius == doctest::Approx(std::exp(14.0)));
  CHECK(capped.prior.front() == doctest::Approx(1.0 / 15));

  const auto scaled = banach_nested_config(2.0, 0.5, 100, 3, 4, 1.5);
  CHECK(scaled.handles[2].eta == doctest::Approx(std::exp(2.0) / 2.0 * std::sqrt(0.005)));
  CHECK(scaled.handles[0].regularizer == subalgos::Regularizer::kHalfSquaredLp);

  CHECK_THROWS_AS(banach_nested_config(1.0, 1.0, 5000), ConfigError);  // e^5000 overflows
  CHECK_THROWS_AS(banach_nested_config(1.0, 0.0, 5), ConfigError);
}

TEST_CASE("nested radii cover every norm up to a factor e") {
  const auto spec = banach_nested_config(1.0, 1.0, 100, 12);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 11.0);
  for (int k = 0; k < 1000; ++k) {
    const double target = std::exp(u(rng));
    bool covered = false;
    for (const auto& h : spec.handles) {
      covered = covered || (target <= h.radius && h.radius <= std::exp(1.0) * target * (1 + 1e-12));
    }
    CHECK(covered);
  }
}

TEST_CASE("lp grid exponents") {
  const auto two = lp_grid_exponents(0.5, std::exp(1.0));
  REQUIRE(two.size() == 2);
  CHECK(two[0] == doctest::Approx(1.5));
  CHECK(two[1] == doctest::Approx(2.0));
  CHECK(lp_grid_exponents(1e-12, std::exp(10.0)).size() == 11);
  CHECK(lp_grid_exponents(0.25, 10).size() == 3);
  CHECK_THROWS_AS(lp_grid_exponents(0.0, 10), ConfigError);
  CHECK_THROWS_AS(lp_grid_exponents(1.0, 10), ConfigError);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double delta = 0.01 + 0.98 * u(rng);
    const double d = 2.0 + 1000.0 * u(rng);
    const auto ps = lp_grid_exponents(delta, d);
    const double eps = 1.0 / std::log(d);
    CHECK(std::pow(d, eps) == doctest::Approx(std::exp(1.0)));
    for (double p : ps) {
      CHECK(p >= 1.0 + delta);
      CHECK(p <= 2.0);
    }
    CHECK(ps.back() == 2.0);
    // Every p in [1 + delta, 2] has a grid point just below it.
    for (int j = 0; j < 50; ++j) {
      const double p = 1.0 + delta + (1.0 - delta) * u(rng);
      double best = -1;
      for (double q : ps) if (q <= p) best = std::max(best, q);
      CHECK(best > 0);
      CHECK(p - best <= eps + 1e-12);
    }
  }
}

TEST_CASE("lp grid config") {
  const auto spec = lp_grid_config(0.25, 10, [](double p) { return p; }, 100, 4);
  CHECK(spec.size() == 12);
  CHECK(spec.prior.front() == doctest::Approx(1.0 / 12));
  const auto& h = spec.handles[5];  // k = 2, j = 2
  CHECK(h.p == doctest::Approx(1.25 + 1.0 / std::log(10.0)));
  CHECK(h.lipschitz == doctest::Approx(h.p));
  CHECK(h.radius == doctest::Approx(std::exp(1.0)));
  CHECK(h.eta == doctest::Approx(h.radius / h.lipschitz * std::sqrt((h.p - 1) / 100.0)));
  CHECK_THROWS_AS(lp_grid_config(0.25, 1, [](double) { return 1.0; }, 10), ConfigError);
}

TEST_CASE("pca config") {
  CHECK(pca_trace_budgets(2) == std::vector<int>{1});
  CHECK(pca_trace_budgets(16) == std::vector<int>{1, 3, 7, 8});
  const auto spec = pca_config(16, 100);
  CHECK(spec.size() == 4);
  for (const auto& h : spec.handles) {
    CHECK(h.trace_budget <= 8);
    CHECK(h.radius == h.trace_budget);
  }
  // |<W, Y>| <= ||Y||_op ||W||_trace = k on the capped spectraplex.
  auto handles = instantiate(spec);
  std::mt19937_64 rng(3);
  for (const auto& y : harness::gen_spike_stream(Vector::Unit(16, 0), 20, 0.5, 4)) {
    for (std::size_t i = 0; i < handles.size(); ++i) {
      const Vector w = handles[i].learner->iterate();
      CHECK(std::abs(subalgos::vectorize(y).dot(w)) <= handles[i].radius + 1e-9);
      handles[i].learner->update(-subalgos::vectorize(y));
    }
  }
}

TEST_CASE("mmw config") {
  const auto spec = mmw_config(3, 3);
  REQUIRE(spec.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(spec.handles[i].radius == std::ldexp(1.0, static_cast<int>(i)));
  CHECK(mmw_config(3, 1000, 20).handles.back().radius == std::ldexp(1.0, 19));
  const auto scalar = mmw_config(1, 10, 2);
  CHECK(scalar.dim == 1);
}

TEST_CASE("mkl config") {
  const auto one = mkl_config({{"linear", 0.0, 1}}, 50, 3, 4);
  CHECK(one.size() == 4);
  double total = 0;
  for (double p : one.prior) total += p;
  CHECK(total == doctest::Approx(1.0));

  const auto two = mkl_config({{"linear", 0.0, 1}, {"rbf", 1.0, 1}}, 50, 3, 4);
  CHECK(two.prior[0] / two.prior[4] == doctest::Approx(4.0));
  double sum2 = 0;
  for (double p : two.prior) sum2 += p;
  CHECK(sum2 == doctest::Approx(1.0));

  CHECK_THROWS_AS(mkl_config({{"sigmoid", 1.0, 1}}, 10, 3), ConfigError);
}

TEST_CASE("one linear kernel reduces to nested l2 balls") {
  const std::size_t n = 200;
  const int d = 3;
  auto kern = instantiate(mkl_config({{"linear", 0.0, 1}}, n, d, 5));
  auto lin = instantiate(banach_nested_config(1.0, 1.0, n, 5, d, 2.0, true));
  REQUIRE(kern.size() == lin.size());
  Vector target(d);
  target << 2.0, -1.0, 0.5;
  const auto stream = harness::gen_supervised_stream(
      d, n, [&](const Vector& x) { return target.dot(x); }, 0.3, 10.0, 8);
  const SupervisedLoss loss = absolute_supervised_loss();
  for (const auto& ex : stream) {
    for (std::size_t i = 0; i < kern.size(); ++i) {
      const double a = kern[i].supervised->predict(ex.x);
      const double b = lin[i].supervised->predict(ex.x);
      CHECK(std::abs(a - b) <= 1e-9);
      kern[i].supervised->update(ex.x, loss.derivative(a, ex.y));
      lin[i].supervised->update(ex.x, loss.derivative(b, ex.y));
    }
  }
}

TEST_CASE("comparator range") {
  const double n = 7;
  const auto a = comparator_range(1.0, n, std::sqrt(n), 0.5);
  CHECK(a.value == doctest::Approx(std::exp(n)));
  CHECK_FALSE(a.overflow);
  CHECK(comparator_range(2.0, 5, 10.0, 1.0).value == doctest::Approx(std::exp(1.0)));
  CHECK(comparator_range(3.0, 4, 12.0, 0.1).value == doctest::Approx(std::exp(1.0)));
  const auto big = comparator_range(1.0, 2000, std::sqrt(2000.0), 0.5);
  CHECK(big.overflow);
  CHECK(std::isinf(big.value));
  CHECK_THROWS_AS(comparator_range(1, 1, 0, 1), ConfigError);
}

TEST_CASE("serialization round trip") {
  for (const auto& name : preset_names()) {
    const auto spec = make_preset(name, 40, 4, 5);
    const std::string text = serialize(spec);
    const auto back = deserialize(text);
    CHECK(serialize(back) == text);
    REQUIRE(back.size() == spec.size());
    CHECK(back.prior == spec.prior);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      CHECK(back.handles[i].label == spec.handles[i].label);
      CHECK(back.handles[i].eta == spec.handles[i].eta);
      CHECK(back.handles[i].radius == spec.handles[i].radius);
      CHECK(back.handles[i].p == spec.handles[i].p);
    }
  }
  CHECK_THROWS_AS(deserialize("schema = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_key_values("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_key_values("no equals sign\n"), ConfigError);
  CHECK(parse_key_values("# comment\n a = b  # trailing\n").at("a") == "b");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK_THROWS_AS(make_preset("nope", 10, 2, {}), ConfigError);
}

TEST_CASE("every preset registers and plays its streams without range errors") {
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases{
      {"banach", {"planted-absolute", "linear"}},
      {"lp-grid", {"planted-absolute", "linear"}},
      {"pca", {"spike"}},
      {"mmw", {"alternating", "random"}},
      {"mkl", {"linear-target"}},
  };
  for (const auto& [preset, adversaries] : cases) {
    for (const auto& adversary : adversaries) {
      harness::ExperimentConfig cfg;
      cfg.preset = preset;
      cfg.horizon = 40;
      cfg.dim = 4;
      cfg.max_experts = 6;
      cfg.adversary = adversary;
      cfg.adversary_norm = 3.0;
      cfg.adversary_noise = 0.5;
      cfg.seeds.clear();
      for (std::uint64_t s = 1; s <= 20; ++s) cfg.seeds.push_back(s);
      const auto report = harness::run_experiment(cfg);
      CHECK_MESSAGE(report.all_ok(), preset << "/" << adversary << ": "
                                            << report.seeds.front().diagnostic);
    }
  }
}
