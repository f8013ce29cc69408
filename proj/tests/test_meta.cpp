#include <cmath>
#include <random>

#include "doctest.h"
#include "msol/configs/configs.hpp"
#include "msol/core/errors.hpp"
#include "msol/core/stats.hpp"
#include "msol/harness/generators.hpp"
#include "msol/meta/meta.hpp"
#include "msol/subalgos/mirror_descent.hpp"

using namespace msol;
using namespace msol::meta;
using subalgos::Regularizer;

namespace {

SubAlgorithmHandle md_handle(std::string label, double R, double L, int dim,
                             double eta = 0.1, double learner_radius = -1) {
  SubAlgorithmHandle h;
  h.label = std::move(label);
  h.radius = R;
  h.lipschitz = L;
  h.learner = std::make_unique<subalgos::MirrorDescentLearner>(subalgos::md_init(
      dim, eta, learner_radius > 0 ? learner_radius : R, Regularizer::kHalfSquaredL2));
  return h;
}

SubAlgorithmHandle linear_handle(std::string label, double R, int dim,
                                 double eta = 0.1, double learner_radius = -1) {
  SubAlgorithmHandle h;
  h.label = std::move(label);
  h.radius = R;
  h.lipschitz = 1.0;
  h.supervised = std::make_unique<subalgos::LinearSupervisedLearner>(subalgos::md_init(
      dim, eta, learner_radius > 0 ? learner_radius : R, Regularizer::kHalfSquaredL2));
  return h;
}

}  // namespace

TEST_CASE("register examples") {
  SUBCASE("single handle always plays its sub-algorithm") {
    std::vector<SubAlgorithmHandle> hs;
    hs.push_back(md_handle("only", 2.0, 1.0, 2));
    MetaState m = register_handles(std::move(hs), {1.0}, 5);
    CHECK(m.size() == 1);
    Vector g(2);
    g << 0.6, -0.8;
    for (int t = 0; t < 5; ++t) {
      const Vector expected = m.handles()[0].learner->iterate();
      const auto out = m.oco_round(linear_loss(g, 3.0));
      CHECK(out.decision == expected);
      CHECK(out.chosen == 0);
      CHECK(out.centered[0] == doctest::Approx(g.dot(expected)));
    }
  }
  SUBCASE("scales are R L") {
    std::vector<SubAlgorithmHandle> hs;
    hs.push_back(md_handle("a", 1.0, 1.0, 2));
    hs.push_back(md_handle("b", std::exp(1.0), 1.0, 2));
    MetaState m = register_handles(std::move(hs), {0.5, 0.5}, 10);
    CHECK(m.ftpl().profile().scales() == std::vector<double>{1.0, std::exp(1.0)});
    CHECK(m.warnings().empty());
    CHECK(m.ftpl().bounds()[1] == ftpl::compute_bound(std::exp(1.0), 10, 0.5));
  }
  SUBCASE("sub-unit scale is lifted with a warning") {
    std::vector<SubAlgorithmHandle> hs;
    hs.push_back(md_handle("tiny", 0.3, 1.0, 2));
    MetaState m = register_handles(std::move(hs), {1.0}, 10);
    CHECK(m.ftpl().profile().scale(0) == 1.0);
    REQUIRE(m.warnings().size() == 1);
    CHECK(m.warnings()[0].find("tiny") != std::string::npos);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(register_handles({}, {}, 10), ConfigError);
    std::vector<SubAlgorithmHandle> two;
    two.push_back(md_handle("a", 1.0, 1.0, 2));
    two.push_back(md_handle("b", 2.0, 1.0, 2));
    CHECK_THROWS_AS(register_handles(std::move(two), {1.0}, 10), DimensionError);
    std::vector<SubAlgorithmHandle> zero;
    zero.push_back(md_handle("a", 1.0, 1.0, 2));
    zero.push_back(md_handle("b", 2.0, 1.0, 2));
    CHECK_THROWS_AS(register_handles(std::move(zero), {1.0, 0.0}, 10), ConfigError);
    std::vector<SubAlgorithmHandle> mixed;
    mixed.push_back(md_handle("a", 1.0, 1.0, 2));
    mixed.push_back(linear_handle("b", 1.0, 2));
    CHECK_THROWS_AS(register_handles(std::move(mixed), {0.5, 0.5}, 10), ConfigError);
    std::vector<SubAlgorithmHandle> bad;
    bad.push_back(md_handle("a", 1.0, 1.0, 2));
    bad.back().lipschitz = INFINITY;
    CHECK_THROWS_AS(register_handles(std::move(bad), {1.0}, 10), ConfigError);
  }
}

TEST_CASE("oco_round examples") {
  SUBCASE("linear loss respects R_i by Cauchy-Schwarz") {
    std::vector<SubAlgorithmHandle> hs;
    hs.push_back(md_handle("R1", 1.0, 1.0, 3, 0.5));
    hs.push_back(md_handle("R10", 10.0, 1.0, 3, 5.0));
    MetaState m = register_handles(std::move(hs), {0.5, 0.5}, 100);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 100; ++t) {
      Vector g(3);
      for (int i = 0; i < 3; ++i) g[i] = nd(rng);
      g.normalize();
      const auto out = m.oco_round(linear_loss(g));
      CHECK(std::abs(out.centered[0]) <= 1.0 + 1e-12);
      CHECK(std::abs(out.centered[1]) <= 10.0 + 1e-12);
    }
    CHECK(m.ledger().num_rounds() == 100);
  }
  SUBCASE("constant loss gives a zero vector and advances every state") {
    std::vector<SubAlgorithmHandle> hs;
    hs.push_back(md_handle("a", 1.0, 1.0, 2));
    hs.push_back(md_handle("b", 3.0, 1.0, 2));
    MetaState m = register_handles(std::move(hs), {0.5, 0.5}, 4);
    const LossFunction constant(
        2, [](const Vector&) { return 7.0; }, [](const Vector& w) { return Vector::Zero(w.size()); },
        [](double) { return 0.0; }, "const");
    const auto out = m.oco_round(constant);
    CHECK(out.centered == std::vector<double>{0.0, 0.0});
    CHECK(out.raw == std::vector<double>{7.0, 7.0});
    CHECK(m.ftpl().round() == 2);
    CHECK(m.ledger().total_loss() - m.ledger().expert_loss(1) == 0.0);
  }
  SUBCASE("range violation names the handle") {
    std::vector<SubAlgorithmHandle> hs;
    hs.push_back(md_handle("honest", 1.0, 1.0, 2, 0.1));
    hs.push_back(md_handle("liar", 1.0, 1.0, 2, 100.0, 10.0));
    MetaState m = register_handles(std::move(hs), {0.5, 0.5}, 10);
    const LossFunction f = linear_loss(Vector::Unit(2, 0));
    m.oco_round(f);  // both iterates start at the origin
    try {
      m.oco_round(f);
      FAIL("expected ScaleViolation");
    } catch (const ScaleViolation& e) {
      CHECK(e.index() == 1);
      CHECK(std::string(e.what()).find("liar") != std::string::npos);
    }
  }
  SUBCASE("dimension mismatch") {
    std::vector<SubAlgorithmHandle> hs;
    hs.push_back(md_handle("a", 1.0, 1.0, 2));
    MetaState m = register_handles(std::move(hs), {1.0}, 4);
    CHECK_THROWS_AS(m.oco_round(linear_loss(Vector::Ones(3))), DimensionError);
  }
}

TEST_CASE("learning_round examples") {
  const SupervisedLoss abs = absolute_supervised_loss();
  SUBCASE("all predictions zero give a zero loss vector") {
    std::vector<SubAlgorithmHandle> hs;
    hs.push_back(linear_handle("a", 1.0, 2));
    hs.push_back(linear_handle("b", 2.0, 2));
    MetaState m = register_handles(std::move(hs), {0.5, 0.5}, 3);
    const auto out = m.learning_round(Vector::Unit(2, 0), [] { return 0.4; }, abs);
    CHECK(out.centered == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("absolute loss of a unit prediction at label 0") {
    std::vector<SubAlgorithmHandle> hs;
    hs.push_back(linear_handle("a", 1.0, 1, 1.0));
    MetaState m = register_handles(std::move(hs), {1.0}, 3);
    Vector x(1);
    x << 1.0;
    m.learning_round(x, [] { return 1.0; }, abs);  // drives w to +1
    const auto out = m.learning_round(x, [] { return 0.0; }, abs);
    CHECK(out.predictions[0] == doctest::Approx(1.0));
    CHECK(out.prediction == out.predictions[0]);
    CHECK(out.centered[0] == doctest::Approx(1.0));
  }
  SUBCASE("label is revealed after the choice") {
    std::vector<SubAlgorithmHandle> hs;
    hs.push_back(linear_handle("a", 1.0, 2));
    MetaState m = register_handles(std::move(hs), {1.0}, 3);
    bool revealed = false;
    const auto out = m.learning_round(Vector::Unit(2, 1), [&] {
      CHECK(m.ftpl().last_step().has_value());
      revealed = true;
      return 0.5;
    }, abs);
    CHECK(revealed);
    CHECK(out.label == 0.5);
  }
  SUBCASE("prediction range violation names the handle") {
    std::vector<SubAlgorithmHandle> hs;
    hs.push_back(linear_handle("overreach", 1.0, 1, 5.0, 5.0));
    MetaState m = register_handles(std::move(hs), {1.0}, 4);
    Vector x(1);
    x << 1.0;
    m.learning_round(x, [] { return 1.0; }, abs);
    try {
      m.learning_round(x, [] { return 0.0; }, abs);
      FAIL("expected ScaleViolation");
    } catch (const ScaleViolation& e) {
      CHECK(std::string(e.what()).find("overreach") != std::string::npos);
    }
  }
  SUBCASE("wrong mode") {
    std::vector<SubAlgorithmHandle> hs;
    hs.push_back(linear_handle("a", 1.0, 2));
    MetaState m = register_handles(std::move(hs), {1.0}, 3);
    CHECK_THROWS_AS(m.oco_round(linear_loss(Vector::Ones(2))), ConfigError);
  }
}

TEST_CASE("centered and raw ledgers give the same regret") {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto spec = configs::banach_nested_config(1.0, 1.0, 300, 6, 3);
    ftpl::FtplOptions opt;
    opt.seed = seed;
    MetaState m = configs::build_meta(spec, opt);
    Vector w_star(3);
    w_star << 4.0, -1.0, 0.5;
    for (const auto& f : harness::gen_planted_absolute_stream(w_star, 300, 1.0, seed)) m.oco_round(f);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double centered = m.ledger().total_loss() - m.ledger().expert_loss(i);
      const double raw = m.raw_ledger().total_loss() - m.raw_ledger().expert_loss(i);
      CHECK(std::abs(centered - raw) <= 1e-9);
    }
  }
}

TEST_CASE("per-handle oracle certificate") {
  const std::size_t n = 200;
  const auto spec = configs::banach_nested_config(1.0, 1.0, n, 5, 3);
  std::vector<RunningStats> cert(spec.size());
  std::vector<double> bounds;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    ftpl::FtplOptions opt;
    opt.seed = seed;
    MetaState m = configs::build_meta(spec, opt);
    Vector w_star(3);
    w_star << 3.0, 0.0, -2.0;
    for (const auto& f : harness::gen_planted_absolute_stream(w_star, n, 1.0, seed + 100)) {
      m.oco_round(f);
    }
    bounds = m.ftpl().bounds();
    for (std::size_t i = 0; i < m.size(); ++i) {
      cert[i].add(m.ledger().total_loss() - m.ledger().expert_loss(i) - bounds[i]);
    }
  }
  for (std::size_t i = 0; i < cert.size(); ++i) {
    CHECK(cert[i].mean() <= 1.0 + 3 * cert[i].standard_error());
  }
}
