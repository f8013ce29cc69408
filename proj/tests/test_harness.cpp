#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "msol/core/errors.hpp"
#include "msol/harness/experiment.hpp"
#include "msol/harness/experts.hpp"
#include "msol/harness/generators.hpp"
#include "msol/harness/verify.hpp"

using namespace msol;
using namespace msol::harness;

namespace {

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("linear stream") {
  const Vector u = Vector::Unit(4, 0);
  for (const auto& f : gen_linear_stream(4, 20, 1.0, u, 0.0, 0.0, 1)) {
    CHECK(f.subgradient(Vector::Zero(4)).norm() == 0.0);
  }
  // g_t = -L u: the offline minimizer over the ball of radius R is R u.
  const auto biased = gen_linear_stream(4, 20, 2.0, u, 2.0, 0.0, 1);
  const double R = 3.0;
  double best = 0.0;
  double at_u = 0.0;
  for (const auto& f : biased) {
    at_u += f(R * u);
    best += -2.0 * R;
  }
  CHECK(at_u == doctest::Approx(best));
  for (double p : {2.0, 1.5}) {
    for (const auto& f : gen_linear_stream(4, 200, 0.7, u, 0.3, 2.0, 9, p)) {
      CHECK(lp_norm(f.subgradient(Vector::Zero(4)), dual_exponent(p)) <= 0.7 * (1 + 1e-12));
    }
  }
  const auto a = gen_linear_stream(3, 5, 1.0, Vector::Unit(3, 1), 0.5, 1.0, 77);
  const auto b = gen_linear_stream(3, 5, 1.0, Vector::Unit(3, 1), 0.5, 1.0, 77);
  for (int t = 0; t < 5; ++t) CHECK(a[t].subgradient(Vector::Zero(3)) == b[t].subgradient(Vector::Zero(3)));
}

TEST_CASE("supervised and planted streams") {
  const auto zero = gen_supervised_stream(3, 50, [](const Vector&) { return 0.0; }, 0.0, 1.0, 2);
  for (const auto& e : zero) {
    CHECK(e.y == 0.0);
    CHECK(e.x.norm() <= 1.0 + 1e-12);
  }
  Vector w(3);
  w << 0.5, -0.5, 0.25;
  const auto lin = gen_supervised_stream(
      3, 2000, [&](const Vector& x) { return w.dot(x); }, 0.1, 5.0, 3);
  double loss = 0;
  for (const auto& e : lin) loss += std::abs(w.dot(e.x) - e.y);
  CHECK(loss / 2000 == doctest::Approx(0.1 * std::sqrt(2 / M_PI)).epsilon(0.1));
  const auto clipped = gen_supervised_stream(3, 100, [](const Vector&) { return 10.0; }, 0.0, 2.0, 4);
  for (const auto& e : clipped) CHECK(e.y == 2.0);

  for (const auto& f : gen_planted_absolute_stream(w, 50, 0.0, 5)) CHECK(f(w) == doctest::Approx(0.0));
}

TEST_CASE("expert streams respect their scales") {
  const ScaleProfile profile = ScaleProfile::uniform({1, 2, 4, 8, 16});
  for (auto kind : all_expert_adversaries()) {
    const auto stream = gen_expert_stream(kind, profile, 100, 3);
    CHECK(stream.size() == 100);
    for (const auto& g : stream) CHECK_NOTHROW(LossVector(g, profile));
    CHECK(gen_expert_stream(kind, profile, 100, 3) == stream);
  }
  const auto two = gen_two_scale_stream(10.0, 4);
  CHECK(two[0] == std::vector<double>{-1.0, 10.0});
  CHECK(two[1] == std::vector<double>{-1.0, -10.0});
}

TEST_CASE("ftpl game and hedge baseline") {
  const ScaleProfile profile = ScaleProfile::uniform({1, 100});
  const auto stream = gen_two_scale_stream(100.0, 200);
  ftpl::FtplOptions opt;
  opt.seed = 4;
  const auto r = play_ftpl(profile, stream, opt);
  CHECK(r.choices.size() == 200);
  CHECK(r.expert_totals[0] == -200.0);
  CHECK(r.certificate() == doctest::Approx(std::max(r.certificate(0), r.certificate(1))));
  CHECK(r.regret(0) == doctest::Approx(r.realized + 200.0));

  Hedge h(2, 0.5);
  CHECK(h.weights() == std::vector<double>{0.5, 0.5});
  CHECK(h.expected_loss({1.0, 3.0}) == 2.0);
  h.update({1.0, 0.0});
  CHECK(h.weights()[1] == doctest::Approx(1.0 / (1.0 + std::exp(-0.5))));
  CHECK(hedge_default_eta(2, 100, 1.0) == doctest::Approx(std::sqrt(8 * std::log(2.0) / 100) / 2));
  const auto hr = play_hedge(stream, 0.1);
  CHECK(hr.expert_totals[0] == -200.0);
}

TEST_CASE("two-expert perturbation lemma examples") {
  auto sides = perturbation_sides({0, 0}, {1, 1}, 1.0);
  CHECK(sides.lhs == 1.0);
  CHECK(sides.rhs == 1.0);
  sides = perturbation_sides({3, -2}, {0, 0}, 1.0);
  CHECK(sides.lhs == 3.0);
  CHECK(sides.rhs == 3.0);
  sides = perturbation_sides({10, 0}, {1, 1}, 1.0);
  CHECK(sides.lhs == 10.0);
  CHECK(sides.lhs <= sides.rhs);
  std::mt19937_64 rng(1);
  CHECK(verify_lemma_n2(random_scale_grid(2, 1000, 5.0, 5.0, rng)).passed());
}

TEST_CASE("perturbation theorem examples") {
  auto sides = perturbation_sides({1.5}, {2.0}, 2.0);
  CHECK(sides.lhs == 1.5);
  CHECK(sides.rhs == 1.5);
  sides = perturbation_sides({0, 0}, {1, 1}, 2.0);
  CHECK(sides.lhs == 2.0);
  CHECK(sides.rhs == 2.0);
  std::mt19937_64 rng(2);
  const auto report = verify_perturbation_theorem(3, random_scale_grid(3, 1000, 5.0, 5.0, rng));
  CHECK(report.points == 1000);
  CHECK(report.violations == 0);
  CHECK_THROWS_AS(verify_perturbation_theorem(5, {}), SizeError);
}

TEST_CASE("maximal inequality examples") {
  std::mt19937_64 rng(3);
  const MaximalInequalitySpec one{{4.0 * 25}, 2.0, {1.0}};
  const ProcessSampler zero = [](std::mt19937_64&) { return std::vector<double>{0.0}; };
  const auto z = verify_maximal_inequality(one, zero, 100, rng);
  CHECK(z.lhs_mean <= 0.0);
  CHECK(z.rhs == doctest::Approx(1.0 / 100));
  CHECK(z.passed());

  const auto r = verify_maximal_inequality(one, rademacher_process({1.0}, 25), 100000, rng);
  CHECK(r.passed());
  const MaximalInequalitySpec scaled{{10 * 4.0 * 25}, 2.0, {1.0}};
  const auto s = verify_maximal_inequality(scaled, rademacher_process({1.0}, 25), 100000, rng);
  CHECK(s.rhs == doctest::Approx(r.rhs / 10));
  CHECK(s.passed());

  CHECK_THROWS_AS(verify_maximal_inequality({{1.0}, 2.0, {0.5}}, zero, 10, rng), ConfigError);
  CHECK(maximal_penalty(100.0, 2.0, 1.0) == doctest::Approx(2.5 * 10.0 * std::sqrt(std::log(100.0))));
}

TEST_CASE("verification suite passes across seeds") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (const auto& line : run_verification_suite(5000, seed, 200, 10)) {
      CHECK_MESSAGE(line.passed, "seed " << seed << " " << line.name << ": " << line.detail);
    }
  }
}

TEST_CASE("experiment reports") {
  ExperimentConfig cfg;
  cfg.horizon = 3;
  cfg.dim = 2;
  cfg.max_experts = 3;
  cfg.seeds = {1, 2};
  cfg.sweep = {1.0};
  const auto report = run_experiment(cfg);
  REQUIRE(report.all_ok());
  const std::string csv = to_csv(report);
  CHECK(count_lines(csv) == 1 + 6);
  CHECK(csv.rfind("seed,round,expert,loss,cmp_", 0) == 0);
  CHECK(report.comparator_labels.size() == 1 + 3);

  ExperimentReport empty = report;
  empty.seeds.clear();
  CHECK(count_lines(to_csv(empty)) == 1);

  CHECK(to_csv(run_experiment(cfg)) == csv);
  CHECK(dump_json(run_experiment(cfg).summary()) == dump_json(report.summary()));

  nlohmann::json j = {{"x", 0.1}};
  CHECK(dump_json(j).find("0.10000000000000001") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "msol_test_harness";
  std::filesystem::create_directories(dir);
  emit_report(report, (dir / "r.csv").string(), (dir / "s.json").string());
  std::ifstream in(dir / "r.csv", std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == csv);
  try {
    emit_report(report, (dir / "missing" / "r.csv").string(), "");
    FAIL("expected an I/O error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("single round, single handle") {
  ExperimentConfig cfg;
  cfg.horizon = 1;
  cfg.dim = 2;
  cfg.max_experts = 1;
  const auto report = run_experiment(cfg);
  REQUIRE(report.all_ok());
  REQUIRE(report.seeds[0].rows.size() == 1);
  const auto& row = report.seeds[0].rows[0];
  CHECK(row.round == 1);
  CHECK(row.expert == 1);
  CHECK(row.regrets.back() == 0.0);
}

TEST_CASE("failing seeds are recorded, others proceed") {
  ExperimentConfig cfg;
  cfg.preset = "pca";
  cfg.horizon = 5;
  cfg.dim = 4;
  cfg.adversary = "linear";
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);

  cfg = ExperimentConfig{};
  cfg.seeds.clear();
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("experiment config round trip") {
  ExperimentConfig cfg;
  cfg.preset = "mmw";
  cfg.horizon = 33;
  cfg.dim = 3;
  cfg.max_experts = 4;
  cfg.seeds = {3, 9};
  cfg.adversary = "random";
  cfg.sweep = {0.5, 2.0};
  cfg.mode = ftpl::PerturbationMode::kRademacherExact;
  const std::string text = serialize(cfg);
  const auto back = experiment_from_key_values(configs::parse_key_values(text));
  CHECK(serialize(back) == text);
  CHECK(back.seeds == cfg.seeds);
  CHECK(back.mode == cfg.mode);

  ExperimentConfig inline_spec;
  inline_spec.spec = configs::mmw_config(2, 10, 2);
  inline_spec.horizon = 10;
  const auto again = experiment_from_key_values(configs::parse_key_values(serialize(inline_spec)));
  REQUIRE(again.spec.has_value());
  CHECK(configs::serialize(*again.spec) == configs::serialize(*inline_spec.spec));
}

TEST_CASE("oracle shape") {
  CHECK(oracle_shape(1.0, 1.0, 100) == doctest::Approx(2 * std::sqrt(100 * std::log(200.0))));
}
