#include "msol/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "msol/core/errors.hpp"
#include "msol/core/exact_sum.hpp"
#include "msol/core/stats.hpp"
#include "msol/ftpl/rng.hpp"
#include "msol/harness/generators.hpp"

namespace msol::harness {
namespace {

using configs::LearnerKind;
using nlohmann::json;

enum class GameKind { kVector, kPca, kMmw, kSupervised };

GameKind game_kind(const configs::ConfigSpec& spec) {
  switch (spec.handles.front().kind) {
    case LearnerKind::kMirrorDescent: return GameKind::kVector;
    case LearnerKind::kMatrixEg: return GameKind::kPca;
    case LearnerKind::kMmw: return GameKind::kMmw;
    case LearnerKind::kLinearSupervised:
    case LearnerKind::kKernelOgd: return GameKind::kSupervised;
  }
  return GameKind::kVector;
}

std::string default_adversary(GameKind kind) {
  switch (kind) {
    case GameKind::kVector: return "planted-absolute";
    case GameKind::kPca: return "spike";
    case GameKind::kMmw: return "alternating";
    case GameKind::kSupervised: return "linear-target";
  }
  return "";
}

void check_adversary(GameKind kind, const std::string& name) {
  const bool ok =
      (kind == GameKind::kVector && (name == "planted-absolute" || name == "linear")) ||
      (kind == GameKind::kPca && name == "spike") ||
      (kind == GameKind::kMmw && (name == "alternating" || name == "random")) ||
      (kind == GameKind::kSupervised && name == "linear-target");
  if (!ok) throw ConfigError("experiment: adversary '" + name + "' does not fit these handles");
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

std::vector<double> parse_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("experiment: bad number '" + item + "' in '" + key + "'");
    }
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size() || s.find('-') != std::string::npos) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("experiment: key '" + key + "' needs a nonnegative integer, got '" + s + "'");
  }
}

Vector unit_e1(int d) {
  Vector e = Vector::Zero(d);
  e[0] = 1.0;
  return e;
}

subalgos::Matrix e1e1(int d) {
  subalgos::Matrix m = subalgos::Matrix::Zero(d, d);
  m(0, 0) = 1.0;
  return m;
}

struct Game {
  std::vector<LossFunction> oco;
  std::vector<Example> examples;
  std::vector<Vector> comparators;  // decisions, or linear predictors
};

Game build_game(const ExperimentConfig& cfg, const configs::ConfigSpec& spec,
                std::uint64_t seed) {
  const GameKind kind = game_kind(spec);
  const std::string adversary = cfg.adversary.empty() ? default_adversary(kind) : cfg.adversary;
  check_adversary(kind, adversary);
  const int d = spec.handles.front().dim;
  const std::size_t n = spec.horizon;
  Game game;
  switch (kind) {
    case GameKind::kVector: {
      if (adversary == "planted-absolute") {
        game.oco = gen_planted_absolute_stream(cfg.adversary_norm * unit_e1(d), n,
                                               cfg.adversary_noise, seed);
      } else {
        const double L = spec.handles.front().lipschitz;
        game.oco = gen_linear_stream(d, n, L, unit_e1(d), std::min(cfg.adversary_norm, L),
                                     cfg.adversary_noise, seed);
      }
      for (double r : cfg.sweep) game.comparators.push_back(r * unit_e1(d));
      break;
    }
    case GameKind::kPca: {
      for (const auto& y : gen_spike_stream(unit_e1(d), n, cfg.adversary_noise, seed)) {
        game.oco.push_back(pca_loss(y));
      }
      for (double r : cfg.sweep) game.comparators.push_back(subalgos::vectorize(r * e1e1(d)));
      break;
    }
    case GameKind::kMmw: {
      if (adversary == "alternating") {
        for (const auto& y : gen_alternating_spike(d, n)) game.oco.push_back(trace_loss(y));
      } else {
        auto rng = derived_engine(seed, 0, StreamPurpose::kAdversary);
        for (std::size_t t = 0; t < n; ++t) {
          const Vector x = random_unit_sphere(d, rng);
          const double s = (rng() & 1) ? 1.0 : -1.0;
          game.oco.push_back(trace_loss(s * x * x.transpose()));
        }
      }
      for (double r : cfg.sweep) game.comparators.push_back(subalgos::vectorize(r * e1e1(d)));
      break;
    }
    case GameKind::kSupervised: {
      const Vector w_star = cfg.adversary_norm * unit_e1(d);
      game.examples = gen_supervised_stream(
          d, n, [w_star](const Vector& x) { return w_star.dot(x); },
          cfg.adversary_noise, cfg.adversary_norm + 4.0 * cfg.adversary_noise + 1.0, seed);
      for (double r : cfg.sweep) game.comparators.push_back(r * unit_e1(d));
      break;
    }
  }
  return game;
}

SeedResult play_seed(const ExperimentConfig& cfg, const configs::ConfigSpec& spec,
                     std::uint64_t seed) {
  SeedResult out;
  out.seed = seed;
  try {
    const Game game = build_game(cfg, spec, seed);
    meta::MetaState meta = configs::build_meta(spec, {cfg.mode, seed, std::nullopt});
    const std::size_t N = meta.size();
    const std::size_t C = game.comparators.size();
    const SupervisedLoss loss = absolute_supervised_loss();

    ExactSum realized;
    std::vector<ExactSum> cmp(C);
    out.rows.reserve(spec.horizon);
    for (std::size_t t = 0; t < spec.horizon; ++t) {
      ExpertIndex chosen = 0;
      double played = 0.0;
      if (!game.oco.empty()) {
        const LossFunction& f = game.oco[t];
        const meta::OcoOutcome o = meta.oco_round(f);
        chosen = o.chosen;
        played = o.raw[chosen];
        for (std::size_t c = 0; c < C; ++c) cmp[c].add(f.evaluate(game.comparators[c]));
      } else {
        const Example& ex = game.examples[t];
        const meta::LearningOutcome o =
            meta.learning_round(ex.x, [&ex] { return ex.y; }, loss);
        chosen = o.chosen;
        played = o.raw[chosen];
        for (std::size_t c = 0; c < C; ++c) {
          cmp[c].add(loss.value(game.comparators[c].dot(ex.x), ex.y));
        }
      }
      realized.add(played);
      const double total = realized.value();
      ReportRow row{seed, t + 1, chosen + 1, played, {}};
      row.regrets.reserve(C + N);
      for (std::size_t c = 0; c < C; ++c) row.regrets.push_back(total - cmp[c].value());
      const RegretLedger& raw = meta.raw_ledger();
      for (std::size_t i = 0; i < N; ++i) row.regrets.push_back(total - raw.expert_loss(i));
      out.rows.push_back(std::move(row));
    }

    const RegretLedger& ledger = meta.ledger();
    const auto& bounds = meta.ftpl().bounds();
    out.meta_loss = realized.value();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
      out.certificates.push_back(ledger.total_loss() - ledger.expert_loss(i) - bounds[i]);
      best = std::min(best, ledger.expert_loss(i) + bounds[i]);
    }
    out.theorem_certificate = ledger.total_loss() - best;
    if (!out.rows.empty()) out.final_regrets = out.rows.back().regrets;
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.diagnostic = e.what();
    out.rows.clear();
  }
  return out;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  std::size_t workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

json stats_json(const std::vector<double>& values) {
  RunningStats s;
  for (double v : values) s.add(v);
  return {{"mean", s.mean()},
          {"standard_error", s.standard_error()},
          {"max", values.empty() ? 0.0 : *std::max_element(values.begin(), values.end())},
          {"count", values.size()}};
}

void dump_value(const json& j, std::ostringstream& os, int indent, int depth) {
  const std::string pad(indent > 0 ? indent * (depth + 1) : 0, ' ');
  const std::string close_pad(indent > 0 ? indent * depth : 0, ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) { os << "{}"; return; }
      os << "{" << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << "," << nl;
        first = false;
        os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
        dump_value(it.value(), os, indent, depth + 1);
      }
      os << nl << close_pad << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) { os << "[]"; return; }
      os << "[" << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << "," << nl;
        os << pad;
        dump_value(j[i], os, indent, depth + 1);
      }
      os << nl << close_pad << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        os << configs::format_double(v);
      } else {
        os << "null";
      }
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

configs::ConfigSpec ExperimentConfig::resolve_spec() const {
  if (spec) {
    configs::ConfigSpec s = *spec;
    s.horizon = horizon;
    return s;
  }
  return configs::make_preset(preset, horizon, dim, max_experts);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) throw ConfigError("experiment: seeds must be non-empty");
  if (cfg.horizon < 1) throw ConfigError("experiment: horizon must be >= 1");
  if (!(cfg.adversary_noise >= 0.0)) throw ConfigError("experiment: noise must be >= 0");
  if (!std::isfinite(cfg.adversary_norm)) throw ConfigError("experiment: bad adversary norm");
  const configs::ConfigSpec spec = cfg.resolve_spec();
  configs::validate(spec);
  const GameKind kind = game_kind(spec);
  for (const auto& h : spec.handles) {
    if (game_kind(configs::ConfigSpec{spec.name, {h}, {1.0}, 1, 1, ""}) != kind) {
      throw ConfigError("experiment: handles of mixed kinds");
    }
  }
  check_adversary(kind, cfg.adversary.empty() ? default_adversary(kind) : cfg.adversary);
}

ExperimentConfig experiment_from_key_values(const configs::KeyValues& kv) {
  ExperimentConfig cfg;
  auto it = kv.find("schema");
  if (it == kv.end() || it->second != "1") {
    throw ConfigError("experiment: missing or unsupported 'schema' (expected 1)");
  }
  configs::KeyValues spec_kv;
  for (const auto& [key, value] : kv) {
    if (key.rfind("spec.", 0) == 0) {
      spec_kv.emplace(key.substr(5), value);
      continue;
    }
    if (key == "schema") continue;
    if (key == "preset") cfg.preset = value;
    else if (key == "horizon") cfg.horizon = parse_u64(key, value);
    else if (key == "dim") cfg.dim = static_cast<int>(parse_u64(key, value));
    else if (key == "max_experts") cfg.max_experts = parse_u64(key, value);
    else if (key == "seeds") {
      cfg.seeds.clear();
      std::istringstream in(value);
      std::string item;
      while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        cfg.seeds.push_back(parse_u64(key, b == std::string::npos ? "" : item.substr(b, e - b + 1)));
      }
    } else if (key == "adversary") cfg.adversary = value;
    else if (key == "adversary.norm") cfg.adversary_norm = parse_list(key, value).at(0);
    else if (key == "adversary.noise") cfg.adversary_noise = parse_list(key, value).at(0);
    else if (key == "sweep") cfg.sweep = value.empty() ? std::vector<double>{} : parse_list(key, value);
    else if (key == "perturbation") cfg.mode = ftpl::perturbation_mode_from_string(value);
    else if (key == "threads") cfg.threads = parse_u64(key, value);
    else throw ConfigError("experiment: unknown key '" + key + "'");
  }
  if (!spec_kv.empty()) {
    spec_kv.emplace("schema", "1");
    spec_kv.emplace("horizon", std::to_string(cfg.horizon));
    cfg.spec = configs::spec_from_key_values(spec_kv);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return experiment_from_key_values(configs::parse_key_values(buf.str()));
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string serialize(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "schema = 1\n";
  if (!cfg.spec) os << "preset = " << cfg.preset << "\n";
  os << "horizon = " << cfg.horizon << "\n";
  os << "dim = " << cfg.dim << "\n";
  if (cfg.max_experts) os << "max_experts = " << *cfg.max_experts << "\n";
  os << "seeds = ";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) os << (i ? "," : "") << cfg.seeds[i];
  os << "\n";
  if (!cfg.adversary.empty()) os << "adversary = " << cfg.adversary << "\n";
  os << "adversary.norm = " << configs::format_double(cfg.adversary_norm) << "\n";
  os << "adversary.noise = " << configs::format_double(cfg.adversary_noise) << "\n";
  os << "sweep = ";
  for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
    os << (i ? "," : "") << configs::format_double(cfg.sweep[i]);
  }
  os << "\n";
  os << "perturbation = " << ftpl::to_string(cfg.mode) << "\n";
  if (cfg.spec) {
    std::istringstream spec(configs::serialize(*cfg.spec));
    std::string line;
    while (std::getline(spec, line)) {
      if (line.rfind("schema", 0) == 0 || line.rfind("horizon", 0) == 0) continue;
      os << "spec." << line << "\n";
    }
  }
  return os.str();
}

bool ExperimentReport::all_ok() const {
  return std::all_of(seeds.begin(), seeds.end(), [](const SeedResult& s) { return s.ok; });
}

double oracle_shape(double norm, double L, std::size_t n) {
  const double nn = static_cast<double>(n);
  return (norm + 1.0) * std::sqrt(nn * std::log((norm + 1.0) * L * nn));
}

json ExperimentReport::summary() const {
  json j;
  j["config"] = json::object();
  for (const auto& [k, v] : configs::parse_key_values(serialize(config))) j["config"][k] = v;
  json handles = json::array();
  for (const auto& h : spec.handles) {
    handles.push_back({{"label", h.label},
                       {"radius", h.radius},
                       {"lipschitz", h.lipschitz},
                       {"scale", std::max(1.0, h.radius * h.lipschitz)},
                       {"eta", h.eta}});
  }
  j["spec"] = {{"name", spec.name}, {"horizon", spec.horizon}, {"prior", spec.prior},
               {"handles", handles}};
  j["bounds"] = bounds;
  j["comparators"] = comparator_labels;

  json per_seed = json::array();
  std::vector<double> theorem;
  std::vector<std::vector<double>> cert(bounds.size());
  std::vector<std::vector<double>> regrets(comparator_labels.size());
  for (const auto& s : seeds) {
    json e = {{"seed", s.seed}, {"ok", s.ok}};
    if (!s.ok) {
      e["diagnostic"] = s.diagnostic;
    } else {
      e["meta_loss"] = s.meta_loss;
      e["certificates"] = s.certificates;
      e["theorem_certificate"] = s.theorem_certificate;
      e["final_regrets"] = s.final_regrets;
      theorem.push_back(s.theorem_certificate);
      for (std::size_t i = 0; i < s.certificates.size(); ++i) cert[i].push_back(s.certificates[i]);
      for (std::size_t c = 0; c < s.final_regrets.size(); ++c) regrets[c].push_back(s.final_regrets[c]);
    }
    per_seed.push_back(e);
  }
  j["seeds"] = per_seed;

  json cstats = json::array();
  for (const auto& v : cert) cstats.push_back(stats_json(v));
  j["certificate_stats"] = cstats;
  json ts = stats_json(theorem);
  ts["passed"] = ts["mean"].get<double>() <= 1.0 + 3.0 * ts["standard_error"].get<double>();
  j["theorem_certificate"] = ts;

  json rstats = json::object();
  for (std::size_t c = 0; c < regrets.size(); ++c) rstats[comparator_labels[c]] = stats_json(regrets[c]);
  j["comparator_regrets"] = rstats;

  // Regret against r e_1 relative to the nested-ball bound shape.
  json fitted = json::array();
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  const double L = spec.handles.front().lipschitz;
  for (std::size_t c = 0; c < config.sweep.size() && c < regrets.size(); ++c) {
    RunningStats s;
    for (double v : regrets[c]) s.add(v);
    const double ratio = s.mean() / oracle_shape(config.sweep[c], L, spec.horizon);
    fitted.push_back({{"norm", config.sweep[c]}, {"mean_regret", s.mean()}, {"ratio", ratio}});
    hi = std::max(hi, ratio);
    if (ratio > 0.0) lo = std::min(lo, ratio);
  }
  j["fitted_constants"] = {{"points", fitted},
                           {"max_ratio", hi},
                           {"spread", std::isfinite(lo) ? hi / lo : 0.0}};
  j["all_ok"] = all_ok();
  return j;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentReport report;
  report.config = cfg;
  report.spec = cfg.resolve_spec();
  for (double r : cfg.sweep) report.comparator_labels.push_back("w=" + configs::format_double(r));
  for (const auto& h : report.spec.handles) report.comparator_labels.push_back(csv_safe(h.label));
  {
    ftpl::MultiScaleFtpl probe(
        [&] {
          std::vector<double> scales;
          for (const auto& h : report.spec.handles) scales.push_back(h.radius * h.lipschitz);
          return ScaleProfile::lifted(scales, report.spec.prior);
        }(),
        report.spec.horizon);
    report.bounds = probe.bounds();
  }
  report.seeds.resize(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.threads, [&](std::size_t i) {
    report.seeds[i] = play_seed(cfg, report.spec, cfg.seeds[i]);
  });
  return report;
}

std::string to_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "seed,round,expert,loss";
  for (const auto& l : report.comparator_labels) os << ",cmp_" << csv_safe(l);
  os << "\n";
  for (const auto& s : report.seeds) {
    for (const auto& r : s.rows) {
      os << r.seed << "," << r.round << "," << r.expert << "," << configs::format_double(r.loss);
      for (double v : r.regrets) os << "," << configs::format_double(v);
      os << "\n";
    }
  }
  return os.str();
}

std::string dump_json(const json& j, int indent) {
  std::ostringstream os;
  dump_value(j, os, indent, 0);
  os << "\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void emit_report(const ExperimentReport& report, const std::string& csv_path,
                 const std::string& json_path) {
  if (!csv_path.empty()) write_file(csv_path, to_csv(report));
  if (!json_path.empty()) write_file(json_path, dump_json(report.summary()));
}

double SweepReport::max_ratio() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) m = std::max(m, p.ratio);
  return m;
}

double SweepReport::min_ratio() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : points) m = std::min(m, p.ratio);
  return m;
}

json SweepReport::summary() const {
  json pts = json::array();
  for (const auto& p : points) {
    pts.push_back({{"norm", p.norm}, {"mean_regret", p.mean_regret},
                   {"standard_error", p.standard_error}, {"ratio", p.ratio}});
  }
  return {{"points", pts}, {"max_ratio", max_ratio()}, {"min_ratio", min_ratio()},
          {"spread", spread()}, {"failed_seeds", failed_seeds}};
}

SweepReport run_sweep(const SweepConfig& cfg) {
  SweepReport report;
  for (double r : cfg.norms) {
    ExperimentConfig e;
    e.spec = configs::banach_nested_config(cfg.L, 1.0, cfg.horizon, cfg.max_experts, cfg.dim);
    e.horizon = cfg.horizon;
    e.dim = cfg.dim;
    e.seeds = cfg.seeds;
    e.adversary = "planted-absolute";
    e.adversary_norm = r;
    e.sweep = {r};
    e.mode = cfg.mode;
    e.threads = cfg.threads;
    const ExperimentReport rep = run_experiment(e);
    RunningStats s;
    for (const auto& seed : rep.seeds) {
      if (!seed.ok) {
        ++report.failed_seeds;
        continue;
      }
      s.add(seed.final_regrets.at(0));
    }
    report.points.push_back({r, s.mean(), s.standard_error(),
                             s.mean() / oracle_shape(r, cfg.L, cfg.horizon)});
  }
  return report;
}

}  // namespace msol::harness
