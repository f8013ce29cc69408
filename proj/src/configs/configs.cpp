#include "msol/configs/configs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "msol/core/errors.hpp"
#include "msol/core/exact_sum.hpp"
#include "msol/subalgos/matrix.hpp"

namespace msol::configs {
namespace {

using subalgos::Regularizer;

std::size_t expert_count(std::size_t n, std::optional<std::size_t> cap) {
  if (n < 1) throw ConfigError("config: horizon must be >= 1");
  if (cap) {
    if (*cap < 1) throw ConfigError("config: max_experts must be >= 1");
    return *cap;
  }
  return n + 1;
}

double checked_radius(double r, const std::string& who) {
  if (!std::isfinite(r)) {
    throw ConfigError(who + ": radius overflows; pass max_experts");
  }
  return r;
}

std::vector<double> uniform_prior(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

std::string label_of(const char* stem, double r) {
  std::ostringstream os;
  os << stem << "(R=" << r << ")";
  return os.str();
}

const char* regularizer_name(Regularizer r) {
  switch (r) {
    case Regularizer::kHalfSquaredL2: return "l2";
    case Regularizer::kHalfSquaredLp: return "lp";
    case Regularizer::kNegativeEntropy: return "entropy";
  }
  return "?";
}

Regularizer regularizer_from(const std::string& s) {
  if (s == "l2") return Regularizer::kHalfSquaredL2;
  if (s == "lp") return Regularizer::kHalfSquaredLp;
  if (s == "entropy") return Regularizer::kNegativeEntropy;
  throw ConfigError("config: unknown regularizer '" + s + "'");
}

Regularizer regularizer_for(double p) {
  return p == 2.0 ? Regularizer::kHalfSquaredL2 : Regularizer::kHalfSquaredLp;
}

}  // namespace

const char* to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kMirrorDescent: return "md";
    case LearnerKind::kLinearSupervised: return "linear";
    case LearnerKind::kMatrixEg: return "pca";
    case LearnerKind::kMmw: return "mmw";
    case LearnerKind::kKernelOgd: return "kernel";
  }
  return "?";
}

LearnerKind learner_kind_from_string(const std::string& name) {
  for (auto k : {LearnerKind::kMirrorDescent, LearnerKind::kLinearSupervised,
                 LearnerKind::kMatrixEg, LearnerKind::kMmw,
                 LearnerKind::kKernelOgd}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("config: unknown learner kind '" + name + "'");
}

subalgos::Kernel make_kernel(const KernelSpec& spec) {
  if (spec.family == "linear") return subalgos::linear_kernel();
  if (spec.family == "rbf") return subalgos::gaussian_kernel(spec.parameter);
  if (spec.family == "poly") {
    return subalgos::polynomial_kernel(spec.degree, spec.parameter);
  }
  throw ConfigError("config: unknown kernel family '" + spec.family + "'");
}

void validate(const ConfigSpec& spec) {
  if (spec.handles.empty()) throw ConfigError("config: no handles");
  if (spec.prior.size() != spec.handles.size()) {
    throw DimensionError("config '" + spec.name + "': prior has " +
                         std::to_string(spec.prior.size()) + " entries for " +
                         std::to_string(spec.handles.size()) + " handles");
  }
  if (spec.horizon < 1) throw ConfigError("config: horizon must be >= 1");
  // ScaleProfile performs the remaining prior checks.
  std::vector<double> scales(spec.handles.size(), 1.0);
  ScaleProfile(scales, spec.prior);
}

std::vector<meta::SubAlgorithmHandle> instantiate(const ConfigSpec& spec) {
  validate(spec);
  std::vector<meta::SubAlgorithmHandle> out;
  out.reserve(spec.handles.size());
  for (const auto& b : spec.handles) {
    meta::SubAlgorithmHandle h;
    h.label = b.label;
    h.radius = b.radius;
    h.lipschitz = b.lipschitz;
    switch (b.kind) {
      case LearnerKind::kMirrorDescent:
        h.learner = std::make_unique<subalgos::MirrorDescentLearner>(
            subalgos::md_init(b.dim, b.eta, b.learner_radius, b.regularizer, b.p));
        break;
      case LearnerKind::kLinearSupervised:
        h.supervised = std::make_unique<subalgos::LinearSupervisedLearner>(
            subalgos::md_init(b.dim, b.eta, b.learner_radius, b.regularizer, b.p));
        break;
      case LearnerKind::kMatrixEg:
        h.learner = std::make_unique<subalgos::MatrixEgLearner>(
            subalgos::matrix_eg_init(b.dim, b.trace_budget, b.eta));
        break;
      case LearnerKind::kMmw:
        h.learner = std::make_unique<subalgos::MmwLearner>(
            subalgos::mmw_init(b.dim, b.learner_radius, b.eta));
        break;
      case LearnerKind::kKernelOgd:
        h.supervised = std::make_unique<subalgos::KernelOgdLearner>(
            subalgos::kernel_init(make_kernel(b.kernel), b.learner_radius, b.eta));
        break;
    }
    out.push_back(std::move(h));
  }
  return out;
}

meta::MetaState build_meta(const ConfigSpec& spec, ftpl::FtplOptions options) {
  return meta::register_handles(instantiate(spec), spec.prior, spec.horizon,
                                options);
}

ConfigSpec banach_nested_config(double L, double lambda, std::size_t n,
                                std::optional<std::size_t> max_experts,
                                int dim, double p, bool supervised) {
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw ConfigError("banach config: L must be positive");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("banach config: lambda must be positive");
  }
  if (dim < 1) throw ConfigError("banach config: dim must be >= 1");
  const std::size_t count = expert_count(n, max_experts);
  ConfigSpec spec;
  spec.name = "banach";
  spec.horizon = n;
  spec.dim = dim;
  spec.notes = "nested l_p balls R_i = e^(i-1), eta_i = (R_i/L) sqrt(lambda/n)";
  for (std::size_t i = 0; i < count; ++i) {
    const double r = checked_radius(std::exp(static_cast<double>(i)), "banach config");
    HandleBlueprint b;
    b.label = label_of(supervised ? "linear" : "ball", r);
    b.kind = supervised ? LearnerKind::kLinearSupervised : LearnerKind::kMirrorDescent;
    b.radius = r;
    b.lipschitz = L;
    b.eta = (r / L) * std::sqrt(lambda / static_cast<double>(n));
    b.dim = dim;
    b.p = p;
    b.regularizer = regularizer_for(p);
    b.learner_radius = r;
    spec.handles.push_back(b);
  }
  spec.prior = uniform_prior(count);
  return spec;
}

std::vector<double> lp_grid_exponents(double delta, double d) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("lp grid: delta must lie in (0, 1)");
  }
  if (!(d > 1.0) || !std::isfinite(d)) throw ConfigError("lp grid: need d > 1");
  const double log_d = std::log(d);
  const double eps = 1.0 / log_d;
  // (1 - delta) / eps, snapped so that exact integers are not pushed up by
  // rounding in ln d.
  const double ratio = (1.0 - delta) * log_d;
  const double snapped = std::round(ratio);
  const double steps =
      std::abs(ratio - snapped) <= 1e-9 * std::max(1.0, ratio) ? snapped
                                                              : std::ceil(ratio);
  const auto K = static_cast<std::size_t>(steps) + 1;
  std::vector<double> p(K);
  for (std::size_t k = 0; k < K; ++k) {
    p[k] = 1.0 + delta + std::min(static_cast<double>(k) * eps, 1.0 - delta);
  }
  return p;
}

ConfigSpec lp_grid_config(double delta, int d,
                          const std::function<double(double)>& L_of_p,
                          std::size_t n, std::optional<std::size_t> max_radii) {
  if (d < 2) throw ConfigError("lp grid: d must be >= 2");
  const std::vector<double> exps = lp_grid_exponents(delta, d);
  const std::size_t radii = expert_count(n, max_radii);
  ConfigSpec spec;
  spec.name = "lp-grid";
  spec.horizon = n;
  spec.dim = d;
  spec.notes = "l_p balls over p_k = 1 + delta + min((k-1)/ln d, 1 - delta) and R_j = e^(j-1)";
  for (std::size_t k = 0; k < exps.size(); ++k) {
    const double p = exps[k];
    const double L = L_of_p(p);
    if (!(L > 0.0) || !std::isfinite(L)) {
      throw ConfigError("lp grid: L(p) must be positive and finite");
    }
    for (std::size_t j = 0; j < radii; ++j) {
      const double r = checked_radius(std::exp(static_cast<double>(j)), "lp grid");
      HandleBlueprint b;
      std::ostringstream os;
      os << "lp(k=" << k + 1 << ",p=" << p << ",R=" << r << ")";
      b.label = os.str();
      b.kind = LearnerKind::kMirrorDescent;
      b.radius = r;
      b.lipschitz = L;
      b.eta = (r / L) * std::sqrt((p - 1.0) / static_cast<double>(n));
      b.dim = d;
      b.p = p;
      b.regularizer = regularizer_for(p);
      b.learner_radius = r;
      spec.handles.push_back(b);
    }
  }
  spec.prior = uniform_prior(spec.handles.size());
  return spec;
}

std::vector<int> pca_trace_budgets(int d) {
  if (d < 2) throw ConfigError("pca config: d must be >= 2");
  const auto count = static_cast<int>(std::ceil(std::log(d / 2.0))) + 1;
  const int cap = d / 2;
  std::vector<int> budgets;
  for (int i = 0; i < count; ++i) {
    const int k = std::clamp(static_cast<int>(std::lround(std::exp(i))), 1, cap);
    if (budgets.empty() || budgets.back() != k) budgets.push_back(k);
  }
  return budgets;
}

ConfigSpec pca_config(int d, std::size_t n) {
  if (n < 1) throw ConfigError("pca config: horizon must be >= 1");
  ConfigSpec spec;
  spec.name = "pca";
  spec.horizon = n;
  spec.dim = d * d;
  spec.notes = "capped spectraplex, integer trace budgets round(e^(i-1)) <= d/2";
  const double eta = std::sqrt(std::log(static_cast<double>(d)) / n);
  for (int k : pca_trace_budgets(d)) {
    HandleBlueprint b;
    b.label = "pca(k=" + std::to_string(k) + ")";
    b.kind = LearnerKind::kMatrixEg;
    b.radius = k;
    b.lipschitz = 1.0;
    b.eta = eta;
    b.dim = d;
    b.trace_budget = k;
    b.learner_radius = k;
    spec.handles.push_back(b);
  }
  spec.prior = uniform_prior(spec.handles.size());
  return spec;
}

ConfigSpec mmw_config(int d, std::size_t n,
                      std::optional<std::size_t> max_experts) {
  if (d < 1) throw ConfigError("mmw config: d must be >= 1");
  const std::size_t count = expert_count(n, max_experts);
  ConfigSpec spec;
  spec.name = "mmw";
  spec.horizon = n;
  spec.dim = d * d;
  spec.notes = "trace-norm balls R_i = 2^(i-1)";
  const double eta = std::sqrt(std::log(d + 1.0) / static_cast<double>(n));
  for (std::size_t i = 0; i < count; ++i) {
    const double r = checked_radius(std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(i, 100000))), "mmw config");
    HandleBlueprint b;
    b.label = label_of("mmw", r);
    b.kind = LearnerKind::kMmw;
    b.radius = r;
    b.lipschitz = 1.0;
    b.eta = eta;
    b.dim = d;
    b.learner_radius = r;
    spec.handles.push_back(b);
  }
  spec.prior = uniform_prior(count);
  return spec;
}

ConfigSpec mkl_config(const std::vector<KernelSpec>& kernels, std::size_t n,
                      int dim, std::optional<std::size_t> max_radii,
                      double lipschitz) {
  if (kernels.empty()) throw ConfigError("mkl config: no kernels");
  if (dim < 1) throw ConfigError("mkl config: dim must be >= 1");
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    throw ConfigError("mkl config: lipschitz must be positive");
  }
  const std::size_t radii = expert_count(n, max_radii);

  std::mt19937_64 rng(0x6b65726e656c);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  std::vector<Vector> probes;
  for (int i = 0; i < 24; ++i) {
    Vector v(dim);
    for (int j = 0; j < dim; ++j) v[j] = normal(rng);
    v *= std::pow(unit(rng), 1.0 / dim) / std::max(v.norm(), 1e-300);
    probes.push_back(v);
  }

  ConfigSpec spec;
  spec.name = "mkl";
  spec.horizon = n;
  spec.dim = dim;
  spec.notes = "RKHS balls of radius e^(j-1) per kernel, prior ~ 1/(n k^2)";
  std::vector<double> weights;
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    const subalgos::Kernel kernel = make_kernel(kernels[k]);
    subalgos::check_positive_definite(kernel, probes);
    const double bk = kernel.bound;
    const double w = 1.0 / (static_cast<double>(n) * (k + 1.0) * (k + 1.0));
    for (std::size_t j = 0; j < radii; ++j) {
      const double rho = checked_radius(std::exp(static_cast<double>(j)), "mkl config");
      HandleBlueprint b;
      std::ostringstream os;
      os << "kernel(" << kernel.name << ",R=" << rho << ")";
      b.label = os.str();
      b.kind = LearnerKind::kKernelOgd;
      b.radius = rho * bk;
      b.lipschitz = lipschitz;
      b.eta = rho / (lipschitz * bk * std::sqrt(static_cast<double>(n)));
      b.dim = dim;
      b.learner_radius = rho;
      b.kernel = kernels[k];
      spec.handles.push_back(b);
      weights.push_back(w);
    }
  }
  const double total = exact_sum(weights);
  for (double& w : weights) w /= total;
  spec.prior = std::move(weights);
  return spec;
}

ComparatorRange comparator_range(double L, double n, double c, double gamma) {
  if (!(c > 0.0) || !(gamma > 0.0)) {
    throw ConfigError("comparator_range: need c > 0 and gamma > 0");
  }
  if (!(L >= 0.0) || !(n >= 0.0)) {
    throw ConfigError("comparator_range: need L >= 0 and n >= 0");
  }
  const double exponent = std::pow(L * n / c, 1.0 / gamma);
  const double value = std::exp(exponent);
  if (!std::isfinite(value)) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  return {value, false};
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string serialize(const ConfigSpec& spec) {
  validate(spec);
  std::ostringstream os;
  os << "schema = 1\n";
  os << "name = " << spec.name << "\n";
  os << "horizon = " << spec.horizon << "\n";
  os << "dim = " << spec.dim << "\n";
  os << "notes = " << spec.notes << "\n";
  os << "prior = ";
  for (std::size_t i = 0; i < spec.prior.size(); ++i) {
    os << (i ? "," : "") << format_double(spec.prior[i]);
  }
  os << "\n";
  os << "handle.count = " << spec.handles.size() << "\n";
  for (std::size_t i = 0; i < spec.handles.size(); ++i) {
    const auto& b = spec.handles[i];
    const std::string k = "handle." + std::to_string(i) + ".";
    os << k << "label = " << b.label << "\n";
    os << k << "kind = " << to_string(b.kind) << "\n";
    os << k << "radius = " << format_double(b.radius) << "\n";
    os << k << "lipschitz = " << format_double(b.lipschitz) << "\n";
    os << k << "eta = " << format_double(b.eta) << "\n";
    os << k << "dim = " << b.dim << "\n";
    os << k << "regularizer = " << regularizer_name(b.regularizer) << "\n";
    os << k << "p = " << format_double(b.p) << "\n";
    os << k << "learner_radius = " << format_double(b.learner_radius) << "\n";
    os << k << "trace_budget = " << b.trace_budget << "\n";
    os << k << "kernel = " << b.kernel.family << "\n";
    os << k << "kernel_parameter = " << format_double(b.kernel.parameter) << "\n";
    os << k << "kernel_degree = " << b.kernel.degree << "\n";
  }
  return os.str();
}

namespace {

const std::string& require(const KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("config: missing key '" + key + "'");
  return it->second;
}

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not a number: '" + s + "'");
  }
}

long long to_integer(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not an integer: '" + s + "'");
  }
}

}  // namespace

ConfigSpec spec_from_key_values(const KeyValues& kv) {
  if (require(kv, "schema") != "1") {
    throw ConfigError("config: unsupported schema '" + kv.at("schema") + "'");
  }
  ConfigSpec spec;
  spec.name = require(kv, "name");
  const long long horizon = to_integer("horizon", require(kv, "horizon"));
  if (horizon < 1) throw ConfigError("config: horizon must be >= 1");
  spec.horizon = static_cast<std::size_t>(horizon);
  spec.dim = static_cast<int>(to_integer("dim", require(kv, "dim")));
  if (auto it = kv.find("notes"); it != kv.end()) spec.notes = it->second;

  std::istringstream prior(require(kv, "prior"));
  std::string item;
  while (std::getline(prior, item, ',')) spec.prior.push_back(to_double("prior", item));

  const long long count = to_integer("handle.count", require(kv, "handle.count"));
  if (count < 1) throw ConfigError("config: handle.count must be >= 1");
  for (long long i = 0; i < count; ++i) {
    const std::string k = "handle." + std::to_string(i) + ".";
    auto get = [&](const char* f) { return require(kv, k + f); };
    auto num = [&](const char* f) { return to_double(k + f, get(f)); };
    auto integer = [&](const char* f) {
      return static_cast<int>(to_integer(k + f, get(f)));
    };
    HandleBlueprint b;
    b.label = get("label");
    b.kind = learner_kind_from_string(get("kind"));
    b.radius = num("radius");
    b.lipschitz = num("lipschitz");
    b.eta = num("eta");
    b.dim = integer("dim");
    b.regularizer = regularizer_from(get("regularizer"));
    b.p = num("p");
    b.learner_radius = num("learner_radius");
    b.trace_budget = integer("trace_budget");
    b.kernel.family = get("kernel");
    b.kernel.parameter = num("kernel_parameter");
    b.kernel.degree = integer("kernel_degree");
    spec.handles.push_back(b);
  }
  validate(spec);
  return spec;
}

ConfigSpec deserialize(const std::string& text) {
  return spec_from_key_values(parse_key_values(text));
}

std::vector<std::string> preset_names() {
  return {"banach", "lp-grid", "pca", "mmw", "mkl"};
}

ConfigSpec make_preset(const std::string& name, std::size_t n, int dim,
                       std::optional<std::size_t> max_experts) {
  const std::size_t cap = max_experts.value_or(15);
  if (name == "banach") return banach_nested_config(1.0, 1.0, n, cap, dim);
  if (name == "lp-grid") {
    return lp_grid_config(0.25, std::max(dim, 2), [](double) { return 1.0; }, n,
                          max_experts.value_or(8));
  }
  if (name == "pca") return pca_config(std::max(dim, 2), n);
  if (name == "mmw") return mmw_config(dim, n, cap);
  if (name == "mkl") {
    return mkl_config({{"linear", 0.0, 1}, {"rbf", 1.0, 1}}, n, dim,
                      max_experts.value_or(8));
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace msol::configs
