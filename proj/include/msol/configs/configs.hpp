#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msol/ftpl/ftpl.hpp"
#include "msol/meta/meta.hpp"
#include "msol/subalgos/kernel.hpp"
#include "msol/subalgos/mirror_descent.hpp"

namespace msol::configs {

enum class LearnerKind {
  kMirrorDescent,      // OCO, l_p ball or scaled simplex
  kLinearSupervised,   // supervised, x -> <w, x> via mirror descent
  kMatrixEg,           // OCO, online PCA on the capped spectraplex
  kMmw,                // OCO, trace-norm ball
  kKernelOgd,          // supervised, RKHS ball
};

const char* to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

struct KernelSpec {
  std::string family = "linear";  // linear | rbf | poly
  double parameter = 0.0;         // rbf bandwidth or poly offset
  int degree = 1;                 // poly only
};

subalgos::Kernel make_kernel(const KernelSpec& spec);

// Everything needed to build one handle. `radius` and `lipschitz` are the
// handle's declared R and L; the learner's own radius may differ (the RKHS
// radius for kernel handles, the trace budget for PCA).
struct HandleBlueprint {
  std::string label;
  LearnerKind kind = LearnerKind::kMirrorDescent;
  double radius = 1.0;
  double lipschitz = 1.0;
  double eta = 1.0;
  int dim = 1;
  subalgos::Regularizer regularizer = subalgos::Regularizer::kHalfSquaredL2;
  double p = 2.0;
  double learner_radius = 1.0;
  int trace_budget = 1;
  KernelSpec kernel;
};

struct ConfigSpec {
  std::string name;
  std::vector<HandleBlueprint> handles;
  std::vector<double> prior;
  std::size_t horizon = 1;
  int dim = 1;
  std::string notes;

  std::size_t size() const { return handles.size(); }
};

// Checks prior validity and prior/handle counts.
void validate(const ConfigSpec& spec);

std::vector<meta::SubAlgorithmHandle> instantiate(const ConfigSpec& spec);
meta::MetaState build_meta(const ConfigSpec& spec,
                           ftpl::FtplOptions options = {});

// Nested l_p balls (p = 2 by default) with R_i = e^(i-1), L_i = L and
// eta_i = (R_i / L) sqrt(lambda / n); N = n + 1 unless max_experts is given.
// `supervised` swaps the OCO learners for linear predictors.
ConfigSpec banach_nested_config(double L, double lambda, std::size_t n,
                                std::optional<std::size_t> max_experts = {},
                                int dim = 5, double p = 2.0,
                                bool supervised = false);

// p_k = 1 + delta + min((k-1) eps, 1 - delta), eps = 1 / ln d,
// K = ceil((1 - delta) / eps) + 1.
std::vector<double> lp_grid_exponents(double delta, double d);

// K x (number of radii) handles, (k, j) ordered with k outermost.
ConfigSpec lp_grid_config(double delta, int d,
                          const std::function<double(double)>& L_of_p,
                          std::size_t n,
                          std::optional<std::size_t> max_radii = {});

// Integer trace budgets round(e^(i-1)) for i <= ceil(ln(d/2)) + 1, clipped to
// floor(d/2) and deduplicated.
std::vector<int> pca_trace_budgets(int d);
ConfigSpec pca_config(int d, std::size_t n);

ConfigSpec mmw_config(int d, std::size_t n,
                      std::optional<std::size_t> max_experts = {});

// For each kernel k (1-based), nested RKHS balls of radius e^(j-1) with prior
// proportional to 1 / (n k^2). Each kernel is checked for positive
// definiteness on a fixed probe set in dimension `dim`.
ConfigSpec mkl_config(const std::vector<KernelSpec>& kernels, std::size_t n,
                      int dim, std::optional<std::size_t> max_radii = {},
                      double lipschitz = 1.0);

struct ComparatorRange {
  double value;
  bool overflow;
};

// exp((L n / c)^(1/gamma)); overflow yields infinity with the flag set.
ComparatorRange comparator_range(double L, double n, double c, double gamma);

// Flat `key = value` text, one entry per line, `#` comments.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(const std::string& text);
std::string format_double(double v);

std::string serialize(const ConfigSpec& spec);
ConfigSpec deserialize(const std::string& text);
// Reads the spec stored in `kv`, ignoring unrelated keys.
ConfigSpec spec_from_key_values(const KeyValues& kv);

// Named presets used by the CLI.
std::vector<std::string> preset_names();
ConfigSpec make_preset(const std::string& name, std::size_t n, int dim,
                       std::optional<std::size_t> max_experts);

}  // namespace msol::configs
