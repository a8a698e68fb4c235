#pragma once

#include "smnp/core.hpp"

#include <string>
#include <vector>

namespace smnp {

enum class ModelKind {
  Symmetric,     // sum-to-zero identification with a sampled faux base
  BaseCategory,  // trace-restricted MNP with a fixed base category
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ChainInfo {
  int iters = 0;
  int burn = 0;
  int thin = 1;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

/// Retained posterior draws on the identified scale.
///
/// For the symmetric model `beta` is the full sum-to-zero coefficient vector
/// expand_beta(beta~, b) / alpha and `sigma` is R R' from construct_R; `b` is
/// the faux base. For the base-category model the base entries of each
/// coefficient block are zero, the base row and column of `sigma` are zero,
/// and `b` holds the fixed base.
struct DrawStore {
  ModelKind kind = ModelKind::Symmetric;
  int p = 0;
  int k_d = 0;
  int k_a = 0;
  std::vector<std::string> labels;
  std::vector<std::string> agent_names;
  std::vector<std::string> alt_names;
  int base = -1;  // base-category model only

  // Covariate summaries of the fitted data, used by prediction defaults.
  VectorXd agent_means;  // k_d
  MatrixXd alt_means;    // p x k_a, raw (uncentered) per-category means

  // Hyperparameters as resolved for this fit.
  double nu = 0.0;
  MatrixXd S;
  MatrixXd A;
  ChainInfo chain;

  std::vector<int> b;
  std::vector<double> alpha2;
  MatrixXd beta;                   // draws x (p + p k_d + k_a)
  std::vector<MatrixXd> sigma;     // p x p per draw
  std::vector<double> log_kernel;  // augmented log joint at the retained state
  std::vector<MatrixXd> utilities; // n x p per draw, only when requested

  DesignShape shape() const { return {p, k_d, k_a}; }
  std::size_t size() const { return b.size(); }

  /// p x (p-1) matrix F with F F' = sigma[t], used to simulate utilities.
  MatrixXd utility_factor(std::size_t t) const;
};

/// Starts a store with metadata copied from the dataset and hyperparameters.
DrawStore make_store(ModelKind kind, const ChoiceDataset& raw_data, const Hyperparameters& hyper,
                     int base = -1);

/// Per-category means of the alternative covariates (p x k_a).
MatrixXd alternative_means(const ChoiceDataset& data);

/// Column names of the full coefficient vector: beta_eta_<label>,
/// beta_<agent covariate>_<label>, beta_delta_<alternative covariate>.
std::vector<std::string> beta_names(const DrawStore& store);

}  // namespace smnp
