#pragma once

// Synthetic brand-choice data with a single price covariate, and the
// comparison of the symmetric model against every base-category fit by
// total variation of predicted purchase probabilities.

#include "smnp/core.hpp"
#include "smnp/draws.hpp"
#include "smnp/rng.hpp"

#include <functional>
#include <string>
#include <vector>

namespace smnp {

struct SimScenario {
  int n = 750;
  int p = 6;
  double correlation = 0.9;      // between brand intercepts and mean prices
  double intercept_sd = 0.5;
  double price_mean_sd = 0.5;
  double price_center = 1.0;
  double price_noise_sd = 0.1;   // per-observation noise around brand means
  double coef_low = -1.25;
  double coef_high = -0.75;
  double iw_df = 50.0;           // utility covariance ~ IW(df, (df - p - 1) I)
  int n_eval = 10;               // pricesets scored: the first n_eval observations
  int mc_per_draw = 32;
  int true_prob_draws = 1000000;

  void validate() const;
};

struct TrueParams {
  VectorXd intercepts;   // p
  VectorXd mean_prices;  // p
  double price_coef = 0.0;
  MatrixXd sigma;        // p x p, full rank
};

struct SimData {
  ChoiceDataset data;
  TrueParams truth;
};

SimData gen_dataset(const SimScenario& scenario, RngStream& rng);

/// Argmax frequencies of n_draws utility vectors at the given prices.
VectorXd true_probs(const TrueParams& truth, const VectorXd& prices, int n_draws, RngStream& rng);

/// 0.5 * L1 distance; both inputs must lie on the simplex within 1e-6.
double total_variation(const VectorXd& p_hat, const VectorXd& p_true);

struct ModelSpec {
  ModelKind kind = ModelKind::Symmetric;
  int base = -1;
  std::string name() const;
};

using FitFunction = std::function<DrawStore(const ChoiceDataset&, const ModelSpec&, const Hyperparameters&)>;

/// run_smnp for the symmetric model, run_mnp at model.base otherwise.
DrawStore default_fit(const ChoiceDataset& data, const ModelSpec& model, const Hyperparameters& chain);

struct ReplicateScores {
  int replicate = 0;
  std::vector<ModelSpec> models;  // symmetric first, then base 0..p-1
  std::vector<double> scores;     // mean total variation over evaluated pricesets
  double median_base() const;
  bool smnp_beats_median() const;
  bool smnp_worst() const;
};

struct StudyResult {
  std::vector<ReplicateScores> replicates;
  int beats_median() const;
  int worst() const;
};

/// Replicate r draws everything from master.split(r). All models in a
/// replicate share the chain seed and the prediction random numbers.
StudyResult run_study(int n_replicates, const SimScenario& scenario, const Hyperparameters& chain,
                      const RngStream& master, const FitFunction& fit = default_fit);

}  // namespace smnp
