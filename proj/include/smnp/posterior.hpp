#pragma once

// Posterior predictive choice probabilities, price curves, the trace
// rescaling used to report a single identified scale, and trace export.

#include "smnp/draws.hpp"
#include "smnp/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace smnp {

/// Covariates of one hypothetical agent. x_a is on the raw scale; it is
/// centered across alternatives before use, as in fitting.
struct CovariateConfig {
  VectorXd x_d;  // k_d
  MatrixXd x_a;  // p x k_a
};

struct PredictiveProbs {
  VectorXd prob;  // sums to 1
  VectorXd se;    // batch-means Monte Carlo standard errors
};

/// Averages argmax frequencies of mc_per_draw simulated utility vectors per
/// retained draw. Draw t uses rng.split(t), so equal rng states give common
/// random numbers across covariate settings.
PredictiveProbs predict_probs(const DrawStore& draws, const CovariateConfig& config,
                              int mc_per_draw, const RngStream& rng);

struct PriceCurveRequest {
  int brand = 0;                 // category whose price moves
  std::vector<double> grid;      // prices for `brand`
  VectorXd fixed_prices;         // p prices for the other categories
  bool log_scale = false;        // covariate is log(price)
  int covariate = 0;             // which alternative covariate is the price
  std::optional<VectorXd> x_d;   // defaults to the fitted agent means
  int mc_per_draw = 32;
};

struct PredictiveCurve {
  std::vector<double> grid;
  std::vector<PredictiveProbs> points;
};

/// Every grid point reuses `rng`, so the curve is smooth in the price.
PredictiveCurve price_curve(const DrawStore& draws, const PriceCurveRequest& request,
                            const RngStream& rng);

/// Rescales each draw so tr(Sigma) = p: Sigma *= s, beta *= sqrt(s),
/// s = p / tr(Sigma). Only meaningful for the symmetric model.
DrawStore postprocess_identify(DrawStore draws);

struct TraceSeries {
  std::string name;
  std::vector<double> values;  // one per retained draw
};

/// Selectors: "b" (1-based), "alpha2", "log_kernel", "beta:<k>" (1-based)
/// or a beta column name, "sigma:<i>,<j>" (1-based) or "sigma_<i>_<j>".
TraceSeries export_traces(const DrawStore& draws, const std::string& selector);

/// Batch-means standard error of the mean of `x` with up to `batches` batches.
double batch_means_se(const std::vector<double>& x, int batches = 20);

}  // namespace smnp
