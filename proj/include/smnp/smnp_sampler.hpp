#pragma once

// Three-step Gibbs sampler for the symmetric MNP on the transformed
// parametrization (alpha, Sigma_b, b, W~, beta~_b):
//   1. W~ | Y, beta~_b, b, Sigma_b, alpha   (univariate truncated normals)
//   2. beta~_b | Y, b, Sigma_b, W~, alpha   (normal regression update)
//   3. alpha, Sigma_b, b | Y, beta~, W~     (faux base and scale)

#include "smnp/core.hpp"
#include "smnp/draws.hpp"
#include "smnp/gibbs_kernels.hpp"
#include "smnp/rng.hpp"

#include <vector>

namespace smnp {

struct SmnpState {
  int b = 0;
  MatrixXd sigma_b;      // (p-1) x (p-1), trace p - 1
  double alpha2 = 1.0;
  MatrixXd w_tilde;      // n x p, rows sum to zero
  VectorXd beta_tilde;   // reduced coefficients in the b parametrization
};

class SmnpSampler {
 public:
  /// Centers alternative covariates (with a notice) and precomputes designs.
  SmnpSampler(const ChoiceDataset& data, const Hyperparameters& hyper,
              ScaleUpdate scale_update = ScaleUpdate::Exact);

  /// Centered data the chain runs on; raw_data() is the input as given.
  const ChoiceDataset& data() const { return data_; }
  const ChoiceDataset& raw_data() const { return raw_; }
  const DesignShape& shape() const { return shape_; }
  const MatrixXd& design(std::size_t i) const { return designs_[i]; }
  const MatrixXd& reduced_design(int b, std::size_t i) const { return reduced_[b][i]; }
  double nu() const { return nu_; }
  const MatrixXd& scale() const { return S_; }
  const MatrixXd& prior_cov() const { return A_; }
  int n_coef() const { return shape_.reduced_size(); }

  /// Replaces the observed choices (same agents and covariates).
  void set_choices(std::vector<int> y);

  SmnpState init_state(RngStream& rng) const;

  void step_utilities(SmnpState& state, RngStream& rng) const;
  void step_beta(SmnpState& state, RngStream& rng) const;
  /// Returns the scale draw's diagnostics (proposals used, fallback flag);
  /// its sigma and alpha2 are already moved into `state`.
  ScaleDraw step_b_sigma_alpha(SmnpState& state, RngStream& rng) const;
  void sweep(SmnpState& state, RngStream& rng) const;

  /// Log of the augmented joint density at `state` (up to a constant).
  double log_kernel(const SmnpState& state) const;

  /// Throws if any invariant of `state` fails (row sums, argmax, trace).
  void check_state(const SmnpState& state, double tol = 1e-8) const;

  /// The scale-draw candidates for every faux base given the state's
  /// coefficients and utilities.
  std::vector<ScaleCandidate> scale_candidates(const SmnpState& state) const;

 private:
  ChoiceDataset raw_;
  ChoiceDataset data_;
  DesignShape shape_;
  double nu_;
  MatrixXd S_;
  MatrixXd A_;
  MatrixXd A_inv_;
  double log_det_A_;
  ScaleUpdate scale_update_;
  std::vector<MatrixXd> designs_;               // n of p x full
  std::vector<std::vector<MatrixXd>> reduced_;  // [b][i] (p-1) x reduced
};

/// Full chain: `iters` sweeps, the first `burn` discarded, every `thin`-th
/// retained. Stored draws are back-transformed to the identified scale.
DrawStore run_smnp(const ChoiceDataset& data, const Hyperparameters& hyper);
/// Runs `sampler` with the chain controls and seed taken from `chain`.
DrawStore run_smnp(const SmnpSampler& sampler, const Hyperparameters& chain);

}  // namespace smnp
