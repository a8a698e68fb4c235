#pragma once

// Trace-restricted base-category MNP. Utilities are differenced against a
// fixed base, W*_i = X*_i beta* + e*_i with e*_i ~ normal(0, Sigma*) and
// tr(Sigma*) = p - 1, sampled with the same working-parameter scheme as the
// symmetric model.
//
// The non-base categories keep their ascending order, so coordinate r of
// W* belongs to category r + (r >= base). This is the "base first" rotation
// of the textbook form with the remaining order untouched.

#include "smnp/core.hpp"
#include "smnp/draws.hpp"
#include "smnp/gibbs_kernels.hpp"
#include "smnp/rng.hpp"

#include <vector>

namespace smnp {

struct MnpState {
  MatrixXd sigma_star;   // (p-1) x (p-1), trace p - 1
  double alpha2 = 1.0;
  MatrixXd w_star;       // n x (p-1), working scale
  VectorXd beta_tilde;   // reduced coefficients, working scale
};

/// X*_i = [I_{p-1} | x_d' (x) I_{p-1} | x_a[j] - x_a[base]] over j != base.
std::vector<MatrixXd> transform_to_base(const ChoiceDataset& data, int base);

/// T Sigma T' where T maps a p-vector to its differences from the base.
MatrixXd sigma_star_from_full(const MatrixXd& sigma, int base);

/// Full coefficient vector with zeros at the base position of every
/// zero-sum block (the inverse of dropping them).
VectorXd insert_base_zeros(const VectorXd& reduced, const DesignShape& shape, int base);

class MnpSampler {
 public:
  MnpSampler(const ChoiceDataset& data, const Hyperparameters& hyper, int base,
             ScaleUpdate scale_update = ScaleUpdate::Exact);

  const ChoiceDataset& data() const { return data_; }
  const ChoiceDataset& raw_data() const { return raw_; }
  const DesignShape& shape() const { return shape_; }
  int base() const { return base_; }
  double nu() const { return nu_; }
  const MatrixXd& scale() const { return S_; }
  const MatrixXd& prior_cov() const { return A_; }
  int n_coef() const { return shape_.reduced_size(); }
  const MatrixXd& design(std::size_t i) const { return designs_[i]; }

  void set_choices(std::vector<int> y);

  MnpState init_state(RngStream& rng) const;
  void step_utilities(MnpState& state, RngStream& rng) const;
  void step_beta(MnpState& state, RngStream& rng) const;
  void step_sigma_alpha(MnpState& state, RngStream& rng) const;
  void sweep(MnpState& state, RngStream& rng) const;

  double log_kernel(const MnpState& state) const;
  void check_state(const MnpState& state) const;

 private:
  ChoiceDataset raw_;
  ChoiceDataset data_;
  DesignShape shape_;
  int base_;
  double nu_;
  MatrixXd S_;
  MatrixXd A_;
  MatrixXd A_inv_;
  double log_det_A_;
  ScaleUpdate scale_update_;
  std::vector<MatrixXd> designs_;  // n of (p-1) x reduced
};

DrawStore run_mnp(const ChoiceDataset& data, const Hyperparameters& hyper, int base);
DrawStore run_mnp(const MnpSampler& sampler, const Hyperparameters& chain);

}  // namespace smnp
