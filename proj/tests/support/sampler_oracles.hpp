#pragma once

// Reference checks of single sampler conditionals that need the sampler's
// state layout but compute the answer independently.

#include <cstdint>
#include <vector>

namespace oracle {

/// One agent at p = 3 with a fixed state and faux base b. Compares the
/// first non-base utility after step_utilities against draws from the
/// untruncated conditional kept only when the implied argmax is `choice`.
/// Returns the two-sample KS p-value.
double single_site_pvalue(int b, int choice, int n, std::uint64_t seed);

/// Faux-base probabilities on a 5-agent, p = 3 toy: the sampler's empirical
/// frequencies against Monte Carlo integration of the marginal weight
///   |M_b|^{-df/2} E[(tr X / d)^{-K/2} exp(-q_b d / (2 tr X))], X ~ IW(df, M_b),
/// using an outer-product Wishart sampler.
struct BaseWeights {
  std::vector<double> sampled;
  std::vector<double> integrated;
  double max_rel_error() const;
};
BaseWeights base_weight_check(int integration_draws, int sampler_draws, std::uint64_t seed);

}  // namespace oracle
