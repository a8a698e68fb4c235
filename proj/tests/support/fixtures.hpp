#pragma once

#include "smnp/core.hpp"
#include "smnp/rng.hpp"

namespace fixture {

/// Random covariates (alternative covariates deliberately not centered) and
/// choices from an MNP with independent unit-variance errors and the given
/// full coefficient vector (random when empty).
smnp::ChoiceDataset toy_dataset(int n, int p, int k_d, int k_a, std::uint64_t seed,
                                smnp::VectorXd beta = {});

/// Permutes the categories: new category perm[j] is old category j.
smnp::ChoiceDataset permute_categories(const smnp::ChoiceDataset& data, const std::vector<int>& perm);

}  // namespace fixture
