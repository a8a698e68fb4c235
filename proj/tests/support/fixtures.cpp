#include "fixtures.hpp"

namespace fixture {

using namespace smnp;

ChoiceDataset toy_dataset(int n, int p, int k_d, int k_a, std::uint64_t seed, VectorXd beta) {
  RngStream rng(seed, 99);
  ChoiceDataset d = empty_dataset({p, k_d, k_a});
  const DesignShape shape = d.shape();
  if (beta.size() == 0) {
    VectorXd reduced(shape.reduced_size());
    for (int k = 0; k < reduced.size(); ++k) reduced(k) = 0.7 * rng.normal();
    beta = expand_beta(reduced, shape, 0);
  }
  d.x_d.resize(n, k_d);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < k_d; ++m) d.x_d(i, m) = rng.normal();
    MatrixXd xa(p, k_a);
    for (int j = 0; j < p; ++j)
      for (int m = 0; m < k_a; ++m) xa(j, m) = 1.0 + 0.5 * rng.normal();
    d.x_a.push_back(xa);
    VectorXd w = build_design(d.x_d.row(i).transpose(), xa) * beta;
    for (int j = 0; j < p; ++j) w(j) += rng.normal();
    d.y.push_back(argmax_lowest(w).index);
  }
  return d;
}

ChoiceDataset permute_categories(const ChoiceDataset& data, const std::vector<int>& perm) {
  ChoiceDataset out = data;
  for (int j = 0; j < data.p; ++j) out.labels[perm[j]] = data.labels[j];
  for (std::size_t i = 0; i < data.n(); ++i) {
    out.y[i] = perm[data.y[i]];
    for (int j = 0; j < data.p; ++j) out.x_a[i].row(perm[j]) = data.x_a[i].row(j);
  }
  return out;
}

}  // namespace fixture
