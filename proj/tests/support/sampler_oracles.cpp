#include "sampler_oracles.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"
#include "smnp/smnp_sampler.hpp"

#include <cmath>
#include <random>

namespace oracle {

using namespace smnp;

namespace {

// Wishart(df, M^{-1}) by summing df outer products (integer df), inverted.
MatrixXd invwishart(int df, const MatrixXd& M, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  const MatrixXd L = M.inverse().llt().matrixL();
  MatrixXd W = MatrixXd::Zero(M.rows(), M.cols());
  VectorXd z(M.rows());
  for (int k = 0; k < df; ++k) {
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = nd(gen);
    const VectorXd x = L * z;
    W += x * x.transpose();
  }
  return W.inverse();
}

}  // namespace

double single_site_pvalue(int b, int choice, int n, std::uint64_t seed) {
  ChoiceDataset data = empty_dataset({3, 0, 1});
  data.y = {choice};
  data.x_d = MatrixXd(1, 0);
  data.x_a = {(MatrixXd(3, 1) << 0.4, -0.1, -0.3).finished()};
  const SmnpSampler sampler(data, Hyperparameters{});
  SmnpState st;
  st.b = b;
  st.sigma_b = (MatrixXd(2, 2) << 1.3, 0.4, 0.4, 0.7).finished();
  st.alpha2 = 1.7;
  st.beta_tilde = (VectorXd(3) << 0.3, -0.2, 0.8).finished();
  RngStream init(seed);
  st.w_tilde = sampler.init_state(init).w_tilde;
  const int j1 = b == 0 ? 1 : 0;
  const int j2 = 3 - b - j1;

  RngStream rng = init.split(1);
  std::vector<double> sampled(n);
  for (int k = 0; k < n; ++k) {
    SmnpState copy = st;
    sampler.step_utilities(copy, rng);
    sampled[k] = copy.w_tilde(0, j1);
  }

  // Reduced coordinates are categories j1 < j2 in order.
  const VectorXd mu = sampler.design(0) * expand_beta(st.beta_tilde, sampler.shape(), b);
  const MatrixXd cov = st.alpha2 * st.sigma_b;
  const double cm = mu(j1) + cov(0, 1) / cov(1, 1) * (st.w_tilde(0, j2) - mu(j2));
  const double csd = std::sqrt(cov(0, 0) - cov(0, 1) * cov(0, 1) / cov(1, 1));
  std::mt19937_64 gen(seed ^ 0x5eed);
  std::normal_distribution<double> nd(cm, csd);
  std::vector<double> kept;
  while (static_cast<int>(kept.size()) < n) {
    Eigen::Vector3d w;
    w(j1) = nd(gen);
    w(j2) = st.w_tilde(0, j2);
    w(b) = -w(j1) - w(j2);
    Eigen::Index top;
    w.maxCoeff(&top);
    if (top == choice) kept.push_back(w(j1));
  }
  return ks_pvalue(sampled, kept);
}

double BaseWeights::max_rel_error() const {
  double worst = 0.0;
  for (std::size_t c = 0; c < sampled.size(); ++c) {
    worst = std::max(worst, std::abs(sampled[c] - integrated[c]) / integrated[c]);
  }
  return worst;
}

BaseWeights base_weight_check(int integration_draws, int sampler_draws, std::uint64_t seed) {
  const auto data = fixture::toy_dataset(5, 3, 0, 1, 21);
  const SmnpSampler sampler(data, Hyperparameters{});
  RngStream rng(seed);
  SmnpState st = sampler.init_state(rng);
  for (int k = 0; k < 5; ++k) sampler.sweep(st, rng);
  st.beta_tilde = (VectorXd(3) << 1.1, -0.6, -0.9).finished();
  const auto cands = sampler.scale_candidates(st);
  const double df = static_cast<double>(data.n()) + sampler.nu();
  const int K = sampler.n_coef();

  BaseWeights out;
  std::mt19937_64 gen(seed + 1);
  double total = 0.0;
  for (const auto& c : cands) {
    double acc = 0.0;
    for (int k = 0; k < integration_draws; ++k) {
      const double t = invwishart(static_cast<int>(df), c.M, gen).trace() / 2.0;
      acc += std::pow(t, -0.5 * K) * std::exp(-0.5 * c.q / t);
    }
    out.integrated.push_back(std::pow(c.M.determinant(), -0.5 * df) * acc / integration_draws);
    total += out.integrated.back();
  }
  for (double& w : out.integrated) w /= total;

  out.sampled.assign(cands.size(), 0.0);
  for (int k = 0; k < sampler_draws; ++k) out.sampled[draw_scale(cands, df, K, rng).index] += 1.0;
  for (double& f : out.sampled) f /= sampler_draws;
  return out;
}

}  // namespace oracle
