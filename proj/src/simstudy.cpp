#include "smnp/simstudy.hpp"

#include "smnp/distributions.hpp"
#include "smnp/errors.hpp"
#include "smnp/mnp_sampler.hpp"
#include "smnp/parallel.hpp"
#include "smnp/posterior.hpp"
#include "smnp/smnp_sampler.hpp"

#include <algorithm>
#include <cmath>

namespace smnp {

void SimScenario::validate() const {
  if (p < 2 || n < 1) throw DomainError("scenario needs p >= 2 and n >= 1");
  if (!(std::abs(correlation) < 1.0)) throw DomainError("scenario correlation must lie in (-1, 1)");
  if (!(intercept_sd > 0.0 && price_mean_sd > 0.0 && price_noise_sd >= 0.0)) {
    throw DomainError("scenario standard deviations must be positive");
  }
  if (!(coef_low <= coef_high)) throw DomainError("scenario coefficient range is empty");
  if (!(iw_df > p + 1.0)) throw DomainError("scenario iw_df must exceed p + 1");
  if (n_eval < 1 || n_eval > n) throw DomainError("scenario n_eval must lie in 1..n");
  if (mc_per_draw < 1 || true_prob_draws < 1) throw DomainError("scenario draw counts must be positive");
}

SimData gen_dataset(const SimScenario& sc, RngStream& rng) {
  sc.validate();
  const int p = sc.p;
  SimData out;
  TrueParams& t = out.truth;
  t.intercepts.resize(p);
  t.mean_prices.resize(p);
  const double r = sc.correlation;
  for (int j = 0; j < p; ++j) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    t.intercepts(j) = sc.intercept_sd * z1;
    t.mean_prices(j) = sc.price_center + sc.price_mean_sd * (r * z1 + std::sqrt(1.0 - r * r) * z2);
  }
  t.price_coef = sc.coef_low + (sc.coef_high - sc.coef_low) * rng.uniform();
  t.sigma = sample_invwishart(sc.iw_df, (sc.iw_df - p - 1.0) * MatrixXd::Identity(p, p), rng);

  ChoiceDataset& d = out.data;
  d.p = p;
  for (int j = 0; j < p; ++j) d.labels.push_back("b" + std::to_string(j + 1));
  d.alt_names = {"price"};
  d.x_d.resize(sc.n, 0);
  d.x_a.resize(sc.n);
  d.y.resize(sc.n);
  const MatrixXd L = t.sigma.llt().matrixL();
  VectorXd z(p);
  for (int i = 0; i < sc.n; ++i) {
    MatrixXd prices(p, 1);
    for (int j = 0; j < p; ++j) prices(j, 0) = t.mean_prices(j) + sc.price_noise_sd * rng.normal();
    for (int j = 0; j < p; ++j) z(j) = rng.normal();
    const VectorXd w = t.intercepts + t.price_coef * prices.col(0) + L * z;
    const ArgmaxResult top = argmax_lowest(w);
    if (top.tie) warn_tie("gen_dataset");
    d.y[i] = top.index;
    d.x_a[i] = std::move(prices);
  }
  return out;
}

VectorXd true_probs(const TrueParams& truth, const VectorXd& prices, int n_draws, RngStream& rng) {
  const auto p = truth.intercepts.size();
  if (prices.size() != p) throw DimensionError("true_probs: prices need p entries");
  if (n_draws < 1) throw DomainError("true_probs: n_draws must be positive");
  const VectorXd mean = truth.intercepts + truth.price_coef * prices;
  const MatrixXd L = truth.sigma.llt().matrixL();
  VectorXd counts = VectorXd::Zero(p);
  VectorXd z(p);
  for (int m = 0; m < n_draws; ++m) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
    counts(argmax_lowest(mean + L * z).index) += 1.0;
  }
  return counts / n_draws;
}

double total_variation(const VectorXd& p_hat, const VectorXd& p_true) {
  if (p_hat.size() != p_true.size()) throw DimensionError("total_variation: length mismatch");
  for (const VectorXd* v : {&p_hat, &p_true}) {
    if ((v->array() < -1e-12).any() || std::abs(v->sum() - 1.0) > 1e-6) {
      throw DomainError("total_variation: inputs must be probability vectors");
    }
  }
  return 0.5 * (p_hat - p_true).cwiseAbs().sum();
}

std::string ModelSpec::name() const {
  return kind == ModelKind::Symmetric ? "smnp" : "mnp_base" + std::to_string(base + 1);
}

DrawStore default_fit(const ChoiceDataset& data, const ModelSpec& model, const Hyperparameters& chain) {
  if (model.kind == ModelKind::Symmetric) return run_smnp(data, chain);
  return run_mnp(data, chain, model.base);
}

double ReplicateScores::median_base() const {
  std::vector<double> base(scores.begin() + 1, scores.end());
  std::sort(base.begin(), base.end());
  const auto m = base.size();
  return m % 2 == 1 ? base[m / 2] : 0.5 * (base[m / 2 - 1] + base[m / 2]);
}

bool ReplicateScores::smnp_beats_median() const { return scores.front() < median_base(); }

bool ReplicateScores::smnp_worst() const {
  return std::all_of(scores.begin() + 1, scores.end(), [&](double s) { return scores.front() > s; });
}

int StudyResult::beats_median() const {
  return static_cast<int>(std::count_if(replicates.begin(), replicates.end(),
                                        [](const auto& r) { return r.smnp_beats_median(); }));
}

int StudyResult::worst() const {
  return static_cast<int>(
      std::count_if(replicates.begin(), replicates.end(), [](const auto& r) { return r.smnp_worst(); }));
}

StudyResult run_study(int n_replicates, const SimScenario& scenario, const Hyperparameters& chain,
                      const RngStream& master, const FitFunction& fit) {
  if (n_replicates < 1) throw DomainError("run_study needs at least one replicate");
  scenario.validate();
  const int p = scenario.p;
  const int n_models = p + 1;

  struct Replicate {
    SimData sim;
    Hyperparameters chain;
    std::vector<VectorXd> truth;  // per evaluated priceset
  };
  std::vector<Replicate> reps(n_replicates);
  parallel_for(static_cast<std::size_t>(n_replicates), [&](std::size_t r) {
    const RngStream stream = master.split(r);
    RngStream gen = stream.split(0);
    reps[r].sim = gen_dataset(scenario, gen);
    reps[r].chain = chain;
    reps[r].chain.seed = stream.split(1)();
    for (int e = 0; e < scenario.n_eval; ++e) {
      RngStream truth_rng = stream.split(2).split(static_cast<std::uint64_t>(e));
      reps[r].truth.push_back(
          true_probs(reps[r].sim.truth, reps[r].sim.data.x_a[e].col(0), scenario.true_prob_draws, truth_rng));
    }
  });

  StudyResult result;
  result.replicates.resize(n_replicates);
  for (int r = 0; r < n_replicates; ++r) {
    auto& out = result.replicates[r];
    out.replicate = r;
    out.models.push_back({ModelKind::Symmetric, -1});
    for (int b = 0; b < p; ++b) out.models.push_back({ModelKind::BaseCategory, b});
    out.scores.assign(n_models, 0.0);
  }

  parallel_for(static_cast<std::size_t>(n_replicates * n_models), [&](std::size_t job) {
    const auto r = job / n_models;
    const auto m = job % n_models;
    const Replicate& rep = reps[r];
    const ModelSpec& model = result.replicates[r].models[m];
    const DrawStore draws = fit(rep.sim.data, model, rep.chain);
    const RngStream predict_rng = master.split(r).split(3);
    double total = 0.0;
    for (int e = 0; e < scenario.n_eval; ++e) {
      CovariateConfig config{VectorXd::Zero(0), rep.sim.data.x_a[e]};
      const auto probs = predict_probs(draws, config, scenario.mc_per_draw,
                                       predict_rng.split(static_cast<std::uint64_t>(e)));
      total += total_variation(probs.prob, rep.truth[e]);
    }
    result.replicates[r].scores[m] = total / scenario.n_eval;
  });
  return result;
}

}  // namespace smnp
