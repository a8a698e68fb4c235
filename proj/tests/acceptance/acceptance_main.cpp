// Acceptance run: one PASS/FAIL/SKIP line per criterion. Pass criterion
// numbers as arguments to run a subset. Exit status is nonzero if any
// selected criterion fails.
//
// Criterion 8 needs a user-supplied dataset:
//   SMNP_REALDATA        dataset CSV (required, otherwise SKIP)
//   SMNP_REALDATA_BRAND  label whose price moves (default: first label)
//   SMNP_REALDATA_ITERS  chain length (default 20000; burn is a quarter)

#include "fixtures.hpp"
#include "geweke.hpp"
#include "oracles.hpp"
#include "sampler_oracles.hpp"
#include "smnp/cli.hpp"
#include "smnp/distributions.hpp"
#include "smnp/io.hpp"
#include "smnp/log.hpp"
#include "smnp/mnp_sampler.hpp"
#include "smnp/posterior.hpp"
#include "smnp/prior_probe.hpp"
#include "smnp/simstudy.hpp"
#include "smnp/smnp_sampler.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>

using namespace smnp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome verdict(bool ok, const std::string& detail) { return {ok ? Status::Pass : Status::Fail, detail}; }

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

Outcome sum_to_zero_structure() {
  RngStream rng(101);
  double worst_col = 0.0, worst_null = 0.0;
  int rank_failures = 0;
  for (int k = 0; k < 1000; ++k) {
    const int p = 2 + static_cast<int>(rng.below(7));
    const int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
    const MatrixXd raw = sample_invwishart(p + 2.0, MatrixXd::Identity(p - 1, p - 1), rng);
    const MatrixXd sigma_b = raw * ((p - 1) / raw.trace());
    const MatrixXd R = construct_R(sigma_b, b);
    worst_col = std::max(worst_col, R.colwise().sum().cwiseAbs().maxCoeff());
    const MatrixXd sigma = R * R.transpose();
    worst_null = std::max(worst_null, (sigma * MatrixXd::Ones(p, p)).cwiseAbs().maxCoeff());
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sigma);
    const auto& ev = eig.eigenvalues();
    const double tol = 1e-9 * ev.cwiseAbs().maxCoeff();
    if ((ev.array() > tol).count() != p - 1) ++rank_failures;
  }
  return verdict(worst_col < 1e-10 && worst_null < 1e-9 && rank_failures == 0,
                 "max |column sum| " + fmt(worst_col) + ", max |Sigma J| " + fmt(worst_null) +
                     ", rank failures " + std::to_string(rank_failures));
}

Outcome prior_recovery() {
  const DesignShape shape{4, 0, 1};
  const ChoiceDataset data = empty_dataset(shape);
  Hyperparameters h;
  h.iters = 101000;
  h.burn = 1000;
  h.thin = 10;
  h.seed = 202;
  const SmnpSampler sampler(data, h);
  const DrawStore s = run_smnp(sampler, h);

  std::vector<double> counts(4, 0.0);
  for (int b : s.b) counts[b] += 1.0;
  const double p_b = oracle::chisq_pvalue(counts, {0.25, 0.25, 0.25, 0.25});

  RngStream rng(203);
  const std::size_t T = s.size();
  std::vector<std::vector<double>> chain_diag(3), direct_diag(3);
  std::vector<std::vector<double>> chain_beta(shape.full_size()), direct_beta(shape.full_size());
  const MatrixXd LA = sampler.prior_cov().llt().matrixL();
  for (std::size_t t = 0; t < T; ++t) {
    const MatrixXd sb = drop_row_col(s.sigma[t], s.b[t]);
    const auto direct = sample_trace_restricted(sampler.nu(), sampler.scale(), 3.0, rng);
    const int b = static_cast<int>(rng.below(4));
    VectorXd z(sampler.n_coef());
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
    const VectorXd beta = expand_beta(LA * z, shape, b);
    for (int r = 0; r < 3; ++r) {
      chain_diag[r].push_back(sb(r, r));
      direct_diag[r].push_back(direct.sigma(r, r));
    }
    for (int k = 0; k < shape.full_size(); ++k) {
      chain_beta[k].push_back(s.beta(static_cast<Eigen::Index>(t), k));
      direct_beta[k].push_back(beta(k));
    }
  }
  double min_diag = 1.0, min_beta = 1.0;
  for (int r = 0; r < 3; ++r) min_diag = std::min(min_diag, oracle::ks_pvalue(chain_diag[r], direct_diag[r]));
  for (int k = 0; k < shape.full_size(); ++k) {
    min_beta = std::min(min_beta, oracle::ks_pvalue(chain_beta[k], direct_beta[k]));
  }
  return verdict(p_b > 0.01 && min_diag > 0.01 && min_beta > 0.01,
                 std::to_string(T) + " draws; b chi-square p " + fmt(p_b) + ", min KS p Sigma_b diagonal " +
                     fmt(min_diag) + ", min KS p beta " + fmt(min_beta));
}

Outcome getting_it_right() {
  const auto data = fixture::toy_dataset(4, 3, 0, 1, 303);
  Hyperparameters h;
  h.A = MatrixXd::Identity(3, 3);
  const auto stats = geweke::run_symmetric(data, h, 100000, 304);
  const auto worst = std::max_element(stats.begin(), stats.end(), [](const auto& a, const auto& b) {
    return std::abs(a.z) < std::abs(b.z);
  });
  return verdict(std::abs(worst->z) < 4.0, std::to_string(stats.size()) + " statistics, max |z| " +
                                               fmt(std::abs(worst->z)) + " (" + worst->name + ")");
}

// Predictive probabilities at the first few agents' covariates.
std::vector<PredictiveProbs> predict_at(const DrawStore& draws, const ChoiceDataset& data, int agents,
                                        const RngStream& rng) {
  std::vector<PredictiveProbs> out;
  for (int i = 0; i < agents; ++i) {
    out.push_back(predict_probs(draws, {VectorXd(0), data.x_a[i]}, 32, rng.split(static_cast<std::uint64_t>(i))));
  }
  return out;
}

Outcome relabeling_invariance() {
  SimScenario sc;
  sc.n = 300;
  sc.p = 4;
  RngStream gen(404);
  const ChoiceDataset data = gen_dataset(sc, gen).data;
  const std::vector<int> perm = {2, 0, 3, 1};
  const ChoiceDataset permuted = fixture::permute_categories(data, perm);

  Hyperparameters h;
  h.iters = 20000;
  h.burn = 2000;
  h.thin = 4;
  h.seed = 405;
  const DrawStore orig = run_smnp(data, h);
  h.seed = 406;
  const DrawStore perm_fit = run_smnp(permuted, h);
  const int agents = 5;
  const RngStream pred(407);
  const auto a = predict_at(orig, data, agents, pred);
  const auto b = predict_at(perm_fit, permuted, agents, pred);
  double tv = 0.0;
  for (int i = 0; i < agents; ++i) {
    VectorXd back(4);
    for (int j = 0; j < 4; ++j) back(j) = b[i].prob(perm[j]);
    tv = std::max(tv, total_variation(a[i].prob, back));
  }

  h.seed = 408;
  const DrawStore base0 = run_mnp(data, h, 0);
  const DrawStore base3 = run_mnp(data, h, 3);
  const auto m0 = predict_at(base0, data, agents, pred);
  const auto m3 = predict_at(base3, data, agents, pred);
  double z = 0.0;
  for (int i = 0; i < agents; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double se = std::hypot(m0[i].se(j), m3[i].se(j));
      z = std::max(z, std::abs(m0[i].prob(j) - m3[i].prob(j)) / se);
    }
  }
  return verdict(tv < 0.02 && z > 3.0, "symmetric model max TV after relabeling " + fmt(tv) +
                                           "; base-category max |difference| / MC se " + fmt(z));
}

Outcome prior_symmetry() {
  const PriorProbeConfig cfg;
  const PsiCurve c = psi_curve(cfg, RngStream(505));
  double gap = 0.0;
  for (const auto& pt : c.points) gap = std::max(gap, std::abs(pt.psi_base - pt.psi_nonbase));
  std::size_t at1 = 0;
  for (std::size_t g = 0; g < cfg.v_grid.size(); ++g) {
    if (std::abs(cfg.v_grid[g] - 1.0) < 1e-9) at1 = g;
  }
  auto sd = [](const Eigen::VectorXd& x) { return std::sqrt((x.array() - x.mean()).square().mean()); };
  const double sd_base = sd(c.phi_base.col(static_cast<Eigen::Index>(at1)));
  const double sd_nonbase = sd(c.phi_nonbase.col(static_cast<Eigen::Index>(at1)));
  return verdict(gap < 0.02 && sd_nonbase > sd_base, "max |psi_base - psi_nonbase| " + fmt(gap) +
                                                         "; sd phi(1): base " + fmt(sd_base) + ", nonbase " +
                                                         fmt(sd_nonbase));
}

Outcome simulation_study() {
  const SimScenario sc;
  Hyperparameters chain;
  chain.iters = 5000;
  chain.burn = 1000;
  chain.thin = 4;
  const StudyResult res = run_study(10, sc, chain, RngStream(606));
  const int beats = res.beats_median();
  const int worst = res.worst();
  return verdict(beats >= 6 && worst <= 2, "beats the base-category median in " + std::to_string(beats) +
                                               "/10, strictly worst in " + std::to_string(worst) + "/10");
}

Outcome micro_oracles() {
  std::ostringstream msg;
  bool ok = true;

  RngStream cfg(701), rng(702);
  int tn_fail = 0;
  const int n = 20000;
  for (int c = 0; c < 50; ++c) {
    const double mu = 3.0 * cfg.normal();
    const double sd = 0.2 + 2.0 * cfg.uniform();
    double lo = mu + sd * (4.0 * cfg.normal());
    double hi = lo + sd * (0.05 + 3.0 * cfg.uniform());
    const auto kind = cfg.below(4);
    if (kind == 0) lo = -kInf;
    if (kind == 1) hi = kInf;
    const auto ref = oracle::truncnorm_moments(mu, sd, lo, hi);
    std::vector<double> x(n);
    for (auto& v : x) v = sample_truncnorm(mu, sd, lo, hi, rng);
    const double m = oracle::mean(x);
    const double s = oracle::sample_sd(x);
    if (std::abs(m - ref.mean) >= 5 * std::sqrt(ref.var / n) ||
        std::abs(s * s - ref.var) >= 5 * ref.var * std::sqrt(4.0 / n)) {
      ++tn_fail;
    }
  }
  ok = ok && tn_fail == 0;
  msg << "truncnorm " << 50 - tn_fail << "/50";

  MatrixXd S(3, 3);
  S << 2, 0.6, -0.3, 0.6, 1, 0.2, -0.3, 0.2, 1.5;
  const double nu = 12.0;
  MatrixXd m = MatrixXd::Zero(3, 3);
  for (int k = 0; k < 100000; ++k) m += sample_invwishart(nu, S, rng);
  m /= 100000;
  const MatrixXd target = S / (nu - 3 - 1);
  const double iw_err = (m - target).norm() / target.norm();
  ok = ok && iw_err < 0.01;
  msg << "; IW mean rel. error " << fmt(iw_err);

  double min_p = 1.0;
  for (int b = 0; b < 3; ++b) {
    for (int choice = 0; choice < 3; ++choice) {
      min_p = std::min(min_p, oracle::single_site_pvalue(b, choice, 100000, 100 + 10 * b + choice));
    }
  }
  ok = ok && min_p > 0.01;
  msg << "; step-1 min KS p " << fmt(min_p);

  const auto w = oracle::base_weight_check(1000000, 1000000, 10);
  ok = ok && w.max_rel_error() < 0.02;
  msg << "; step-3 b-weight max rel. error " << fmt(w.max_rel_error());
  return verdict(ok, msg.str());
}

Outcome real_data() {
  const char* path = std::getenv("SMNP_REALDATA");
  if (!path) return {Status::Skip, "set SMNP_REALDATA to a dataset CSV to run"};
  const ChoiceDataset data = read_dataset(path);
  if (data.k_a() < 1) return {Status::Fail, "dataset has no price covariate"};
  const char* brand_env = std::getenv("SMNP_REALDATA_BRAND");
  const std::string brand = brand_env ? brand_env : data.labels.front();
  const char* iters_env = std::getenv("SMNP_REALDATA_ITERS");
  const int iters = iters_env ? std::atoi(iters_env) : 20000;

  const auto dir = std::filesystem::temp_directory_path() / "smnp_realdata";
  std::filesystem::create_directories(dir);
  const std::vector<std::string> chain = {"--iters", std::to_string(iters), "--burn", std::to_string(iters / 4),
                                          "--thin", "5", "--out", dir.string()};
  auto cli = [](std::vector<std::string> args) {
    args.insert(args.begin(), {"smnp", "-q"});
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
  };
  auto with_chain = [&](std::vector<std::string> a) {
    a.insert(a.end(), chain.begin(), chain.end());
    return a;
  };
  if (cli(with_chain({"fit-smnp", path})) != 0) return {Status::Fail, "fit-smnp failed"};
  for (const auto& label : data.labels) {
    if (cli(with_chain({"fit-mnp", path, "--base", label})) != 0) return {Status::Fail, "fit-mnp failed"};
  }

  const DrawStore sym = read_draws((dir / "smnp").string());
  int brand_index = -1;
  for (int j = 0; j < data.p; ++j) {
    if (data.labels[j] == brand) brand_index = j;
  }
  if (brand_index < 0) return {Status::Fail, "unknown brand " + brand};
  double lo = kInf, hi = -kInf;
  for (const auto& xa : data.x_a) {
    lo = std::min(lo, xa(brand_index, 0));
    hi = std::max(hi, xa(brand_index, 0));
  }
  PriceCurveRequest req;
  req.brand = brand_index;
  for (int g = 0; g < 25; ++g) req.grid.push_back(lo + (hi - lo) * g / 24.0);
  req.fixed_prices = sym.alt_means.col(0);
  const RngStream rng(808);
  const auto curve = price_curve(sym, req, rng);
  std::vector<PredictiveCurve> base_curves;
  for (const auto& label : data.labels) {
    base_curves.push_back(price_curve(read_draws((dir / ("mnp_" + label)).string()), req, rng));
  }
  int inside = 0;
  for (std::size_t g = 0; g < req.grid.size(); ++g) {
    double mn = kInf, mx = -kInf;
    for (const auto& bc : base_curves) {
      mn = std::min(mn, bc.points[g].prob(brand_index));
      mx = std::max(mx, bc.points[g].prob(brand_index));
    }
    const double v = curve.points[g].prob(brand_index);
    if (v >= mn && v <= mx) ++inside;
  }
  std::vector<double> share(data.p, 0.0);
  for (int b : sym.b) share[b] += 1.0 / static_cast<double>(sym.size());
  const auto visited = std::count_if(share.begin(), share.end(), [](double s) { return s > 0.0; });
  const double top = *std::max_element(share.begin(), share.end());
  const double frac = static_cast<double>(inside) / static_cast<double>(req.grid.size());
  std::filesystem::remove_all(dir);
  return verdict(frac >= 0.8 && visited == data.p && top <= 0.6,
                 "curve inside base-category range at " + fmt(100 * frac, 3) + "% of grid; b visits " +
                     std::to_string(visited) + "/" + std::to_string(data.p) + " values, top share " + fmt(top));
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  log::set_level(log::Level::Quiet);
  const std::vector<Criterion> all = {
      {1, "sum-to-zero structure", sum_to_zero_structure},
      {2, "prior recovery", prior_recovery},
      {3, "getting-it-right", getting_it_right},
      {4, "relabeling invariance", relabeling_invariance},
      {5, "prior symmetry probe", prior_symmetry},
      {6, "scaled simulation study", simulation_study},
      {7, "sampler micro-oracles", micro_oracles},
      {8, "real-data smoke test", real_data},
  };
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {Status::Fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = out.status == Status::Pass ? "PASS" : out.status == Status::Fail ? "FAIL" : "SKIP";
    if (out.status == Status::Fail) ++failures;
    std::printf("criterion %d (%s): %s [%.1f s] %s\n", c.id, c.name, tag, secs, out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
