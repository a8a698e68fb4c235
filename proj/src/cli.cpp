#include "smnp/cli.hpp"

#include "smnp/errors.hpp"
#include "smnp/io.hpp"
#include "smnp/log.hpp"
#include "smnp/mnp_sampler.hpp"
#include "smnp/posterior.hpp"
#include "smnp/prior_probe.hpp"
#include "smnp/simstudy.hpp"
#include "smnp/smnp_sampler.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace smnp {

namespace fs = std::filesystem;

std::vector<double> parse_grid(const char* text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw DomainError(std::string("bad grid '") + text + "'");
    parts.push_back(v);
  }
  if (parts.size() != 3) throw DomainError(std::string("grid must be lo:hi:step, got '") + text + "'");
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0.0) || !(hi >= lo)) throw DomainError(std::string("grid needs step > 0 and hi >= lo: '") + text + "'");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 1000000) throw DomainError("grid has too many points");
  std::vector<double> grid;
  for (long k = 0; k < count; ++k) grid.push_back(lo + step * static_cast<double>(k));
  return grid;
}

namespace {

struct ChainOptions {
  int iters = 20000;
  int burn = 5000;
  int thin = 5;
  std::uint64_t seed = 1;
  double nu = -1.0;
  double c = -1.0;
  double beta_var = 100.0;
  bool uncorrected = false;

  void add(CLI::App& app) {
    app.add_option("--iters", iters, "Gibbs sweeps")->capture_default_str();
    app.add_option("--burn", burn, "Sweeps discarded")->capture_default_str();
    app.add_option("--thin", thin, "Keep every thin-th sweep")->capture_default_str();
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    app.add_option("--nu", nu, "Prior degrees of freedom (default p + 1)");
    app.add_option("--c", c, "Off-diagonal of the prior scale is -c (default 1/(p-1))");
    app.add_option("--beta-var", beta_var, "Coefficient prior variance")->capture_default_str();
  }

  Hyperparameters hyper() const {
    Hyperparameters h;
    h.iters = iters;
    h.burn = burn;
    h.thin = thin;
    h.seed = seed;
    if (nu > 0.0) h.nu = nu;
    h.c = c;
    h.beta_var = beta_var;
    return h;
  }
};

struct OutputOptions {
  std::string out = ".";
  int digits = 17;
  void add(CLI::App& app, bool with_digits) {
    app.add_option("--out", out, "Output directory")->capture_default_str();
    if (with_digits) {
      app.add_option("--float-format", digits, "Significant digits in draw tables")
          ->check(CLI::Range(1, 17))
          ->capture_default_str();
    }
  }
  std::string path(const std::string& name) const {
    fs::create_directories(out);
    return (fs::path(out) / name).string();
  }
};

int label_index(const std::vector<std::string>& labels, const std::string& label) {
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] == label) return static_cast<int>(j);
  }
  throw DomainError("unknown category label '" + label + "'");
}

void write_curve(const std::string& path, const DrawStore& draws, const PredictiveCurve& curve) {
  std::vector<std::string> header = {"price"};
  for (const auto& l : draws.labels) header.push_back("p_" + l);
  for (const auto& l : draws.labels) header.push_back("se_" + l);
  CsvWriter csv(path, header, 12);
  for (std::size_t g = 0; g < curve.grid.size(); ++g) {
    csv.cell(curve.grid[g]);
    for (int j = 0; j < draws.p; ++j) csv.cell(curve.points[g].prob(j));
    for (int j = 0; j < draws.p; ++j) csv.cell(curve.points[g].se(j));
    csv.end_row();
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Symmetric and base-category multinomial probit samplers"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress notices");

  // fit-smnp
  auto* fit_smnp = app.add_subcommand("fit-smnp", "Fit the symmetric MNP");
  std::string smnp_data;
  ChainOptions smnp_chain;
  OutputOptions smnp_out;
  std::string smnp_prefix = "smnp";
  fit_smnp->add_option("data", smnp_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  smnp_chain.add(*fit_smnp);
  smnp_out.add(*fit_smnp, true);
  fit_smnp->add_option("--prefix", smnp_prefix, "Draw file name")->capture_default_str();
  fit_smnp->add_flag("--uncorrected", smnp_chain.uncorrected,
                     "Use the scale update without the coefficient-prior factor");

  // fit-mnp
  auto* fit_mnp = app.add_subcommand("fit-mnp", "Fit the base-category MNP");
  std::string mnp_data;
  std::string mnp_base;
  ChainOptions mnp_chain;
  OutputOptions mnp_out;
  std::string mnp_prefix;
  fit_mnp->add_option("data", mnp_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  fit_mnp->add_option("--base", mnp_base, "Base category label")->required();
  mnp_chain.add(*fit_mnp);
  mnp_out.add(*fit_mnp, true);
  fit_mnp->add_option("--prefix", mnp_prefix, "Draw file name (default mnp_<base>)");

  // predict
  auto* predict = app.add_subcommand("predict", "Posterior predictive price curve");
  std::string pred_draws;
  std::string pred_brand;
  std::string pred_grid;
  bool pred_log = false;
  std::vector<double> pred_prices;
  std::string pred_covariate;
  int pred_mc = 32;
  std::uint64_t pred_seed = 1;
  OutputOptions pred_out;
  std::string pred_file;
  predict->add_option("draws", pred_draws, "Draw file prefix")->required();
  predict->add_option("--brand", pred_brand, "Category whose price varies")->required();
  predict->add_option("--grid", pred_grid, "Prices lo:hi:step")->required();
  predict->add_flag("--log-price", pred_log, "The covariate is log(price)");
  predict->add_option("--prices", pred_prices, "Prices of all categories (default: fitted means)")
      ->delimiter(',');
  predict->add_option("--covariate", pred_covariate, "Alternative covariate holding the price");
  predict->add_option("--mc", pred_mc, "Utility draws per posterior draw")->capture_default_str();
  predict->add_option("--seed", pred_seed, "Random seed")->capture_default_str();
  pred_out.add(*predict, false);
  predict->add_option("--file", pred_file, "Output file name (default predict_<brand>.csv)");

  // traces
  auto* traces = app.add_subcommand("traces", "Export parameter traces");
  std::string tr_draws;
  std::vector<std::string> tr_params;
  OutputOptions tr_out;
  std::string tr_file = "traces.csv";
  traces->add_option("draws", tr_draws, "Draw file prefix")->required();
  traces->add_option("--param", tr_params, "b, alpha2, log_kernel, beta:<k>, sigma:<i>,<j> or a column name")
      ->required();
  tr_out.add(*traces, false);
  traces->add_option("--file", tr_file, "Output file name")->capture_default_str();

  // prior-curves
  auto* prior = app.add_subcommand("prior-curves", "Prior asymmetry of the base-category MNP at p = 3");
  PriorProbeConfig probe;
  std::string prior_grid = "0:3:0.1";
  double prior_phi_v = 1.0;
  std::uint64_t prior_seed = 1;
  OutputOptions prior_out;
  prior->add_option("--nu", probe.nu, "Prior degrees of freedom")->capture_default_str();
  prior->add_option("--v-grid", prior_grid, "Utility offsets lo:hi:step")->capture_default_str();
  prior->add_option("--draws", probe.n_sigma_draws, "Prior covariance draws")->capture_default_str();
  prior->add_option("--eps", probe.n_eps_draws, "Error draws per covariance")->capture_default_str();
  prior->add_option("--phi-v", prior_phi_v, "Offset for the raw phi samples")->capture_default_str();
  prior->add_option("--seed", prior_seed, "Random seed")->capture_default_str();
  prior_out.add(*prior, false);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulation study: symmetric vs base-category fits");
  int sim_reps = 1;
  SimScenario scenario;
  ChainOptions sim_chain;
  sim_chain.iters = 5000;
  sim_chain.burn = 1000;
  sim_chain.thin = 4;
  OutputOptions sim_out;
  simulate->add_option("--replicates", sim_reps, "Replicates")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--n", scenario.n, "Agents per replicate")->capture_default_str();
  simulate->add_option("--p", scenario.p, "Categories")->capture_default_str();
  simulate->add_option("--mc", scenario.mc_per_draw, "Utility draws per posterior draw")->capture_default_str();
  simulate->add_option("--truth-draws", scenario.true_prob_draws, "Draws for the true probabilities")
      ->capture_default_str();
  sim_chain.add(*simulate);
  sim_out.add(*simulate, false);

  // postprocess
  auto* post = app.add_subcommand("postprocess", "Rescale symmetric-model draws to tr(Sigma) = p");
  std::string post_draws;
  std::string post_prefix;
  OutputOptions post_out;
  post->add_option("draws", post_draws, "Draw file prefix")->required();
  post->add_option("--prefix", post_prefix, "Output name (default <input>_pp)");
  post_out.add(*post, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (quiet) log::set_level(log::Level::Warning);

  try {
    if (*fit_smnp) {
      const auto data = read_dataset(smnp_data);
      const auto hyper = smnp_chain.hyper();
      const SmnpSampler sampler(data, hyper,
                                smnp_chain.uncorrected ? ScaleUpdate::Uncorrected : ScaleUpdate::Exact);
      const auto draws = run_smnp(sampler, hyper);
      write_draws(draws, smnp_out.path(smnp_prefix), smnp_out.digits);
    } else if (*fit_mnp) {
      const auto data = read_dataset(mnp_data);
      const int base = label_index(data.labels, mnp_base);
      const auto draws = run_mnp(data, mnp_chain.hyper(), base);
      write_draws(draws, mnp_out.path(mnp_prefix.empty() ? "mnp_" + mnp_base : mnp_prefix), mnp_out.digits);
    } else if (*predict) {
      const auto draws = read_draws(pred_draws);
      PriceCurveRequest req;
      req.brand = label_index(draws.labels, pred_brand);
      req.grid = parse_grid(pred_grid.c_str());
      req.log_scale = pred_log;
      req.mc_per_draw = pred_mc;
      if (!pred_covariate.empty()) {
        req.covariate = label_index(draws.alt_names, pred_covariate);
      }
      if (req.covariate >= draws.k_a) throw DomainError("the draws have no alternative covariate to vary");
      if (pred_prices.empty()) {
        req.fixed_prices = draws.alt_means.col(req.covariate);
        if (pred_log) req.fixed_prices = req.fixed_prices.array().exp();
      } else {
        if (static_cast<int>(pred_prices.size()) != draws.p) throw DimensionError("--prices needs one value per category");
        req.fixed_prices = Eigen::Map<const VectorXd>(pred_prices.data(), draws.p);
      }
      const auto curve = price_curve(draws, req, RngStream(pred_seed));
      write_curve(pred_out.path(pred_file.empty() ? "predict_" + pred_brand + ".csv" : pred_file), draws, curve);
    } else if (*traces) {
      const auto draws = read_draws(tr_draws);
      std::vector<TraceSeries> series;
      std::vector<std::string> header = {"iteration"};
      for (const auto& sel : tr_params) {
        series.push_back(export_traces(draws, sel));
        header.push_back(series.back().name);
      }
      CsvWriter csv(tr_out.path(tr_file), header);
      for (std::size_t t = 0; t < draws.size(); ++t) {
        csv.cell(static_cast<long long>(draws.chain.burn + (t + 1) * draws.chain.thin));
        for (const auto& s : series) csv.cell(s.values[t]);
        csv.end_row();
      }
    } else if (*prior) {
      probe.v_grid = parse_grid(prior_grid.c_str());
      const std::size_t n_grid = probe.v_grid.size();
      probe.v_grid.push_back(prior_phi_v);
      const auto curve = psi_curve(probe, RngStream(prior_seed));
      {
        CsvWriter csv(prior_out.path("psi.csv"), {"v", "which", "psi", "se"});
        for (std::size_t g = 0; g < n_grid; ++g) {
          const auto& pt = curve.points[g];
          csv.cell(pt.v).cell(std::string("base")).cell(pt.psi_base).cell(pt.se_base).end_row();
          csv.cell(pt.v).cell(std::string("nonbase")).cell(pt.psi_nonbase).cell(pt.se_nonbase).end_row();
        }
      }
      CsvWriter csv(prior_out.path("phi_samples.csv"), {"draw", "v", "phi_base", "phi_nonbase"});
      for (Eigen::Index s = 0; s < curve.phi_base.rows(); ++s) {
        csv.cell(static_cast<long long>(s + 1)).cell(prior_phi_v);
        csv.cell(curve.phi_base(s, n_grid)).cell(curve.phi_nonbase(s, n_grid)).end_row();
      }
    } else if (*simulate) {
      const auto chain = sim_chain.hyper();
      const auto result = run_study(sim_reps, scenario, chain, RngStream(chain.seed));
      CsvWriter csv(sim_out.path("sim_scores.csv"), {"replicate", "model", "score"});
      for (const auto& rep : result.replicates) {
        for (std::size_t m = 0; m < rep.models.size(); ++m) {
          csv.cell(static_cast<long long>(rep.replicate + 1)).cell(rep.models[m].name()).cell(rep.scores[m]).end_row();
        }
      }
      std::cout << "symmetric model beats the base-category median in " << result.beats_median() << "/"
                << sim_reps << " replicates; worst in " << result.worst() << "/" << sim_reps << "\n";
    } else if (*post) {
      const auto draws = postprocess_identify(read_draws(post_draws));
      const std::string name =
          post_prefix.empty() ? fs::path(draw_prefix(post_draws)).filename().string() + "_pp" : post_prefix;
      write_draws(draws, post_out.path(name), post_out.digits);
    }
  } catch (const std::exception& e) {
    std::cerr << "smnp: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace smnp
