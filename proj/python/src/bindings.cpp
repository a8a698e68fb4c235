#include "smnp/cli.hpp"
#include "smnp/errors.hpp"
#include "smnp/io.hpp"
#include "smnp/log.hpp"
#include "smnp/mnp_sampler.hpp"
#include "smnp/posterior.hpp"
#include "smnp/prior_probe.hpp"
#include "smnp/simstudy.hpp"
#include "smnp/smnp_sampler.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace smnp;

namespace {

Hyperparameters chain_options(int iters, int burn, int thin, std::uint64_t seed, std::optional<double> nu,
                              std::optional<double> c, double beta_var) {
  Hyperparameters h;
  h.iters = iters;
  h.burn = burn;
  h.thin = thin;
  h.seed = seed;
  h.nu = nu;
  if (c) h.c = *c;
  h.beta_var = beta_var;
  return h;
}

ChoiceDataset make_dataset(std::vector<std::string> labels, std::vector<int> y, MatrixXd x_d,
                           std::vector<MatrixXd> x_a, std::vector<std::string> agent_names,
                           std::vector<std::string> alt_names) {
  ChoiceDataset d;
  d.p = static_cast<int>(labels.size());
  d.labels = std::move(labels);
  d.y = std::move(y);
  d.agent_names = std::move(agent_names);
  d.alt_names = std::move(alt_names);
  d.x_d = x_d.size() == 0 ? MatrixXd(static_cast<Eigen::Index>(d.y.size()), d.agent_names.size()) : x_d;
  d.x_a = x_a.empty() ? std::vector<MatrixXd>(d.y.size(), MatrixXd(d.p, d.alt_names.size())) : std::move(x_a);
  d.validate();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Symmetric and base-category multinomial probit samplers";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.def("set_quiet", [](bool quiet) { smnp::log::set_level(quiet ? smnp::log::Level::Warning : smnp::log::Level::Notice); },
        py::arg("quiet") = true);

  py::class_<ChoiceDataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("labels"), py::arg("y"), py::arg("x_d") = MatrixXd(),
           py::arg("x_a") = std::vector<MatrixXd>{}, py::arg("agent_names") = std::vector<std::string>{},
           py::arg("alt_names") = std::vector<std::string>{})
      .def_readonly("p", &ChoiceDataset::p)
      .def_readonly("labels", &ChoiceDataset::labels)
      .def_readonly("agent_names", &ChoiceDataset::agent_names)
      .def_readonly("alt_names", &ChoiceDataset::alt_names)
      .def_readonly("y", &ChoiceDataset::y)
      .def_readonly("x_d", &ChoiceDataset::x_d)
      .def_readonly("x_a", &ChoiceDataset::x_a)
      .def_property_readonly("n", &ChoiceDataset::n)
      .def("__repr__", [](const ChoiceDataset& d) {
        return "<Dataset n=" + std::to_string(d.n()) + " p=" + std::to_string(d.p) +
               " k_d=" + std::to_string(d.k_d()) + " k_a=" + std::to_string(d.k_a()) + ">";
      });

  m.def("read_dataset", &read_dataset, py::arg("path"));
  m.def("write_dataset", py::overload_cast<const ChoiceDataset&, const std::string&>(&write_dataset),
        py::arg("data"), py::arg("path"));

  py::class_<DrawStore>(m, "Draws")
      .def_property_readonly("kind", [](const DrawStore& s) { return to_string(s.kind); })
      .def_readonly("p", &DrawStore::p)
      .def_readonly("labels", &DrawStore::labels)
      .def_readonly("base", &DrawStore::base)
      .def_readonly("b", &DrawStore::b)
      .def_readonly("alpha2", &DrawStore::alpha2)
      .def_readonly("beta", &DrawStore::beta)
      .def_readonly("sigma", &DrawStore::sigma)
      .def_readonly("log_kernel", &DrawStore::log_kernel)
      .def_property_readonly("beta_names", &beta_names)
      .def("__len__", &DrawStore::size);

  m.def(
      "fit_smnp",
      [](const ChoiceDataset& data, int iters, int burn, int thin, std::uint64_t seed, std::optional<double> nu,
         std::optional<double> c, double beta_var, bool uncorrected) {
        const auto h = chain_options(iters, burn, thin, seed, nu, c, beta_var);
        py::gil_scoped_release release;
        const SmnpSampler sampler(data, h, uncorrected ? ScaleUpdate::Uncorrected : ScaleUpdate::Exact);
        return run_smnp(sampler, h);
      },
      py::arg("data"), py::arg("iters") = 20000, py::arg("burn") = 5000, py::arg("thin") = 5,
      py::arg("seed") = 1, py::arg("nu") = py::none(), py::arg("c") = py::none(), py::arg("beta_var") = 100.0,
      py::arg("uncorrected") = false);

  m.def(
      "fit_mnp",
      [](const ChoiceDataset& data, const std::string& base, int iters, int burn, int thin, std::uint64_t seed,
         std::optional<double> nu, std::optional<double> c, double beta_var) {
        int index = -1;
        for (int j = 0; j < data.p; ++j) {
          if (data.labels[j] == base) index = j;
        }
        if (index < 0) throw DomainError("unknown category label '" + base + "'");
        const auto h = chain_options(iters, burn, thin, seed, nu, c, beta_var);
        py::gil_scoped_release release;
        return run_mnp(data, h, index);
      },
      py::arg("data"), py::arg("base"), py::arg("iters") = 20000, py::arg("burn") = 5000, py::arg("thin") = 5,
      py::arg("seed") = 1, py::arg("nu") = py::none(), py::arg("c") = py::none(), py::arg("beta_var") = 100.0);

  m.def("write_draws", &write_draws, py::arg("draws"), py::arg("prefix"), py::arg("digits") = 17);
  m.def("read_draws", &read_draws, py::arg("path"));
  m.def("postprocess_identify", &postprocess_identify, py::arg("draws"));
  m.def(
      "trace", [](const DrawStore& s, const std::string& sel) { return export_traces(s, sel).values; },
      py::arg("draws"), py::arg("selector"));

  m.def(
      "predict_probs",
      [](const DrawStore& s, const VectorXd& x_d, const MatrixXd& x_a, int mc, std::uint64_t seed) {
        const auto r = predict_probs(s, {x_d, x_a}, mc, RngStream(seed));
        return py::make_tuple(r.prob, r.se);
      },
      py::arg("draws"), py::arg("x_d"), py::arg("x_a"), py::arg("mc_per_draw") = 32, py::arg("seed") = 1);

  m.def(
      "price_curve",
      [](const DrawStore& s, const std::string& brand, std::vector<double> grid, std::optional<VectorXd> prices,
         bool log_scale, int mc, std::uint64_t seed) {
        PriceCurveRequest req;
        req.brand = -1;
        for (int j = 0; j < s.p; ++j) {
          if (s.labels[j] == brand) req.brand = j;
        }
        if (req.brand < 0) throw DomainError("unknown category label '" + brand + "'");
        if (s.k_a < 1) throw DomainError("the draws have no alternative covariate to vary");
        req.grid = std::move(grid);
        req.log_scale = log_scale;
        req.mc_per_draw = mc;
        if (prices) {
          req.fixed_prices = *prices;
        } else {
          req.fixed_prices = s.alt_means.col(0);
          if (log_scale) req.fixed_prices = req.fixed_prices.array().exp();
        }
        const auto curve = price_curve(s, req, RngStream(seed));
        MatrixXd prob(curve.points.size(), s.p), se(curve.points.size(), s.p);
        for (std::size_t g = 0; g < curve.points.size(); ++g) {
          prob.row(static_cast<Eigen::Index>(g)) = curve.points[g].prob.transpose();
          se.row(static_cast<Eigen::Index>(g)) = curve.points[g].se.transpose();
        }
        return py::make_tuple(prob, se);
      },
      py::arg("draws"), py::arg("brand"), py::arg("grid"), py::arg("fixed_prices") = py::none(),
      py::arg("log_scale") = false, py::arg("mc_per_draw") = 32, py::arg("seed") = 1);

  m.def(
      "psi_curve",
      [](double nu, std::vector<double> v_grid, int n_sigma, int n_eps, std::uint64_t seed) {
        PriorProbeConfig cfg;
        cfg.nu = nu;
        cfg.v_grid = std::move(v_grid);
        cfg.n_sigma_draws = n_sigma;
        cfg.n_eps_draws = n_eps;
        cfg.validate();
        PsiCurve c;
        {
          py::gil_scoped_release release;
          c = psi_curve(cfg, RngStream(seed));
        }
        py::dict out;
        std::vector<double> v, base, se_base, nonbase, se_nonbase;
        for (const auto& pt : c.points) {
          v.push_back(pt.v);
          base.push_back(pt.psi_base);
          se_base.push_back(pt.se_base);
          nonbase.push_back(pt.psi_nonbase);
          se_nonbase.push_back(pt.se_nonbase);
        }
        out["v"] = v;
        out["psi_base"] = base;
        out["se_base"] = se_base;
        out["psi_nonbase"] = nonbase;
        out["se_nonbase"] = se_nonbase;
        out["phi_base"] = c.phi_base;
        out["phi_nonbase"] = c.phi_nonbase;
        return out;
      },
      py::arg("nu") = 2.0, py::arg("v_grid") = PriorProbeConfig::default_v_grid(), py::arg("n_sigma") = 10000,
      py::arg("n_eps") = 10000, py::arg("seed") = 1);

  m.def(
      "simulate_dataset",
      [](int n, int p, std::uint64_t seed) {
        SimScenario sc;
        sc.n = n;
        sc.p = p;
        RngStream rng(seed);
        return gen_dataset(sc, rng).data;
      },
      py::arg("n") = 750, py::arg("p") = 6, py::arg("seed") = 1);

  m.def(
      "run_study",
      [](int replicates, int n, int p, int iters, int burn, int thin, std::uint64_t seed, int mc, int truth_draws) {
        SimScenario sc;
        sc.n = n;
        sc.p = p;
        sc.mc_per_draw = mc;
        sc.true_prob_draws = truth_draws;
        Hyperparameters h;
        h.iters = iters;
        h.burn = burn;
        h.thin = thin;
        StudyResult res;
        {
          py::gil_scoped_release release;
          res = run_study(replicates, sc, h, RngStream(seed));
        }
        MatrixXd scores(replicates, p + 1);
        std::vector<std::string> names;
        for (const auto& mspec : res.replicates.front().models) names.push_back(mspec.name());
        for (int r = 0; r < replicates; ++r) {
          for (int k = 0; k <= p; ++k) scores(r, k) = res.replicates[r].scores[k];
        }
        return py::make_tuple(names, scores);
      },
      py::arg("replicates"), py::arg("n") = 750, py::arg("p") = 6, py::arg("iters") = 5000, py::arg("burn") = 1000,
      py::arg("thin") = 4, py::arg("seed") = 1, py::arg("mc_per_draw") = 32, py::arg("truth_draws") = 1000000);

  m.def(
      "main",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "smnp");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        return cli_main(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"), "Runs the command-line tool with the given arguments; returns the exit status.");
}
