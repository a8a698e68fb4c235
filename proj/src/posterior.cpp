#include "smnp/posterior.hpp"

#include "smnp/errors.hpp"
#include "smnp/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace smnp {

namespace {

int parse_index(const std::string& text, const std::string& selector) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw DomainError("bad index in trace selector '" + selector + "'");
  return value;
}

}  // namespace

double batch_means_se(const std::vector<double>& x, int batches) {
  const auto n = static_cast<int>(x.size());
  if (n < 2) return 0.0;
  const int nb = std::min(batches, n);
  const int len = n / nb;
  std::vector<double> means(nb);
  for (int b = 0; b < nb; ++b) {
    const auto first = x.begin() + b * len;
    // The last batch absorbs the remainder.
    const auto last = b + 1 == nb ? x.end() : first + len;
    means[b] = std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / nb;
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  return std::sqrt(ss / (nb - 1) / nb);
}

PredictiveProbs predict_probs(const DrawStore& draws, const CovariateConfig& config,
                              int mc_per_draw, const RngStream& rng) {
  const int p = draws.p;
  if (draws.size() == 0) throw DomainError("predict_probs: no draws");
  if (mc_per_draw < 1) throw DomainError("predict_probs: mc_per_draw must be positive");
  if (config.x_d.size() != draws.k_d || config.x_a.rows() != p || config.x_a.cols() != draws.k_a) {
    throw DimensionError("predict_probs: covariate configuration does not match the draws");
  }
  MatrixXd x_a = config.x_a;
  if (draws.k_a > 0) x_a.rowwise() -= x_a.colwise().mean();
  const MatrixXd X = build_design(config.x_d, x_a);

  const std::size_t T = draws.size();
  MatrixXd freq(static_cast<Eigen::Index>(T), p);
  parallel_for(T, [&](std::size_t t) {
    RngStream local = rng.split(t);
    const VectorXd mean = X * draws.beta.row(static_cast<Eigen::Index>(t)).transpose();
    const MatrixXd F = draws.utility_factor(t);
    VectorXd z(p - 1);
    VectorXd counts = VectorXd::Zero(p);
    for (int m = 0; m < mc_per_draw; ++m) {
      for (int k = 0; k < p - 1; ++k) z(k) = local.normal();
      const VectorXd u = mean + F * z;
      const ArgmaxResult top = argmax_lowest(u);
      if (top.tie) warn_tie("predict_probs");
      counts(top.index) += 1.0;
    }
    freq.row(static_cast<Eigen::Index>(t)) = counts.transpose() / mc_per_draw;
  });

  PredictiveProbs out;
  out.prob = freq.colwise().mean().transpose();
  out.se.resize(p);
  std::vector<double> column(T);
  for (int k = 0; k < p; ++k) {
    for (std::size_t t = 0; t < T; ++t) column[t] = freq(static_cast<Eigen::Index>(t), k);
    out.se(k) = batch_means_se(column);
  }
  return out;
}

PredictiveCurve price_curve(const DrawStore& draws, const PriceCurveRequest& request,
                            const RngStream& rng) {
  const int p = draws.p;
  if (request.grid.empty()) throw DomainError("price_curve: empty grid");
  if (request.brand < 0 || request.brand >= p) throw DomainError("price_curve: brand out of range");
  if (request.covariate < 0 || request.covariate >= draws.k_a) {
    throw DomainError("price_curve: the draws have no alternative covariate " +
                      std::to_string(request.covariate));
  }
  if (request.fixed_prices.size() != p) throw DimensionError("price_curve: fixed_prices needs p entries");
  auto transform = [&](double price) {
    if (!request.log_scale) return price;
    if (!(price > 0.0)) throw DomainError("price_curve: log scale needs positive prices");
    return std::log(price);
  };

  CovariateConfig base_config;
  base_config.x_d = request.x_d.value_or(draws.agent_means);
  base_config.x_a = draws.alt_means;
  for (int j = 0; j < p; ++j) base_config.x_a(j, request.covariate) = transform(request.fixed_prices(j));

  PredictiveCurve curve;
  curve.grid = request.grid;
  curve.points.resize(request.grid.size());
  // Validate every grid value before spending any simulation time.
  std::vector<double> values(request.grid.size());
  for (std::size_t g = 0; g < values.size(); ++g) values[g] = transform(request.grid[g]);
  parallel_for(values.size(), [&](std::size_t g) {
    CovariateConfig config = base_config;
    config.x_a(request.brand, request.covariate) = values[g];
    curve.points[g] = predict_probs(draws, config, request.mc_per_draw, rng);
  });
  return curve;
}

DrawStore postprocess_identify(DrawStore draws) {
  if (draws.kind != ModelKind::Symmetric) {
    throw DomainError("postprocess_identify applies to symmetric-model draws only");
  }
  const double p = draws.p;
  for (std::size_t t = 0; t < draws.size(); ++t) {
    const double s = p / draws.sigma[t].trace();
    draws.sigma[t] *= s;
    draws.beta.row(static_cast<Eigen::Index>(t)) *= std::sqrt(s);
  }
  return draws;
}

TraceSeries export_traces(const DrawStore& draws, const std::string& selector) {
  TraceSeries out;
  const std::size_t T = draws.size();
  out.values.resize(T);
  if (selector == "b") {
    out.name = "b";
    for (std::size_t t = 0; t < T; ++t) out.values[t] = draws.b[t] + 1;
    return out;
  }
  if (selector == "alpha2" || selector == "log_kernel") {
    out.name = selector;
    out.values = selector == "alpha2" ? draws.alpha2 : draws.log_kernel;
    return out;
  }

  const auto names = beta_names(draws);
  int beta_col = -1;
  if (selector.rfind("beta:", 0) == 0) {
    beta_col = parse_index(selector.substr(5), selector) - 1;
    if (beta_col < 0 || beta_col >= static_cast<int>(names.size())) {
      throw DomainError("trace selector '" + selector + "' is out of range");
    }
  } else {
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (names[k] == selector) beta_col = static_cast<int>(k);
    }
  }
  if (beta_col >= 0) {
    out.name = names[beta_col];
    for (std::size_t t = 0; t < T; ++t) out.values[t] = draws.beta(static_cast<Eigen::Index>(t), beta_col);
    return out;
  }

  std::string pair;
  if (selector.rfind("sigma:", 0) == 0) {
    pair = selector.substr(6);
    std::replace(pair.begin(), pair.end(), ',', '_');
  } else if (selector.rfind("sigma_", 0) == 0) {
    pair = selector.substr(6);
  }
  if (!pair.empty()) {
    const auto sep = pair.find('_');
    if (sep == std::string::npos) throw DomainError("trace selector '" + selector + "' needs two indices");
    const int i = parse_index(pair.substr(0, sep), selector) - 1;
    const int j = parse_index(pair.substr(sep + 1), selector) - 1;
    if (i < 0 || j < 0 || i >= draws.p || j >= draws.p) {
      throw DomainError("trace selector '" + selector + "' is out of range");
    }
    out.name = "sigma_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
    for (std::size_t t = 0; t < T; ++t) out.values[t] = draws.sigma[t](i, j);
    return out;
  }
  throw DomainError("unknown trace selector '" + selector + "'");
}

}  // namespace smnp
