#include "smnp/prior_probe.hpp"

#include "smnp/distributions.hpp"
#include "smnp/errors.hpp"
#include "smnp/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace smnp {

namespace {

double sd_error(const Eigen::VectorXd& x) {
  const auto n = x.size();
  if (n < 2) return 0.0;
  const double mean = x.mean();
  return std::sqrt((x.array() - mean).square().sum() / (n - 1) / n);
}

}  // namespace

Eigen::MatrixXd PriorProbeConfig::default_probe_scale() {
  return 0.5 * Eigen::MatrixXd::Ones(2, 2) + 0.5 * Eigen::MatrixXd::Identity(2, 2);
}

std::vector<double> PriorProbeConfig::default_v_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 30; ++k) grid.push_back(0.1 * k);
  return grid;
}

void PriorProbeConfig::validate() const {
  if (S.rows() != 2 || S.cols() != 2) throw DimensionError("prior probe: S must be 2 x 2");
  if (S.llt().info() != Eigen::Success) throw DomainError("prior probe: S must be SPD");
  if (!(nu > 1.0)) throw DomainError("prior probe: nu must exceed 1");
  if (n_sigma_draws < 1 || n_eps_draws < 1) throw DomainError("prior probe: counts must be positive");
  if (v_grid.empty()) throw DomainError("prior probe: empty v grid");
}

ProbeThresholds probe_thresholds(const Eigen::MatrixXd& sigma_star, int n_eps, RngStream& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_star);
  if (sigma_star.rows() != 2 || llt.info() != Eigen::Success) {
    throw DomainError("probe: Sigma* must be a 2 x 2 SPD matrix");
  }
  const Eigen::MatrixXd L = llt.matrixL();
  ProbeThresholds out;
  out.base.resize(n_eps);
  out.nonbase.resize(n_eps);
  for (int m = 0; m < n_eps; ++m) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double e1 = L(0, 0) * z1;
    const double e2 = L(1, 0) * z1 + L(1, 1) * z2;
    out.base[m] = std::max(e1, e2);
    out.nonbase[m] = std::max(-e1, e2 - e1);
  }
  std::sort(out.base.begin(), out.base.end());
  std::sort(out.nonbase.begin(), out.nonbase.end());
  return out;
}

double fraction_below(const std::vector<double>& sorted, double v) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double phi(double v, const Eigen::MatrixXd& sigma_star, ProbeTarget which, int n_eps, RngStream& rng) {
  const auto t = probe_thresholds(sigma_star, n_eps, rng);
  return fraction_below(which == ProbeTarget::Base ? t.base : t.nonbase, v);
}

PsiCurve psi_curve(const PriorProbeConfig& cfg, const RngStream& rng) {
  cfg.validate();
  const auto G = static_cast<Eigen::Index>(cfg.v_grid.size());
  PsiCurve out;
  out.phi_base.resize(cfg.n_sigma_draws, G);
  out.phi_nonbase.resize(cfg.n_sigma_draws, G);
  parallel_for(static_cast<std::size_t>(cfg.n_sigma_draws), [&](std::size_t s) {
    RngStream local = rng.split(s);
    const auto draw = sample_trace_restricted(cfg.nu, cfg.S, 2.0, local);
    const auto t = probe_thresholds(draw.sigma, cfg.n_eps_draws, local);
    const auto row = static_cast<Eigen::Index>(s);
    for (Eigen::Index g = 0; g < G; ++g) {
      out.phi_base(row, g) = fraction_below(t.base, cfg.v_grid[g]);
      out.phi_nonbase(row, g) = fraction_below(t.nonbase, cfg.v_grid[g]);
    }
  });
  out.points.resize(cfg.v_grid.size());
  for (Eigen::Index g = 0; g < G; ++g) {
    auto& pt = out.points[g];
    pt.v = cfg.v_grid[g];
    pt.psi_base = out.phi_base.col(g).mean();
    pt.se_base = sd_error(out.phi_base.col(g));
    pt.psi_nonbase = out.phi_nonbase.col(g).mean();
    pt.se_nonbase = sd_error(out.phi_nonbase.col(g));
  }
  return out;
}

PsiValue psi(double v, ProbeTarget which, const PriorProbeConfig& cfg, const RngStream& rng) {
  PriorProbeConfig single = cfg;
  single.v_grid = {v};
  const auto curve = psi_curve(single, rng);
  const auto& pt = curve.points.front();
  return which == ProbeTarget::Base ? PsiValue{pt.psi_base, pt.se_base}
                                    : PsiValue{pt.psi_nonbase, pt.se_nonbase};
}

}  // namespace smnp
