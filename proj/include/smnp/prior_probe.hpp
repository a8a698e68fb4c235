#pragma once

// Prior asymmetry of the base-category MNP at p = 3. With category 0 as the
// base, phi_base(v) is the probability that the base is chosen when it has
// structural utility v over the other two; phi_nonbase(v) is the same for
// category 1. psi averages phi over the trace-restricted prior on Sigma*.

#include "smnp/rng.hpp"

#include <Eigen/Dense>

#include <vector>

namespace smnp {

enum class ProbeTarget { Base, NonBase };

struct PriorProbeConfig {
  double nu = 2.0;
  Eigen::MatrixXd S = default_probe_scale();
  std::vector<double> v_grid = default_v_grid();
  int n_sigma_draws = 10000;
  int n_eps_draws = 10000;

  /// 0.5 J J' + 0.5 I in dimension 2.
  static Eigen::MatrixXd default_probe_scale();
  /// 0, 0.1, ..., 3.
  static std::vector<double> default_v_grid();
  void validate() const;
};

/// Monte Carlo estimate of phi(v) for a fixed 2 x 2 Sigma*.
double phi(double v, const Eigen::MatrixXd& sigma_star, ProbeTarget which, int n_eps, RngStream& rng);

/// Thresholds t such that the target is chosen iff v > t for one error draw
/// e ~ normal(0, Sigma*): max(e1, e2) for the base, max(-e1, e2 - e1) for
/// category 1. phi(v) is the fraction of thresholds below v.
struct ProbeThresholds {
  std::vector<double> base;
  std::vector<double> nonbase;  // both sorted ascending
};
ProbeThresholds probe_thresholds(const Eigen::MatrixXd& sigma_star, int n_eps, RngStream& rng);
double fraction_below(const std::vector<double>& sorted, double v);

struct PsiPoint {
  double v = 0.0;
  double psi_base = 0.0;
  double se_base = 0.0;
  double psi_nonbase = 0.0;
  double se_nonbase = 0.0;
};

struct PsiCurve {
  std::vector<PsiPoint> points;
  /// n_sigma_draws x grid size, per Sigma* draw.
  Eigen::MatrixXd phi_base;
  Eigen::MatrixXd phi_nonbase;
};

/// psi over cfg.v_grid. Both targets and all grid values share the same
/// Sigma* and error draws; Sigma* draw s uses rng.split(s).
PsiCurve psi_curve(const PriorProbeConfig& cfg, const RngStream& rng);

struct PsiValue {
  double value = 0.0;
  double se = 0.0;
};
/// psi at a single v.
PsiValue psi(double v, ProbeTarget which, const PriorProbeConfig& cfg, const RngStream& rng);

}  // namespace smnp
