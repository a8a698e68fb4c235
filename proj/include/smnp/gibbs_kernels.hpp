#pragma once

// Conditional draws shared by the symmetric and the base-category samplers.
// Both chains run on the working-parameter scale: utilities W~ = alpha W,
// coefficients beta~ = alpha beta, and Sigma~ = alpha^2 Sigma with
// tr(Sigma) = p - 1 and Sigma~ ~ inverse-Wishart(nu, S) a priori.

#include "smnp/rng.hpp"

#include <Eigen/Dense>

#include <span>

namespace smnp {

/// beta~ ~ normal(P^{-1} score, alpha2 P^{-1}) with P = data_precision + A^{-1}.
/// data_precision = sum_i Z_i' Sigma^{-1} Z_i and score = sum_i Z_i' Sigma^{-1} w_i.
Eigen::VectorXd draw_coefficients(const Eigen::MatrixXd& data_precision,
                                  const Eigen::VectorXd& score, const Eigen::MatrixXd& prior_precision,
                                  double alpha2, RngStream& rng);

/// One candidate parametrization for the scale draw.
///   M: S + sum of residual cross-products in that parametrization
///   q: beta~' A^{-1} beta~ for that parametrization's reduced coefficients
struct ScaleCandidate {
  Eigen::MatrixXd M;
  double q = 0.0;
};

struct ScaleDraw {
  int index = 0;          // chosen candidate
  Eigen::MatrixXd sigma;  // trace equal to the dimension
  double alpha2 = 1.0;
  int proposals = 0;      // rejection-sampler proposals used
  bool fallback = false;  // Metropolis-Hastings steps replaced the exact draw
};

/// The chain's current (candidate, Sigma), needed only by the fallback.
struct ScaleState {
  int index = 0;
  Eigen::MatrixXd sigma;  // trace equal to the dimension
};

enum class ScaleUpdate {
  // Exact joint draw of (candidate, Sigma~) given beta~ and W~, including the
  // dependence of the coefficient prior normal(0, alpha2 A) on alpha.
  Exact,
  // Multinomial candidate weights |M|^{-df/2} and Sigma~ ~ IW(df, M), with
  // alpha2 = tr(Sigma~)/d. Omits the coefficient-prior factor; kept for
  // comparison only.
  Uncorrected,
};

/// Joint draw of (candidate, Sigma, alpha2) given coefficients and utilities.
/// `df` is n + nu, `n_coef` the length of beta~. Under the exact update the
/// target is proportional to
///   |M_c|^{-df/2}-weighted IW(Sigma~; df, M_c)
///   x (alpha2)^{-n_coef/2} exp(-q_c / (2 alpha2)),   alpha2 = tr(Sigma~)/d,
/// sampled by rejection with the uncorrected draw as proposal, followed by
/// alpha2 | Sigma from its inverse-gamma conditional. When q_c is far out
/// in the proposal's tail the rejection budget can run out; with `current`
/// given, the draw then falls back to independence Metropolis-Hastings
/// steps from the current state, otherwise it throws NumericalError.
ScaleDraw draw_scale(std::span<const ScaleCandidate> candidates, double df, int n_coef,
                     RngStream& rng, ScaleUpdate mode = ScaleUpdate::Exact,
                     const ScaleState* current = nullptr);

/// -(df/2) log|M|: the candidate weight of the uncorrected update and of the
/// exact update's proposal. Throws NumericalError if M is not SPD.
double uncorrected_log_weight(const Eigen::MatrixXd& M, double df);

/// Conditional mean offset and sd for coordinate r of a normal vector with
/// precision H / alpha2, given the other coordinates.
struct SiteConditional {
  Eigen::MatrixXd regress;  // regress(r, l) = H(r, l) / H(r, r), zero on the diagonal
  Eigen::VectorXd sd;       // sqrt(alpha2 / H(r, r))

  SiteConditional(const Eigen::MatrixXd& sigma, double alpha2);

  double mean(int r, const Eigen::VectorXd& w, const Eigen::VectorXd& mu) const {
    return mu(r) - regress.row(r).dot(w - mu);
  }
};

}  // namespace smnp
