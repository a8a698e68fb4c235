#pragma once

#include "smnp/rng.hpp"

#include <Eigen/Dense>

namespace smnp {

/// Draw from normal(mu, sd^2) restricted to the open interval (lower, upper).
/// Either bound may be infinite. Uses inverse-CDF sampling unless the
/// standardized interval lies beyond 4 sd on one side, where Robert's
/// exponential rejection sampler takes over.
double sample_truncnorm(double mu, double sd, double lower, double upper, RngStream& rng);

/// mu + L z with z iid standard normal; L is lower triangular.
Eigen::VectorXd sample_mvnorm(const Eigen::VectorXd& mu, const Eigen::MatrixXd& chol_factor,
                              RngStream& rng);

/// Inverse-Wishart draw with density proportional to
///   |Sigma|^{-(nu + d + 1)/2} exp(-tr(S Sigma^{-1}) / 2),
/// so E[Sigma] = S / (nu - d - 1). Requires nu > d - 1 and S SPD.
Eigen::MatrixXd sample_invwishart(double nu, const Eigen::MatrixXd& S, RngStream& rng);

/// Log density of the inverse-Wishart above, normalizing constant included.
double log_invwishart_pdf(const Eigen::MatrixXd& sigma, double nu, const Eigen::MatrixXd& S);

struct TraceRestrictedDraw {
  Eigen::MatrixXd sigma;  // trace equal to the target
  double alpha2 = 1.0;    // tr(unconstrained draw) / target
};

/// Trace-restricted covariance prior via the working-parameter construction:
/// draw Sigma~ from inverse-Wishart(nu, S), then rescale to the target trace.
TraceRestrictedDraw sample_trace_restricted(double nu, const Eigen::MatrixXd& S,
                                            double target_trace, RngStream& rng);

}  // namespace smnp
