#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's samplers.

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace oracle {

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// One-sample KS p-value against a continuous cdf.
double ks_pvalue(std::vector<double> x, const std::function<double(double)>& cdf);
/// Two-sample KS p-value.
double ks_pvalue(std::vector<double> x, std::vector<double> y);

/// Pearson chi-square goodness of fit p-value against expected probabilities.
double chisq_pvalue(const std::vector<double>& counts, const std::vector<double>& probs);

double normal_cdf(double x);
double normal_pdf(double x);

/// Mean and variance of normal(mu, sd^2) truncated to (lo, hi) by adaptive
/// Gauss-Kronrod quadrature of the density.
struct Moments {
  double mean;
  double var;
};
Moments truncnorm_moments(double mu, double sd, double lo, double hi);

/// Pr(a1 < X1 < b1, a2 < X2 < b2) for a bivariate normal with mean m and
/// covariance S, by integrating the conditional cdf of X2 against X1.
double bvn_rect(const Eigen::Vector2d& m, const Eigen::Matrix2d& S, double a1, double b1, double a2,
                double b2);

/// Batch-means standard error of the sample mean.
double batch_se(const std::vector<double>& x, int batches = 50);
double mean(const std::vector<double>& x);
double iid_se(const std::vector<double>& x);

/// Sample covariance-free dispersion for quick checks.
double sample_sd(const std::vector<double>& x);

}  // namespace oracle
