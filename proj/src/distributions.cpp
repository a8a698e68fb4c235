#include "smnp/distributions.hpp"

#include "smnp/errors.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace smnp {

namespace {

constexpr double kTailSwitch = 4.0;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Upper tail probability Pr(Z > x).
double upper_tail(double x) { return 0.5 * std::erfc(x / kSqrt2); }

// Robert (1995): standard normal on [a, b] with a >= kTailSwitch, via a
// truncated exponential proposal with the optimal rate.
double tail_rejection(double a, double b, RngStream& rng) {
  const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
  const double width = b - a;
  const double span = std::isinf(width) ? 1.0 : -std::expm1(-rate * width);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double z = a - std::log1p(-rng.uniform() * span) / rate;
    const double diff = z - rate;
    if (z > a && z < b && std::log(rng.uniform()) < -0.5 * diff * diff) return z;
  }
  throw NumericalError("truncated normal tail sampler did not accept");
}

// Standard normal on (a, b), a < b.
double standard_truncnorm(double a, double b, RngStream& rng) {
  if (a >= kTailSwitch) return tail_rejection(a, b, rng);
  if (b <= -kTailSwitch) return -tail_rejection(-b, -a, rng);
  if (b - a < 1e-9) {
    // The density is flat to first order on such a short interval.
    return a + (b - a) * rng.uniform();
  }
  double x;
  if (a >= 0.0) {
    const double pa = upper_tail(a);
    const double pb = upper_tail(b);
    const double u = pb + (pa - pb) * rng.uniform();
    x = kSqrt2 * boost::math::erfc_inv(2.0 * u);
  } else if (b <= 0.0) {
    const double pa = upper_tail(-a);
    const double pb = upper_tail(-b);
    const double u = pb + (pa - pb) * rng.uniform();
    x = -kSqrt2 * boost::math::erfc_inv(2.0 * u);
  } else {
    const double pa = upper_tail(-a);  // Phi(a)
    const double pb = upper_tail(-b);  // Phi(b)
    const double u = pa + (pb - pa) * rng.uniform();
    x = -kSqrt2 * boost::math::erfc_inv(2.0 * u);
  }
  return x;
}

}  // namespace

double sample_truncnorm(double mu, double sd, double lower, double upper, RngStream& rng) {
  if (!(sd > 0.0) || !std::isfinite(sd)) throw DomainError("truncnorm: sd must be positive");
  if (!(lower < upper)) {
    throw DomainError("truncnorm: empty interval (" + std::to_string(lower) + ", " +
                      std::to_string(upper) + ")");
  }
  if (!std::isfinite(mu)) throw DomainError("truncnorm: non-finite mean");
  if (lower == -kInf && upper == kInf) return mu + sd * rng.normal();

  const double a = (lower - mu) / sd;
  const double b = (upper - mu) / sd;
  double x = mu + sd * standard_truncnorm(a, b, rng);
  // Rounding in the back-transform can land on a bound; nudge inside.
  if (x <= lower) x = std::nextafter(lower, kInf);
  if (x >= upper) x = std::nextafter(upper, -kInf);
  if (!(x > lower && x < upper)) {
    throw NumericalError("truncnorm: interval too narrow to sample strictly inside");
  }
  return x;
}

Eigen::VectorXd sample_mvnorm(const Eigen::VectorXd& mu, const Eigen::MatrixXd& chol_factor,
                              RngStream& rng) {
  if (chol_factor.rows() != mu.size() || chol_factor.cols() != mu.size()) {
    throw DimensionError("sample_mvnorm: factor must be d x d");
  }
  Eigen::VectorXd z(mu.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
  return mu + chol_factor.triangularView<Eigen::Lower>() * z;
}

Eigen::MatrixXd sample_invwishart(double nu, const Eigen::MatrixXd& S, RngStream& rng) {
  const auto d = S.rows();
  if (d < 1 || S.cols() != d) throw DimensionError("sample_invwishart: S must be square");
  if (!(nu > d - 1)) {
    throw DomainError("sample_invwishart: nu = " + std::to_string(nu) + " must exceed d - 1");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw DomainError("sample_invwishart: S is not SPD");

  // Bartlett factor B of a Wishart(nu, I) draw B B'.
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    B(i, i) = std::sqrt(rng.chisq(nu - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) B(i, j) = rng.normal();
  }
  // With S = C C', Sigma^{-1} = C^{-T} B B' C^{-1} ~ Wishart(nu, S^{-1}),
  // hence Sigma = U U' with U = C B^{-T}.
  const Eigen::MatrixXd C = llt.matrixL();
  Eigen::MatrixXd U = C;
  B.triangularView<Eigen::Lower>().transpose().solveInPlace<Eigen::OnTheRight>(U);
  Eigen::MatrixXd sigma = U * U.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

double log_invwishart_pdf(const Eigen::MatrixXd& sigma, double nu, const Eigen::MatrixXd& S) {
  const auto d = S.rows();
  const double dim = static_cast<double>(d);
  Eigen::LLT<Eigen::MatrixXd> llt_sigma(sigma);
  Eigen::LLT<Eigen::MatrixXd> llt_s(S);
  if (llt_sigma.info() != Eigen::Success || llt_s.info() != Eigen::Success) {
    throw NumericalError("log_invwishart_pdf: matrices must be SPD");
  }
  const double logdet_sigma = 2.0 * llt_sigma.matrixLLT().diagonal().array().log().sum();
  const double logdet_s = 2.0 * llt_s.matrixLLT().diagonal().array().log().sum();
  double log_mv_gamma = 0.25 * dim * (dim - 1.0) * std::log(M_PI);
  for (Eigen::Index j = 0; j < d; ++j) log_mv_gamma += std::lgamma(0.5 * (nu - static_cast<double>(j)));
  const double tr = llt_sigma.solve(S).trace();
  return 0.5 * nu * logdet_s - 0.5 * nu * dim * std::log(2.0) - log_mv_gamma -
         0.5 * (nu + dim + 1.0) * logdet_sigma - 0.5 * tr;
}

TraceRestrictedDraw sample_trace_restricted(double nu, const Eigen::MatrixXd& S,
                                            double target_trace, RngStream& rng) {
  if (!(target_trace > 0.0)) throw DomainError("trace target must be positive");
  const Eigen::MatrixXd raw = sample_invwishart(nu, S, rng);
  TraceRestrictedDraw out;
  out.alpha2 = raw.trace() / target_trace;
  out.sigma = raw / out.alpha2;
  return out;
}

}  // namespace smnp
