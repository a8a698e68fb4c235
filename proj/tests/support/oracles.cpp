#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double integrate(const std::function<double(double)>& f, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-13);
}
}  // namespace

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  const double rn = std::sqrt(n);
  return kolmogorov_q((rn + 0.12 + 0.11 / rn) * d);
}

double ks_pvalue(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  const double ne = std::sqrt(n * m / (n + m));
  return kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
}

double chisq_pvalue(const std::vector<double>& counts, const std::vector<double>& probs) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  double stat = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double e = total * probs[k];
    stat += (counts[k] - e) * (counts[k] - e) / e;
  }
  const double df = static_cast<double>(counts.size()) - 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * stat);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

Moments truncnorm_moments(double mu, double sd, double lo, double hi) {
  const double a = (lo - mu) / sd;
  const double b = (hi - mu) / sd;
  // Infinite ends are cut 40 sd beyond the nearest finite point.
  const double lo_z = std::isinf(a) ? std::min(b, 0.0) - 40.0 : a;
  const double hi_z = std::isinf(b) ? std::max(a, 0.0) + 40.0 : b;
  // Factor out the peak of the density on the interval for tail stability.
  const double peak = std::clamp(0.0, lo_z, hi_z);
  auto dens = [&](double z) { return std::exp(-0.5 * (z * z - peak * peak)); };
  const double z0 = integrate(dens, lo_z, hi_z);
  const double z1 = integrate([&](double z) { return z * dens(z); }, lo_z, hi_z) / z0;
  const double z2 = integrate([&](double z) { return (z - z1) * (z - z1) * dens(z); }, lo_z, hi_z) / z0;
  return {mu + sd * z1, sd * sd * z2};
}

double bvn_rect(const Eigen::Vector2d& m, const Eigen::Matrix2d& S, double a1, double b1, double a2,
                double b2) {
  const double s1 = std::sqrt(S(0, 0));
  const double slope = S(0, 1) / S(0, 0);
  const double cs = std::sqrt(S(1, 1) - S(0, 1) * S(0, 1) / S(0, 0));
  const double lo = std::max(a1, m(0) - 12.0 * s1);
  const double hi = std::min(b1, m(0) + 12.0 * s1);
  if (!(lo < hi)) return 0.0;
  auto f = [&](double x) {
    const double cm = m(1) + slope * (x - m(0));
    const double upper = b2 == kInf ? 1.0 : normal_cdf((b2 - cm) / cs);
    const double lower = a2 == -kInf ? 0.0 : normal_cdf((a2 - cm) / cs);
    return normal_pdf((x - m(0)) / s1) / s1 * (upper - lower);
  };
  return integrate(f, lo, hi);
}

double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(const std::vector<double>& x) {
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double iid_se(const std::vector<double>& x) { return sample_sd(x) / std::sqrt(static_cast<double>(x.size())); }

double batch_se(const std::vector<double>& x, int batches) {
  const std::size_t len = x.size() / batches;
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t k = 0; k < len; ++k) s += x[b * len + k];
    means.push_back(s / static_cast<double>(len));
  }
  return sample_sd(means) / std::sqrt(static_cast<double>(batches));
}

}  // namespace oracle
