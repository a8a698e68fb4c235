#include <doctest.h>

#include "oracles.hpp"
#include "smnp/errors.hpp"
#include "smnp/prior_probe.hpp"

#include <limits>

using namespace smnp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double phi_oracle(double v, const Eigen::Matrix2d& S, ProbeTarget which) {
  if (which == ProbeTarget::Base) return oracle::bvn_rect({-v, -v}, S, -kInf, 0.0, -kInf, 0.0);
  // (X1, X1 - X2) with X ~ normal((v, 0), S); both must be positive.
  Eigen::Matrix2d T;
  T << 1, 0, 1, -1;
  return oracle::bvn_rect({v, v}, T * S * T.transpose(), 0.0, kInf, 0.0, kInf);
}

}  // namespace

TEST_CASE("phi examples") {
  RngStream rng(1);
  const int n = 1000000;
  Eigen::MatrixXd ex(2, 2);
  ex << 1, 0.5, 0.5, 1;
  const double se3 = std::sqrt(0.25 / n);
  CHECK(std::abs(phi(0.0, ex, ProbeTarget::Base, n, rng) - 1.0 / 3) < 4 * se3);
  CHECK(std::abs(phi(0.0, Eigen::MatrixXd::Identity(2, 2), ProbeTarget::Base, n, rng) - 0.25) < 4 * se3);
  for (auto which : {ProbeTarget::Base, ProbeTarget::NonBase}) {
    CHECK(std::abs(phi(2.0, ex, which, n, rng) - phi_oracle(2.0, ex, which)) < 0.002);
  }
}

TEST_CASE("phi against quadrature on a grid") {
  RngStream rng(2);
  RngStream pick(3);
  const int n = 200000;
  for (int k = 0; k < 20; ++k) {
    const double v = 3.0 * pick.uniform();
    const double s11 = 0.2 + 1.6 * pick.uniform();
    const double s22 = 2.0 - s11;
    const double r = -0.9 + 1.8 * pick.uniform();
    Eigen::Matrix2d S;
    S << s11, r * std::sqrt(s11 * s22), r * std::sqrt(s11 * s22), s22;
    for (auto which : {ProbeTarget::Base, ProbeTarget::NonBase}) {
      const double truth = phi_oracle(v, S, which);
      const double se = std::sqrt(std::max(truth * (1 - truth), 1e-6) / n);
      INFO("v=" << v << " S=" << S(0, 0) << "," << S(0, 1) << "," << S(1, 1));
      CHECK(std::abs(phi(v, S, which, n, rng) - truth) < 3.0 * se);
    }
  }
}

TEST_CASE("thresholds") {
  RngStream rng(4);
  const auto th = probe_thresholds(Eigen::MatrixXd::Identity(2, 2), 1000, rng);
  CHECK(th.base.size() == 1000);
  CHECK(std::is_sorted(th.base.begin(), th.base.end()));
  CHECK(std::is_sorted(th.nonbase.begin(), th.nonbase.end()));
  const std::vector<double> sorted{-1.0, 0.0, 0.5, 2.0};
  CHECK(fraction_below(sorted, -2.0) == 0.0);
  CHECK(fraction_below(sorted, 0.25) == 0.5);
  CHECK(fraction_below(sorted, 3.0) == 1.0);
}

TEST_CASE("psi curve") {
  PriorProbeConfig cfg;
  cfg.n_sigma_draws = 2000;
  cfg.n_eps_draws = 2000;
  const RngStream rng(7);
  const PsiCurve c = psi_curve(cfg, rng);
  REQUIRE(c.points.size() == 31);
  CHECK(c.phi_base.rows() == 2000);
  CHECK(c.phi_base.cols() == 31);
  double gap = 0.0;
  for (const auto& pt : c.points) {
    CHECK(pt.psi_base >= 0.0);
    CHECK(pt.psi_base <= 1.0);
    CHECK(pt.psi_nonbase >= 0.0);
    CHECK(pt.psi_nonbase <= 1.0);
    CHECK(pt.se_base > 0.0);
    CHECK(pt.se_nonbase > 0.0);
    gap = std::max(gap, std::abs(pt.psi_base - pt.psi_nonbase));
  }
  CHECK(gap < 0.02);
  // Both curves increase with the structural advantage v.
  CHECK(c.points.back().psi_base > c.points.front().psi_base);

  const int at1 = 10;
  REQUIRE(c.points[at1].v == doctest::Approx(1.0));
  auto sd = [](const Eigen::VectorXd& x) { return std::sqrt((x.array() - x.mean()).square().mean()); };
  CHECK(sd(c.phi_nonbase.col(at1)) > sd(c.phi_base.col(at1)));

  const PsiValue single = psi(1.0, ProbeTarget::NonBase, cfg, rng);
  CHECK(single.value == doctest::Approx(c.points[at1].psi_nonbase).epsilon(1e-12));
  CHECK(single.se == doctest::Approx(c.points[at1].se_nonbase).epsilon(1e-12));
}

TEST_CASE("frozen prior sd of phi at v = 1") {
  // Regression baselines from this implementation (2000 x 2000 draws, seed 7).
  PriorProbeConfig cfg;
  cfg.n_sigma_draws = 2000;
  cfg.n_eps_draws = 2000;
  cfg.v_grid = {1.0};
  const PsiCurve c = psi_curve(cfg, RngStream(7));
  auto sd = [](const Eigen::VectorXd& x) { return std::sqrt((x.array() - x.mean()).square().mean()); };
  CHECK(sd(c.phi_base.col(0)) == doctest::Approx(0.034781040157498153).epsilon(1e-9));
  CHECK(sd(c.phi_nonbase.col(0)) == doctest::Approx(0.055539910818707662).epsilon(1e-9));
}

TEST_CASE("psi is continuous in v") {
  PriorProbeConfig cfg;
  cfg.n_sigma_draws = 500;
  cfg.n_eps_draws = 2000;
  cfg.v_grid.clear();
  for (int k = 0; k <= 50; ++k) cfg.v_grid.push_back(0.5 + 0.01 * k);
  const PsiCurve c = psi_curve(cfg, RngStream(9));
  for (std::size_t g = 1; g < c.points.size(); ++g) {
    CHECK(std::abs(c.points[g].psi_base - c.points[g - 1].psi_base) < 5 * c.points[g].se_base);
    CHECK(std::abs(c.points[g].psi_nonbase - c.points[g - 1].psi_nonbase) < 5 * c.points[g].se_nonbase);
  }
}

TEST_CASE("config validation") {
  PriorProbeConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.S.isApprox((Eigen::MatrixXd(2, 2) << 1, 0.5, 0.5, 1).finished()));
  cfg.n_eps_draws = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = PriorProbeConfig{};
  cfg.S = (Eigen::MatrixXd(2, 2) << 1, 2, 2, 1).finished();
  CHECK_THROWS(cfg.validate());
  cfg = PriorProbeConfig{};
  cfg.S = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS(cfg.validate());
}
