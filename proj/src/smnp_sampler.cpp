#include "smnp/smnp_sampler.hpp"

#include "smnp/distributions.hpp"
#include "smnp/errors.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace smnp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_det_spd(const MatrixXd& m) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError("matrix is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// Initial utilities: centered standard normals with the maximum swapped to y.
MatrixXd initial_utilities(const std::vector<int>& y, int p, RngStream& rng) {
  MatrixXd w(static_cast<Eigen::Index>(y.size()), p);
  for (std::size_t i = 0; i < y.size(); ++i) {
    VectorXd z(p);
    for (int j = 0; j < p; ++j) z(j) = rng.normal();
    z.array() -= z.mean();
    Eigen::Index top;
    z.maxCoeff(&top);
    std::swap(z(top), z(y[i]));
    w.row(static_cast<Eigen::Index>(i)) = z.transpose();
  }
  return w;
}

}  // namespace

SmnpSampler::SmnpSampler(const ChoiceDataset& data, const Hyperparameters& hyper,
                         ScaleUpdate scale_update)
    : raw_(data), scale_update_(scale_update) {
  raw_.validate();
  data_ = center_alternatives(raw_);
  shape_ = data_.shape();
  hyper.validate(shape_.p, shape_.reduced_size());
  nu_ = hyper.nu_for(shape_.p);
  S_ = hyper.scale_for(shape_.p);
  A_ = hyper.prior_cov(shape_.reduced_size());
  A_inv_ = A_.llt().solve(MatrixXd::Identity(A_.rows(), A_.cols()));
  log_det_A_ = log_det_spd(A_);

  const auto n = data_.n();
  designs_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    designs_.push_back(build_design(data_.x_d.row(static_cast<Eigen::Index>(i)).transpose(), data_.x_a[i]));
  }
  reduced_.assign(shape_.p, {});
  for (int b = 0; b < shape_.p; ++b) {
    reduced_[b].reserve(n);
    for (std::size_t i = 0; i < n; ++i) reduced_[b].push_back(reduce_design(designs_[i], shape_, b));
  }
}

void SmnpSampler::set_choices(std::vector<int> y) {
  if (y.size() != data_.n()) throw DimensionError("set_choices: wrong number of agents");
  for (int v : y) {
    if (v < 0 || v >= shape_.p) throw DomainError("set_choices: category out of range");
  }
  raw_.y = y;
  data_.y = std::move(y);
}

SmnpState SmnpSampler::init_state(RngStream& rng) const {
  SmnpState state;
  const int p = shape_.p;
  state.w_tilde = initial_utilities(data_.y, p, rng);
  state.b = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
  state.sigma_b = S_ * ((p - 1) / S_.trace());
  state.alpha2 = 1.0;
  state.beta_tilde = VectorXd::Zero(n_coef());
  return state;
}

void SmnpSampler::step_utilities(SmnpState& state, RngStream& rng) const {
  const int p = shape_.p;
  const int b = state.b;
  const SiteConditional cond(state.sigma_b, state.alpha2);
  const VectorXd beta_full = expand_beta(state.beta_tilde, shape_, b);

  VectorXd mu(p - 1);
  VectorXd w(p - 1);
  for (std::size_t i = 0; i < data_.n(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const VectorXd mean_full = designs_[i] * beta_full;
    const int choice = data_.y[i];
    for (int j = 0, r = 0; j < p; ++j) {
      if (j == b) continue;
      mu(r) = mean_full(j);
      w(r++) = state.w_tilde(row, j);
    }
    // Category j sits at reduced position j - (j > b).
    for (int j = 0, r = 0; j < p; ++j) {
      if (j == b) continue;
      // Sum and max over k not in {j, b}; empty max is -inf.
      double others_sum = 0.0;
      double others_max = -kInf;
      for (int k = 0, rk = 0; k < p; ++k) {
        if (k == b) continue;
        if (k != j) {
          others_sum += w(rk);
          others_max = std::max(others_max, w(rk));
        }
        ++rk;
      }
      double lower = -kInf;
      double upper = kInf;
      if (choice == j) {
        lower = std::max(-0.5 * others_sum, others_max);
      } else if (choice != b) {
        const double w_chosen = w(choice - (choice > b ? 1 : 0));
        upper = w_chosen;
        lower = -others_sum - w_chosen;
      } else {
        upper = std::min(-0.5 * others_sum, -(others_max + others_sum));
      }
      try {
        w(r) = sample_truncnorm(cond.mean(r, w, mu), cond.sd(r), lower, upper, rng);
      } catch (const std::exception& e) {
        throw NumericalError("utility update failed for agent " + std::to_string(i) +
                             ", category " + std::to_string(j) + ": " + e.what());
      }
      ++r;
    }
    double total = 0.0;
    for (int j = 0, r = 0; j < p; ++j) {
      if (j == b) continue;
      state.w_tilde(row, j) = w(r);
      total += w(r++);
    }
    state.w_tilde(row, b) = -total;
#ifndef NDEBUG
    const ArgmaxResult top = argmax_lowest(state.w_tilde.row(row).transpose());
    if (top.index != choice) {
      throw NumericalError("utility sweep broke the observation rule for agent " + std::to_string(i));
    }
#endif
  }
}

void SmnpSampler::step_beta(SmnpState& state, RngStream& rng) const {
  const int b = state.b;
  const int K = n_coef();
  const MatrixXd H = state.sigma_b.llt().solve(MatrixXd::Identity(shape_.p - 1, shape_.p - 1));
  MatrixXd precision = MatrixXd::Zero(K, K);
  VectorXd score = VectorXd::Zero(K);
  VectorXd w(shape_.p - 1);
  for (std::size_t i = 0; i < data_.n(); ++i) {
    const auto& Z = reduced_[b][i];
    const MatrixXd ZtH = Z.transpose() * H;
    precision.noalias() += ZtH * Z;
    w = drop_entry(state.w_tilde.row(static_cast<Eigen::Index>(i)).transpose(), b);
    score.noalias() += ZtH * w;
  }
  state.beta_tilde = draw_coefficients(precision, score, A_inv_, state.alpha2, rng);
}

std::vector<ScaleCandidate> SmnpSampler::scale_candidates(const SmnpState& state) const {
  const int p = shape_.p;
  const VectorXd beta_full = expand_beta(state.beta_tilde, shape_, state.b);
  // Residual cross-products in full coordinates; dropping row and column b'
  // gives the reduced cross-products for candidate b'.
  MatrixXd cross = MatrixXd::Zero(p, p);
  for (std::size_t i = 0; i < data_.n(); ++i) {
    const VectorXd e = state.w_tilde.row(static_cast<Eigen::Index>(i)).transpose() - designs_[i] * beta_full;
    cross.noalias() += e * e.transpose();
  }
  std::vector<ScaleCandidate> candidates(p);
  for (int c = 0; c < p; ++c) {
    candidates[c].M = S_ + drop_row_col(cross, c);
    const VectorXd beta_c = reduce_beta(beta_full, shape_, c);
    candidates[c].q = beta_c.dot(A_inv_ * beta_c);
  }
  return candidates;
}

ScaleDraw SmnpSampler::step_b_sigma_alpha(SmnpState& state, RngStream& rng) const {
  const VectorXd beta_full = expand_beta(state.beta_tilde, shape_, state.b);
  const auto candidates = scale_candidates(state);
  const double df = static_cast<double>(data_.n()) + nu_;
  const ScaleState current{state.b, state.sigma_b};
  ScaleDraw draw = draw_scale(candidates, df, n_coef(), rng, scale_update_, &current);
  state.b = draw.index;
  state.sigma_b = std::move(draw.sigma);
  state.alpha2 = draw.alpha2;
  state.beta_tilde = reduce_beta(beta_full, shape_, state.b);
  return draw;
}

void SmnpSampler::sweep(SmnpState& state, RngStream& rng) const {
  step_utilities(state, rng);
  step_beta(state, rng);
  step_b_sigma_alpha(state, rng);
}

double SmnpSampler::log_kernel(const SmnpState& state) const {
  const int d = shape_.p - 1;
  const int K = n_coef();
  const MatrixXd sigma_tilde = state.alpha2 * state.sigma_b;
  Eigen::LLT<MatrixXd> llt(sigma_tilde);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const VectorXd beta_full = expand_beta(state.beta_tilde, shape_, state.b);
  double quad = 0.0;
  for (std::size_t i = 0; i < data_.n(); ++i) {
    const VectorXd e = drop_entry(
        state.w_tilde.row(static_cast<Eigen::Index>(i)).transpose() - designs_[i] * beta_full, state.b);
    quad += e.dot(llt.solve(e));
  }
  const double n = static_cast<double>(data_.n());
  const double log_lik = -0.5 * n * d * std::log(2.0 * M_PI) - 0.5 * n * log_det - 0.5 * quad;
  const double log_beta = -0.5 * K * std::log(2.0 * M_PI * state.alpha2) - 0.5 * log_det_A_ -
                          0.5 * state.beta_tilde.dot(A_inv_ * state.beta_tilde) / state.alpha2;
  return log_lik + log_beta + log_invwishart_pdf(sigma_tilde, nu_, S_) - std::log(shape_.p);
}

void SmnpSampler::check_state(const SmnpState& state, double tol) const {
  const int p = shape_.p;
  if (std::abs(state.sigma_b.trace() - (p - 1)) > 1e-9 * p) {
    throw NumericalError("state: tr(sigma_b) != p - 1");
  }
  if (!(state.alpha2 > 0.0)) throw NumericalError("state: alpha2 must be positive");
  for (std::size_t i = 0; i < data_.n(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double scale = std::max(1.0, state.w_tilde.row(row).cwiseAbs().maxCoeff());
    if (std::abs(state.w_tilde.row(row).sum()) > tol * scale) {
      throw NumericalError("state: utilities of agent " + std::to_string(i) + " do not sum to zero");
    }
    if (argmax_lowest(state.w_tilde.row(row).transpose()).index != data_.y[i]) {
      throw NumericalError("state: utilities of agent " + std::to_string(i) + " disagree with the choice");
    }
  }
}

DrawStore run_smnp(const ChoiceDataset& data, const Hyperparameters& hyper) {
  const SmnpSampler sampler(data, hyper);
  return run_smnp(sampler, hyper);
}

DrawStore run_smnp(const SmnpSampler& sampler, const Hyperparameters& chain) {
  if (chain.iters < 1 || chain.burn < 0 || chain.burn >= chain.iters || chain.thin < 1) {
    throw DomainError("chain controls need iters > burn >= 0 and thin >= 1");
  }
  const auto started = std::chrono::steady_clock::now();
  const auto& shape = sampler.shape();
  DrawStore store = make_store(ModelKind::Symmetric, sampler.raw_data(), chain);
  store.nu = sampler.nu();
  store.S = sampler.scale();
  store.A = sampler.prior_cov();
  const int keep = chain.retained();
  store.beta.resize(keep, shape.full_size());
  store.b.reserve(keep);

  RngStream rng(chain.seed, 0);
  SmnpState state = sampler.init_state(rng);
  int kept = 0;
  for (int it = 0; it < chain.iters && kept < keep; ++it) {
    sampler.sweep(state, rng);
    if (it < chain.burn || (it - chain.burn + 1) % chain.thin != 0) continue;
    const double alpha = std::sqrt(state.alpha2);
    store.b.push_back(state.b);
    store.alpha2.push_back(state.alpha2);
    store.beta.row(kept) = (expand_beta(state.beta_tilde, shape, state.b) / alpha).transpose();
    const MatrixXd R = construct_R(state.sigma_b, state.b);
    store.sigma.push_back(R * R.transpose());
    store.log_kernel.push_back(sampler.log_kernel(state));
    if (chain.store_utilities) store.utilities.push_back(state.w_tilde / alpha);
    ++kept;
  }
  store.chain.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return store;
}

}  // namespace smnp
