#include "smnp/mnp_sampler.hpp"

#include "smnp/distributions.hpp"
#include "smnp/errors.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace smnp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int category_of(int r, int base) { return r + (r >= base ? 1 : 0); }
int coordinate_of(int j, int base) { return j - (j > base ? 1 : 0); }

double log_det_spd(const MatrixXd& m) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError("matrix is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

std::vector<MatrixXd> transform_to_base(const ChoiceDataset& data, int base) {
  const DesignShape shape = data.shape();
  if (base < 0 || base >= shape.p) throw DomainError("base category out of range");
  const int d = shape.p - 1;
  std::vector<MatrixXd> out;
  out.reserve(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    MatrixXd X = MatrixXd::Zero(d, shape.reduced_size());
    X.leftCols(d).setIdentity();
    for (int m = 0; m < shape.k_d; ++m) {
      X.block(0, d * (m + 1), d, d).diagonal().setConstant(data.x_d(static_cast<Eigen::Index>(i), m));
    }
    const MatrixXd& xa = data.x_a[i];
    for (int r = 0; r < d; ++r) {
      X.row(r).tail(shape.k_a) = xa.row(category_of(r, base)) - xa.row(base);
    }
    out.push_back(std::move(X));
  }
  return out;
}

MatrixXd sigma_star_from_full(const MatrixXd& sigma, int base) {
  const auto p = static_cast<int>(sigma.rows());
  if (sigma.cols() != p) throw DimensionError("sigma must be square");
  if (base < 0 || base >= p) throw DomainError("base category out of range");
  MatrixXd T = MatrixXd::Zero(p - 1, p);
  for (int r = 0; r < p - 1; ++r) {
    T(r, category_of(r, base)) = 1.0;
    T(r, base) = -1.0;
  }
  return T * sigma * T.transpose();
}

VectorXd insert_base_zeros(const VectorXd& reduced, const DesignShape& shape, int base) {
  if (reduced.size() != shape.reduced_size()) throw DimensionError("insert_base_zeros: wrong length");
  VectorXd full = VectorXd::Zero(shape.full_size());
  const int p = shape.p;
  for (int blk = 0; blk < shape.zero_sum_blocks(); ++blk) {
    for (int r = 0; r < p - 1; ++r) full(blk * p + category_of(r, base)) = reduced(blk * (p - 1) + r);
  }
  full.tail(shape.k_a) = reduced.tail(shape.k_a);
  return full;
}

MnpSampler::MnpSampler(const ChoiceDataset& data, const Hyperparameters& hyper, int base,
                       ScaleUpdate scale_update)
    : raw_(data), base_(base), scale_update_(scale_update) {
  raw_.validate();
  data_ = center_alternatives(raw_);
  shape_ = data_.shape();
  if (base < 0 || base >= shape_.p) throw DomainError("base category out of range");
  hyper.validate(shape_.p, shape_.reduced_size());
  nu_ = hyper.nu_for(shape_.p);
  S_ = hyper.scale_for(shape_.p);
  A_ = hyper.prior_cov(shape_.reduced_size());
  A_inv_ = A_.llt().solve(MatrixXd::Identity(A_.rows(), A_.cols()));
  log_det_A_ = log_det_spd(A_);
  designs_ = transform_to_base(data_, base_);
}

void MnpSampler::set_choices(std::vector<int> y) {
  if (y.size() != data_.n()) throw DimensionError("set_choices: wrong number of agents");
  for (int v : y) {
    if (v < 0 || v >= shape_.p) throw DomainError("set_choices: category out of range");
  }
  raw_.y = y;
  data_.y = std::move(y);
}

MnpState MnpSampler::init_state(RngStream& rng) const {
  const int p = shape_.p;
  MnpState state;
  state.w_star.resize(static_cast<Eigen::Index>(data_.n()), p - 1);
  VectorXd z(p);
  for (std::size_t i = 0; i < data_.n(); ++i) {
    for (int j = 0; j < p; ++j) z(j) = rng.normal();
    Eigen::Index top;
    z.maxCoeff(&top);
    std::swap(z(top), z(data_.y[i]));
    for (int r = 0; r < p - 1; ++r) {
      state.w_star(static_cast<Eigen::Index>(i), r) = z(category_of(r, base_)) - z(base_);
    }
  }
  state.sigma_star = S_ * ((p - 1) / S_.trace());
  state.alpha2 = 1.0;
  state.beta_tilde = VectorXd::Zero(n_coef());
  return state;
}

void MnpSampler::step_utilities(MnpState& state, RngStream& rng) const {
  const int d = shape_.p - 1;
  const SiteConditional cond(state.sigma_star, state.alpha2);
  VectorXd w(d);
  for (std::size_t i = 0; i < data_.n(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const VectorXd mu = designs_[i] * state.beta_tilde;
    w = state.w_star.row(row).transpose();
    const int choice = data_.y[i];
    const int chosen = choice == base_ ? -1 : coordinate_of(choice, base_);
    for (int r = 0; r < d; ++r) {
      double lower = -kInf;
      double upper = kInf;
      if (chosen < 0) {
        upper = 0.0;
      } else if (chosen == r) {
        lower = 0.0;
        for (int l = 0; l < d; ++l) {
          if (l != r) lower = std::max(lower, w(l));
        }
      } else {
        upper = w(chosen);
      }
      try {
        w(r) = sample_truncnorm(cond.mean(r, w, mu), cond.sd(r), lower, upper, rng);
      } catch (const std::exception& e) {
        throw NumericalError("utility update failed for agent " + std::to_string(i) + ": " + e.what());
      }
    }
    state.w_star.row(row) = w.transpose();
  }
}

void MnpSampler::step_beta(MnpState& state, RngStream& rng) const {
  const int K = n_coef();
  const int d = shape_.p - 1;
  const MatrixXd H = state.sigma_star.llt().solve(MatrixXd::Identity(d, d));
  MatrixXd precision = MatrixXd::Zero(K, K);
  VectorXd score = VectorXd::Zero(K);
  for (std::size_t i = 0; i < data_.n(); ++i) {
    const MatrixXd ZtH = designs_[i].transpose() * H;
    precision.noalias() += ZtH * designs_[i];
    score.noalias() += ZtH * state.w_star.row(static_cast<Eigen::Index>(i)).transpose();
  }
  state.beta_tilde = draw_coefficients(precision, score, A_inv_, state.alpha2, rng);
}

void MnpSampler::step_sigma_alpha(MnpState& state, RngStream& rng) const {
  ScaleCandidate cand;
  cand.M = S_;
  for (std::size_t i = 0; i < data_.n(); ++i) {
    const VectorXd e = state.w_star.row(static_cast<Eigen::Index>(i)).transpose() -
                       designs_[i] * state.beta_tilde;
    cand.M.noalias() += e * e.transpose();
  }
  cand.q = state.beta_tilde.dot(A_inv_ * state.beta_tilde);
  const double df = static_cast<double>(data_.n()) + nu_;
  const ScaleState current{0, state.sigma_star};
  ScaleDraw draw =
      draw_scale(std::span<const ScaleCandidate>(&cand, 1), df, n_coef(), rng, scale_update_, &current);
  state.sigma_star = std::move(draw.sigma);
  state.alpha2 = draw.alpha2;
}

void MnpSampler::sweep(MnpState& state, RngStream& rng) const {
  step_utilities(state, rng);
  step_beta(state, rng);
  step_sigma_alpha(state, rng);
}

double MnpSampler::log_kernel(const MnpState& state) const {
  const int d = shape_.p - 1;
  const int K = n_coef();
  const MatrixXd sigma_tilde = state.alpha2 * state.sigma_star;
  Eigen::LLT<MatrixXd> llt(sigma_tilde);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  double quad = 0.0;
  for (std::size_t i = 0; i < data_.n(); ++i) {
    const VectorXd e = state.w_star.row(static_cast<Eigen::Index>(i)).transpose() -
                       designs_[i] * state.beta_tilde;
    quad += e.dot(llt.solve(e));
  }
  const double n = static_cast<double>(data_.n());
  const double log_lik = -0.5 * n * d * std::log(2.0 * M_PI) - 0.5 * n * log_det - 0.5 * quad;
  const double log_beta = -0.5 * K * std::log(2.0 * M_PI * state.alpha2) - 0.5 * log_det_A_ -
                          0.5 * state.beta_tilde.dot(A_inv_ * state.beta_tilde) / state.alpha2;
  return log_lik + log_beta + log_invwishart_pdf(sigma_tilde, nu_, S_);
}

void MnpSampler::check_state(const MnpState& state) const {
  const int d = shape_.p - 1;
  if (std::abs(state.sigma_star.trace() - d) > 1e-9 * (d + 1)) {
    throw NumericalError("state: tr(sigma_star) != p - 1");
  }
  for (std::size_t i = 0; i < data_.n(); ++i) {
    const VectorXd w = state.w_star.row(static_cast<Eigen::Index>(i)).transpose();
    const int choice = data_.y[i];
    bool ok;
    if (choice == base_) {
      ok = w.maxCoeff() < 0.0;
    } else {
      Eigen::Index top;
      const double m = w.maxCoeff(&top);
      ok = m > 0.0 && top == coordinate_of(choice, base_);
    }
    if (!ok) throw NumericalError("state: utilities of agent " + std::to_string(i) + " disagree with the choice");
  }
}

DrawStore run_mnp(const ChoiceDataset& data, const Hyperparameters& hyper, int base) {
  const MnpSampler sampler(data, hyper, base);
  return run_mnp(sampler, hyper);
}

DrawStore run_mnp(const MnpSampler& sampler, const Hyperparameters& chain) {
  if (chain.iters < 1 || chain.burn < 0 || chain.burn >= chain.iters || chain.thin < 1) {
    throw DomainError("chain controls need iters > burn >= 0 and thin >= 1");
  }
  const auto started = std::chrono::steady_clock::now();
  const auto& shape = sampler.shape();
  const int p = shape.p;
  const int base = sampler.base();
  DrawStore store = make_store(ModelKind::BaseCategory, sampler.raw_data(), chain, base);
  store.nu = sampler.nu();
  store.S = sampler.scale();
  store.A = sampler.prior_cov();
  const int keep = chain.retained();
  store.beta.resize(keep, shape.full_size());

  RngStream rng(chain.seed, 0);
  MnpState state = sampler.init_state(rng);
  int kept = 0;
  for (int it = 0; it < chain.iters && kept < keep; ++it) {
    sampler.sweep(state, rng);
    if (it < chain.burn || (it - chain.burn + 1) % chain.thin != 0) continue;
    const double alpha = std::sqrt(state.alpha2);
    store.b.push_back(base);
    store.alpha2.push_back(state.alpha2);
    store.beta.row(kept) = (insert_base_zeros(state.beta_tilde, shape, base) / alpha).transpose();
    MatrixXd sigma = MatrixXd::Zero(p, p);
    for (int r = 0; r < p - 1; ++r) {
      for (int c = 0; c < p - 1; ++c) {
        sigma(category_of(r, base), category_of(c, base)) = state.sigma_star(r, c);
      }
    }
    store.sigma.push_back(std::move(sigma));
    store.log_kernel.push_back(sampler.log_kernel(state));
    if (chain.store_utilities) store.utilities.push_back(state.w_star / alpha);
    ++kept;
  }
  store.chain.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return store;
}

}  // namespace smnp
