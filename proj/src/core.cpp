#include "smnp/core.hpp"

#include "smnp/errors.hpp"
#include "smnp/log.hpp"

#include <atomic>
#include <cmath>
#include <string>

namespace smnp {

namespace {

void require_category(int k, int p, const char* what) {
  if (k < 0 || k >= p) {
    throw DimensionError(std::string(what) + ": category index " + std::to_string(k) +
                         " outside 0.." + std::to_string(p - 1));
  }
}

bool is_spd(const MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.isApprox(m.transpose(), 1e-10)) return false;
  Eigen::LLT<MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace

void ChoiceDataset::validate() const {
  if (p < 2) throw DimensionError("dataset needs at least 2 categories");
  if (static_cast<int>(labels.size()) != p) {
    throw DimensionError("dataset has " + std::to_string(labels.size()) + " labels for p = " +
                         std::to_string(p));
  }
  const auto n_agents = static_cast<Eigen::Index>(n());
  if (x_d.rows() != n_agents || x_d.cols() != k_d()) {
    throw DimensionError("agent covariate matrix must be n x k_d");
  }
  if (x_a.size() != n()) throw DimensionError("need one alternative covariate block per agent");
  for (std::size_t i = 0; i < n(); ++i) {
    if (y[i] < 0 || y[i] >= p) {
      throw DomainError("agent " + std::to_string(i) + " chose category " + std::to_string(y[i]) +
                        " outside 0.." + std::to_string(p - 1));
    }
    if (x_a[i].rows() != p || x_a[i].cols() != k_a()) {
      throw DimensionError("alternative covariates of agent " + std::to_string(i) +
                           " must be p x k_a");
    }
    if (!x_a[i].allFinite()) {
      throw DomainError("non-finite alternative covariate for agent " + std::to_string(i));
    }
  }
  if (!x_d.allFinite()) throw DomainError("non-finite agent covariate");
}

ChoiceDataset empty_dataset(DesignShape shape) {
  if (shape.p < 2) throw DimensionError("need p >= 2");
  ChoiceDataset data;
  data.p = shape.p;
  for (int j = 0; j < shape.p; ++j) data.labels.push_back("c" + std::to_string(j + 1));
  for (int k = 0; k < shape.k_d; ++k) data.agent_names.push_back("d" + std::to_string(k + 1));
  for (int k = 0; k < shape.k_a; ++k) data.alt_names.push_back("a" + std::to_string(k + 1));
  data.x_d = MatrixXd(0, shape.k_d);
  return data;
}

MatrixXd Hyperparameters::scale_for(int p) const {
  if (S) return *S;
  return default_S(p, c_for(p));
}

MatrixXd Hyperparameters::prior_cov(int n_coef) const {
  if (A) return *A;
  return beta_var * MatrixXd::Identity(n_coef, n_coef);
}

void Hyperparameters::validate(int p, int n_coef) const {
  const double df = nu_for(p);
  if (!(df > p - 2)) {
    throw DomainError("nu = " + std::to_string(df) + " must exceed p - 2 = " + std::to_string(p - 2));
  }
  if (S) {
    if (S->rows() != p - 1 || !is_spd(*S)) throw DomainError("S must be a (p-1)x(p-1) SPD matrix");
  } else {
    if (c_for(p) < 0.0) throw DomainError("c must be non-negative");
    if (!is_spd(default_S(p, c_for(p)))) throw DomainError("default_S(p, c) is not positive definite");
  }
  if (A) {
    if (A->rows() != n_coef || !is_spd(*A)) throw DomainError("A must be an SPD coefficient covariance");
  } else if (!(beta_var > 0.0)) {
    throw DomainError("beta_var must be positive");
  }
  if (iters < 1 || burn < 0 || burn >= iters || thin < 1) {
    throw DomainError("chain controls need iters > burn >= 0 and thin >= 1");
  }
}

MatrixXd ts_matrix(int p) {
  if (p < 2) throw DimensionError("ts_matrix needs p >= 2");
  MatrixXd t = MatrixXd::Constant(p, p, -1.0 / (p - 1));
  t.diagonal().setOnes();
  return t;
}

MatrixXd tbc_matrix(int p) {
  if (p < 2) throw DimensionError("tbc_matrix needs p >= 2");
  MatrixXd t(p - 1, p);
  t.col(0).setConstant(-1.0);
  t.rightCols(p - 1).setIdentity();
  return t;
}

MatrixXd build_design(const VectorXd& x_d, const MatrixXd& x_a) {
  const auto p = x_a.rows();
  if (p < 2) throw DimensionError("build_design needs p >= 2 rows of alternative covariates");
  const auto k_d = x_d.size();
  const auto k_a = x_a.cols();
  MatrixXd X = MatrixXd::Zero(p, p + p * k_d + k_a);
  X.leftCols(p).setIdentity();
  for (Eigen::Index k = 0; k < k_d; ++k) {
    X.block(0, p + k * p, p, p).diagonal().setConstant(x_d(k));
  }
  X.rightCols(k_a) = x_a;
  return X;
}

MatrixXd reduce_design(const MatrixXd& X, const DesignShape& shape, int b) {
  const int p = shape.p;
  require_category(b, p, "reduce_design");
  if (X.rows() != p || X.cols() != shape.full_size()) {
    throw DimensionError("reduce_design: design is not p x (p + p k_d + k_a)");
  }
  MatrixXd out(p - 1, shape.reduced_size());
  for (int r = 0, rr = 0; r < p; ++r) {
    if (r == b) continue;
    int col = 0;
    for (int g = 0; g < shape.zero_sum_blocks(); ++g) {
      for (int j = 0; j < p; ++j) {
        if (j == b) continue;
        out(rr, col++) = X(r, g * p + j);
      }
    }
    for (int k = 0; k < shape.k_a; ++k) out(rr, col++) = X(r, shape.zero_sum_blocks() * p + k);
    ++rr;
  }
  return out;
}

VectorXd expand_beta(const VectorXd& beta_b, const DesignShape& shape, int b) {
  const int p = shape.p;
  require_category(b, p, "expand_beta");
  if (beta_b.size() != shape.reduced_size()) {
    throw DimensionError("expand_beta: expected " + std::to_string(shape.reduced_size()) +
                         " coefficients, got " + std::to_string(beta_b.size()));
  }
  VectorXd full(shape.full_size());
  for (int g = 0; g < shape.zero_sum_blocks(); ++g) {
    const auto block = beta_b.segment(g * (p - 1), p - 1);
    double sum = 0.0;
    for (int j = 0, jj = 0; j < p; ++j) {
      if (j == b) continue;
      full(g * p + j) = block(jj);
      sum += block(jj++);
    }
    full(g * p + b) = -sum;
  }
  full.tail(shape.k_a) = beta_b.tail(shape.k_a);
  return full;
}

VectorXd reduce_beta(const VectorXd& full, const DesignShape& shape, int b, double tol) {
  const int p = shape.p;
  require_category(b, p, "reduce_beta");
  if (full.size() != shape.full_size()) {
    throw DimensionError("reduce_beta: expected " + std::to_string(shape.full_size()) +
                         " coefficients, got " + std::to_string(full.size()));
  }
  VectorXd out(shape.reduced_size());
  for (int g = 0; g < shape.zero_sum_blocks(); ++g) {
    const auto block = full.segment(g * p, p);
    const double sum = block.sum();
    if (std::abs(sum) > tol * std::max(1.0, block.cwiseAbs().maxCoeff())) {
      throw DomainError("reduce_beta: block " + std::to_string(g) + " sums to " +
                        std::to_string(sum) + ", not zero");
    }
    for (int j = 0, jj = 0; j < p; ++j) {
      if (j != b) out(g * (p - 1) + jj++) = block(j);
    }
  }
  out.tail(shape.k_a) = full.tail(shape.k_a);
  return out;
}

MatrixXd construct_R(const MatrixXd& sigma_b, int b) {
  const auto d = sigma_b.rows();
  if (d < 1 || sigma_b.cols() != d) throw DimensionError("construct_R: sigma_b must be square");
  const int p = static_cast<int>(d) + 1;
  require_category(b, p, "construct_R");
  Eigen::LLT<MatrixXd> llt(sigma_b);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("construct_R: sigma_b is not positive definite");
  }
  const MatrixXd L = llt.matrixL();
  MatrixXd R(p, d);
  for (int r = 0, rr = 0; r < p; ++r) {
    if (r == b) continue;
    R.row(r) = L.row(rr++);
  }
  R.row(b) = -L.colwise().sum();
  return R;
}

MatrixXd default_S(int p, double c) {
  if (p < 2) throw DimensionError("default_S needs p >= 2");
  if (c < 0.0) throw DomainError("default_S needs c >= 0");
  MatrixXd s = MatrixXd::Constant(p - 1, p - 1, -c);
  s.diagonal().setOnes();
  return s;
}

MatrixXd drop_row_col(const MatrixXd& m, int k) {
  const auto n = m.rows();
  MatrixXd out(n - 1, n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
    if (r == k) continue;
    for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
      if (c == k) continue;
      out(rr, cc++) = m(r, c);
    }
    ++rr;
  }
  return out;
}

VectorXd drop_entry(const VectorXd& v, int k) {
  VectorXd out(v.size() - 1);
  for (Eigen::Index r = 0, rr = 0; r < v.size(); ++r) {
    if (r != k) out(rr++) = v(r);
  }
  return out;
}

bool alternatives_centered(const ChoiceDataset& data, double tol) {
  for (const auto& xa : data.x_a) {
    if (xa.cols() == 0) continue;
    if ((xa.colwise().mean().array().abs() > tol).any()) return false;
  }
  return true;
}

ChoiceDataset center_alternatives(ChoiceDataset data) {
  if (data.k_a() == 0 || alternatives_centered(data)) return data;
  for (auto& xa : data.x_a) xa.rowwise() -= xa.colwise().mean();
  log::notice("alternative-specific covariates centered per observation across categories");
  return data;
}

ArgmaxResult argmax_lowest(const Eigen::Ref<const VectorXd>& v) {
  ArgmaxResult out;
  double best = v(0);
  for (Eigen::Index j = 1; j < v.size(); ++j) {
    if (v(j) > best) {
      best = v(j);
      out.index = static_cast<int>(j);
      out.tie = false;
    } else if (v(j) == best) {
      out.tie = true;
    }
  }
  return out;
}

void warn_tie(const char* where) {
  static std::atomic<int> count{0};
  const int seen = count.fetch_add(1);
  if (seen < 5) {
    log::warning(std::string(where) + ": exact utility tie, choosing the lowest category index");
  }
}

}  // namespace smnp
