#pragma once

// Domain types and the linear-algebra plumbing shared by both samplers:
// design matrices, the centering (T_s) and base-subtraction (T_bc)
// transforms, sum-to-zero coefficient expansion, and the rank-deficient
// covariance factor R.
//
// Category indices are 0-based throughout the library. Files and the CLI
// speak in category labels; the draw table prints the faux base 1-based.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace smnp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Sizes that fix the coefficient layout: p categories, k_d agent covariates,
/// k_a alternative-specific covariates.
struct DesignShape {
  int p = 0;
  int k_d = 0;
  int k_a = 0;

  /// Length of the full coefficient vector (eta | xi_1..xi_p | delta).
  int full_size() const { return p + p * k_d + k_a; }
  /// Length of the coefficient vector with one category dropped per block.
  int reduced_size() const { return (p - 1) * (k_d + 1) + k_a; }
  /// Number of length-p blocks constrained to sum to zero.
  int zero_sum_blocks() const { return k_d + 1; }
};

struct ChoiceDataset {
  int p = 0;
  std::vector<std::string> labels;       // p category names
  std::vector<std::string> agent_names;  // k_d
  std::vector<std::string> alt_names;    // k_a
  std::vector<int> y;                    // chosen category per agent, 0-based
  MatrixXd x_d;                          // n x k_d
  std::vector<MatrixXd> x_a;             // n matrices, each p x k_a

  std::size_t n() const { return y.size(); }
  int k_d() const { return static_cast<int>(agent_names.size()); }
  int k_a() const { return static_cast<int>(alt_names.size()); }
  DesignShape shape() const { return {p, k_d(), k_a()}; }

  /// Throws DimensionError / DomainError when sizes or choices are inconsistent.
  void validate() const;
};

/// An empty dataset (n = 0) with the given layout; used for prior-only runs.
ChoiceDataset empty_dataset(DesignShape shape);

struct Hyperparameters {
  std::optional<double> nu;         // default p + 1
  double c = -1.0;                  // < 0 means 1/(p-1)
  std::optional<MatrixXd> S;        // default default_S(p, c)
  double beta_var = 100.0;          // A = beta_var * I unless A is set
  std::optional<MatrixXd> A;
  int iters = 20000;
  int burn = 5000;
  int thin = 5;
  std::uint64_t seed = 1;
  bool store_utilities = false;

  double nu_for(int p) const { return nu.value_or(p + 1.0); }
  double c_for(int p) const { return c < 0.0 ? 1.0 / (p - 1) : c; }
  MatrixXd scale_for(int p) const;
  MatrixXd prior_cov(int n_coef) const;
  int retained() const { return iters > burn ? (iters - burn) / thin : 0; }

  void validate(int p, int n_coef) const;
};

MatrixXd ts_matrix(int p);
MatrixXd tbc_matrix(int p);

/// X_i = [I_p | x_d' (x) I_p | x_a].
MatrixXd build_design(const VectorXd& x_d, const MatrixXd& x_a);

/// X_i with row b, and column b of the intercept block and of every
/// agent-covariate block, removed. The alternative block is kept whole.
MatrixXd reduce_design(const MatrixXd& X, const DesignShape& shape, int b);

/// Inserts, at position b of every zero-sum block, minus the sum of the
/// block's other entries. The alternative-covariate tail is copied.
VectorXd expand_beta(const VectorXd& beta_b, const DesignShape& shape, int b);

/// Inverse of expand_beta. Throws DomainError if a block's sum exceeds tol.
VectorXd reduce_beta(const VectorXd& full, const DesignShape& shape, int b,
                     double tol = 1e-8);

/// p x (p-1) factor whose rows other than b are the transposed lower
/// Cholesky factor of sigma_b, with row b chosen so every column sums to 0.
MatrixXd construct_R(const MatrixXd& sigma_b, int b);

/// diag(1 + c) - c * J J' in dimension p - 1.
MatrixXd default_S(int p, double c);

/// Removes row and column k from a square matrix.
MatrixXd drop_row_col(const MatrixXd& m, int k);
/// Removes entry k from a vector.
VectorXd drop_entry(const VectorXd& v, int k);

bool alternatives_centered(const ChoiceDataset& data, double tol = 1e-12);

/// Subtracts, per agent and per alternative covariate, the mean over the p
/// alternatives. Logs a notice when the input was not already centered.
ChoiceDataset center_alternatives(ChoiceDataset data);

struct ArgmaxResult {
  int index = 0;
  bool tie = false;
};

/// Index of the largest entry; exact ties resolve to the lowest index and set
/// `tie`.
ArgmaxResult argmax_lowest(const Eigen::Ref<const VectorXd>& v);

/// Logs a warning about an exact utility tie (rate-limited).
void warn_tie(const char* where);

}  // namespace smnp
