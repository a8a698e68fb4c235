#include "smnp/draws.hpp"

#include "smnp/errors.hpp"

namespace smnp {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::Symmetric ? "smnp" : "mnp";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "smnp") return ModelKind::Symmetric;
  if (name == "mnp") return ModelKind::BaseCategory;
  throw DomainError("unknown model kind '" + name + "'");
}

MatrixXd DrawStore::utility_factor(std::size_t t) const {
  const int cat = kind == ModelKind::Symmetric ? b.at(t) : base;
  const MatrixXd reduced = drop_row_col(sigma.at(t), cat);
  if (kind == ModelKind::Symmetric) return construct_R(reduced, cat);

  Eigen::LLT<MatrixXd> llt(reduced);
  if (llt.info() != Eigen::Success) throw NumericalError("stored covariance is not positive definite");
  const MatrixXd L = llt.matrixL();
  MatrixXd F = MatrixXd::Zero(p, p - 1);
  for (int r = 0, rr = 0; r < p; ++r) {
    if (r != cat) F.row(r) = L.row(rr++);
  }
  return F;
}

MatrixXd alternative_means(const ChoiceDataset& data) {
  MatrixXd means = MatrixXd::Zero(data.p, data.k_a());
  if (data.n() == 0) return means;
  for (const auto& xa : data.x_a) means += xa;
  return means / static_cast<double>(data.n());
}

std::vector<std::string> beta_names(const DrawStore& store) {
  std::vector<std::string> names;
  names.reserve(store.shape().full_size());
  for (const auto& label : store.labels) names.push_back("beta_eta_" + label);
  for (const auto& agent : store.agent_names) {
    for (const auto& label : store.labels) names.push_back("beta_" + agent + "_" + label);
  }
  for (const auto& alt : store.alt_names) names.push_back("beta_delta_" + alt);
  return names;
}

DrawStore make_store(ModelKind kind, const ChoiceDataset& raw_data, const Hyperparameters& hyper,
                     int base) {
  DrawStore store;
  store.kind = kind;
  store.p = raw_data.p;
  store.k_d = raw_data.k_d();
  store.k_a = raw_data.k_a();
  store.labels = raw_data.labels;
  store.agent_names = raw_data.agent_names;
  store.alt_names = raw_data.alt_names;
  store.base = base;
  store.agent_means = raw_data.n() > 0 ? VectorXd(raw_data.x_d.colwise().mean().transpose())
                                       : VectorXd::Zero(raw_data.k_d());
  store.alt_means = alternative_means(raw_data);
  store.nu = hyper.nu_for(raw_data.p);
  store.S = hyper.scale_for(raw_data.p);
  store.A = hyper.prior_cov(raw_data.shape().reduced_size());
  store.chain.iters = hyper.iters;
  store.chain.burn = hyper.burn;
  store.chain.thin = hyper.thin;
  store.chain.seed = hyper.seed;
  store.beta.resize(0, raw_data.shape().full_size());
  return store;
}

}  // namespace smnp
