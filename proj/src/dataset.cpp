#include "catalytic/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace catalytic {

Eigen::Index Dataset::intercept_index() const {
  for (Eigen::Index j = 0; j < p(); ++j) {
    if (j < static_cast<Eigen::Index>(column_names.size()) &&
        column_names[j] == kInterceptName)
      return j;
  }
  return -1;
}

void Dataset::validate(bool bernoulli_response) const {
  const Eigen::Index rows = covariates.rows();
  if (response.size() != rows)
    throw std::invalid_argument("dataset: response length != covariate rows");
  if (weights.size() != rows)
    throw std::invalid_argument("dataset: weight length != covariate rows");
  if (treatment && treatment->size() != rows)
    throw std::invalid_argument("dataset: treatment length != covariate rows");
  if (!column_names.empty() &&
      static_cast<Eigen::Index>(column_names.size()) != covariates.cols())
    throw std::invalid_argument("dataset: column_names length != p");
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw std::invalid_argument("dataset: weights must be positive finite");
    if (!std::isfinite(response[i]))
      throw std::invalid_argument("dataset: non-finite response");
    if (bernoulli_response && (response[i] < 0.0 || response[i] > 1.0))
      throw std::invalid_argument(
          "dataset: bernoulli response outside [0,1]");
    if (treatment) {
      const int z = (*treatment)[i];
      if (z != 0 && z != 1)
        throw std::invalid_argument("dataset: treatment must be 0/1");
    }
  }
  if (!covariates.allFinite())
    throw std::invalid_argument("dataset: non-finite covariate");
}

Dataset Dataset::arm(int z) const {
  if (!treatment)
    throw std::invalid_argument("dataset: arm() requires a treatment vector");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n(); ++i)
    if ((*treatment)[i] == z) keep.push_back(i);
  Dataset out;
  out.covariates.resize(static_cast<Eigen::Index>(keep.size()), p());
  out.response.resize(static_cast<Eigen::Index>(keep.size()));
  out.weights.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.covariates.row(static_cast<Eigen::Index>(k)) = covariates.row(keep[k]);
    out.response[static_cast<Eigen::Index>(k)] = response[keep[k]];
    out.weights[static_cast<Eigen::Index>(k)] = weights[keep[k]];
  }
  out.column_names = column_names;
  return out;
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
  if (a.p() != b.p())
    throw std::invalid_argument("dataset concat: column count mismatch");
  Dataset out;
  out.covariates.resize(a.n() + b.n(), a.p());
  out.covariates << a.covariates, b.covariates;
  out.response.resize(a.n() + b.n());
  out.response << a.response, b.response;
  out.weights.resize(a.n() + b.n());
  out.weights << a.weights, b.weights;
  out.column_names = a.column_names.empty() ? b.column_names : a.column_names;
  return out;
}

Dataset Dataset::make(MatrixXd X, VectorXd y, std::vector<std::string> names,
                      VectorXd w) {
  Dataset d;
  d.covariates = std::move(X);
  d.response = std::move(y);
  if (w.size() == 0) w = VectorXd::Ones(d.covariates.rows());
  d.weights = std::move(w);
  d.column_names = std::move(names);
  d.validate();
  return d;
}

}  // namespace catalytic
