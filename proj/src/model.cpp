#include "catalytic/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace catalytic {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_dims(const VectorXd& beta, const Dataset& data) {
  if (beta.size() != data.p())
    throw std::invalid_argument("log_likelihood: beta length != p");
  data.validate();
}
}  // namespace

ModelFamily ModelFamily::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("gaussian family: sigma must be positive finite");
  return ModelFamily{FamilyKind::gaussian, sigma};
}

ModelFamily ModelFamily::bernoulli() {
  return ModelFamily{FamilyKind::bernoulli, 0.0};
}

double log1p_exp(double eta) {
  if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
  return std::log1p(std::exp(eta));
}

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double log_likelihood(const ModelFamily& family, const VectorXd& beta,
                      const Dataset& data) {
  check_dims(beta, data);
  const VectorXd eta = data.covariates * beta;
  double ll = 0.0;
  if (family.kind == FamilyKind::bernoulli) {
    for (Eigen::Index i = 0; i < data.n(); ++i)
      ll += data.weights[i] * (data.response[i] * eta[i] - log1p_exp(eta[i]));
  } else {
    const double s2 = family.sigma * family.sigma;
    const double norm = -0.5 * std::log(kTwoPi * s2);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const double r = data.response[i] - eta[i];
      ll += data.weights[i] * (norm - 0.5 * r * r / s2);
    }
  }
  if (!std::isfinite(ll))
    throw std::runtime_error("log_likelihood: non-finite result");
  return ll;
}

GradHess log_likelihood_grad_hess(const ModelFamily& family,
                                  const VectorXd& beta, const Dataset& data) {
  check_dims(beta, data);
  const VectorXd eta = data.covariates * beta;
  VectorXd resid(data.n());   // d ll / d eta_i, per unit weight
  VectorXd curv(data.n());    // -d^2 ll / d eta_i^2, per unit weight
  if (family.kind == FamilyKind::bernoulli) {
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const double mu = sigmoid(eta[i]);
      resid[i] = data.response[i] - mu;
      curv[i] = mu * (1.0 - mu);
    }
  } else {
    const double inv_s2 = 1.0 / (family.sigma * family.sigma);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      resid[i] = (data.response[i] - eta[i]) * inv_s2;
      curv[i] = inv_s2;
    }
  }
  GradHess out;
  out.gradient = data.covariates.transpose() *
                 (data.weights.array() * resid.array()).matrix();
  const VectorXd wc = (data.weights.array() * curv.array()).matrix();
  out.hessian = -(data.covariates.transpose() * wc.asDiagonal() *
                  data.covariates);
  // enforce exact symmetry against accumulation-order noise
  out.hessian = 0.5 * (out.hessian + out.hessian.transpose()).eval();
  return out;
}

SimpleModelSpec fit_simple_model(const Dataset& data,
                                 const std::vector<Eigen::Index>& subset,
                                 const ModelFamily& family) {
  if (subset.empty())
    throw std::invalid_argument("fit_simple_model: empty subset");
  data.validate(family.kind == FamilyKind::bernoulli);
  const Eigen::Index p = data.p();
  const Eigen::Index k = static_cast<Eigen::Index>(subset.size());
  for (Eigen::Index j : subset)
    if (j < 0 || j >= p)
      throw std::invalid_argument("fit_simple_model: subset index out of range");

  MatrixXd Xs(data.n(), k);
  for (Eigen::Index c = 0; c < k; ++c)
    Xs.col(c) = data.covariates.col(subset[static_cast<std::size_t>(c)]);

  Dataset sub;
  sub.covariates = Xs;
  sub.response = data.response;
  sub.weights = data.weights;

  Eigen::FullPivLU<MatrixXd> lu(Xs.transpose() * Xs);
  if (lu.rank() < k)
    throw std::invalid_argument(
        "fit_simple_model: submatrix on subset is rank deficient");

  VectorXd psi_s;
  if (family.kind == FamilyKind::gaussian) {
    const MatrixXd A = Xs.transpose() * data.weights.asDiagonal() * Xs;
    const VectorXd b = Xs.transpose() *
                       (data.weights.array() * data.response.array()).matrix();
    psi_s = A.ldlt().solve(b);
  } else {
    const double wy = (data.weights.array() * data.response.array()).sum();
    const double wtot = data.weights.sum();
    if (wy <= 0.0 || wy >= wtot)
      throw std::invalid_argument(
          "fit_simple_model: bernoulli response is all 0 or all 1; generate "
          "expected-value synthetic responses directly from the proportion");
    // Newton on the subset logistic likelihood
    psi_s = VectorXd::Zero(k);
    const ModelFamily fam = ModelFamily::bernoulli();
    for (int iter = 0; iter < 100; ++iter) {
      GradHess gh = log_likelihood_grad_hess(fam, psi_s, sub);
      if (gh.gradient.norm() <= 1e-10) break;
      const VectorXd step = (-gh.hessian).ldlt().solve(gh.gradient);
      double t = 1.0;
      const double f0 = log_likelihood(fam, psi_s, sub);
      for (int h = 0; h < 50; ++h) {
        if (log_likelihood(fam, psi_s + t * step, sub) >= f0) break;
        t *= 0.5;
      }
      psi_s += t * step;
    }
  }

  SimpleModelSpec spec;
  spec.family = family;
  spec.subset = subset;
  spec.coefficients = VectorXd::Zero(p);
  for (Eigen::Index c = 0; c < k; ++c)
    spec.coefficients[subset[static_cast<std::size_t>(c)]] = psi_s[c];
  return spec;
}

}  // namespace catalytic
