#pragma once

#include <vector>

#include "catalytic/dataset.hpp"

namespace catalytic {

enum class FamilyKind { gaussian, bernoulli };

/// Response family of the target model. Gaussian carries a known sigma.
struct ModelFamily {
  FamilyKind kind = FamilyKind::gaussian;
  double sigma = 1.0;

  static ModelFamily gaussian(double sigma);
  static ModelFamily bernoulli();
};

/// Fitted simpler model: family, active covariate subset, and a length-p
/// coefficient vector that is exactly zero off the subset.
struct SimpleModelSpec {
  ModelFamily family;
  std::vector<Eigen::Index> subset;
  VectorXd coefficients;
};

/// log(1 + exp(eta)), stable for |eta| up to ~700.
double log1p_exp(double eta);

/// Logistic function, stable on both tails.
double sigmoid(double eta);

/// Weighted log-likelihood sum_i w_i log f(Y_i | X_i, beta).
/// Bernoulli kernel y*eta - log(1+exp(eta)) accepts fractional y.
double log_likelihood(const ModelFamily& family, const VectorXd& beta,
                      const Dataset& data);

struct GradHess {
  VectorXd gradient;
  MatrixXd hessian;
};

/// Analytic gradient and Hessian of the weighted log-likelihood.
GradHess log_likelihood_grad_hess(const ModelFamily& family,
                                  const VectorXd& beta, const Dataset& data);

/// Weighted MLE of the family restricted to the given columns.
SimpleModelSpec fit_simple_model(const Dataset& data,
                                 const std::vector<Eigen::Index>& subset,
                                 const ModelFamily& family);

}  // namespace catalytic
