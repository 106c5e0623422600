#pragma once

#include <utility>

#include "catalytic/synth.hpp"

namespace catalytic {

/// Exact Gaussian posterior for the linear target under a catalytic prior.
struct LinearPosterior {
  VectorXd mean;
  MatrixXd covariance;
};

struct MapResult {
  VectorXd beta_hat;
  MatrixXd neg_hessian_at_mode;
  bool converged = false;
  int iterations = 0;
  double final_grad_norm = 0.0;
};

struct FitOptions {
  int max_iter = 100;
  double grad_tol = 1e-8;
  double divergence_norm = 1e3;  // ||beta|| beyond this counts as diverged
  VectorXd init;                 // empty => zeros
};

/// Posterior mean and covariance of the gaussian-linear target on combined
/// weighted data, computed by an SPD solve of the normal equations.
LinearPosterior fit_linear_posterior(const Dataset& observed,
                                     const CatalyticPrior& prior,
                                     double sigma);

/// Newton MAP with step-halving line search on the weighted combined log
/// posterior. prior == nullptr means the flat prior (MAP = MLE).
MapResult fit_map(const Dataset& observed, const ModelFamily& family,
                  const CatalyticPrior* prior, const FitOptions& opts = {});

struct CauchyOptions {
  double coef_scale = 2.5;
  double intercept_scale = 10.0;
  int max_iter = 100;
  double grad_tol = 1e-8;
};

/// Logistic MAP under independent Cauchy coefficient priors after the
/// standard rescaling (nonbinary regressors to mean 0, sd 0.5; binary
/// centered). beta_hat is reported on the original covariate scale.
MapResult fit_cauchy_map(const Dataset& observed,
                         const CauchyOptions& opts = {});

/// Per-column affine transform x ~ (x - center) / scale.
struct Standardization {
  VectorXd center;
  VectorXd scale;

  VectorXd beta_to_original(const VectorXd& beta_std,
                            Eigen::Index intercept) const;
};

/// Nonbinary columns to mean 0, sd 0.5 (population sd); binary columns
/// centered only; the intercept column untouched.
std::pair<Dataset, Standardization> standardize(const Dataset& data);

Dataset unstandardize(const Dataset& data, const Standardization& t);

}  // namespace catalytic
