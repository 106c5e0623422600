#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "catalytic/fit.hpp"

namespace catalytic {

struct GaussianApprox {
  VectorXd mean;
  MatrixXd covariance;
};

struct SampleMatrix {
  MatrixXd draws;  // T x p, after burn-in and thinning
  double acceptance_rate = 0.0;
  std::uint64_t seed = 0;
  int burn_in = 0;
  int thin = 1;
};

using LogDensity = std::function<double(const VectorXd&)>;

/// Gaussian approximation at a converged mode: mean = beta_hat,
/// covariance = inverse of the negative Hessian via an SPD solve.
GaussianApprox laplace_approx(const MapResult& map_result);

struct MetropolisOptions {
  int steps = 50000;
  double burn_in_fraction = 0.2;
  int thin = 5;
};

/// Gaussian random-walk Metropolis. Deterministic given the rng stream.
SampleMatrix rw_metropolis(const LogDensity& log_post, const VectorXd& init,
                           int steps, const MatrixXd& proposal_cov,
                           const RngStream& rng,
                           const MetropolisOptions& opts = {});

/// (2.38^2 / p) * laplace covariance, the standard random-walk scaling.
MatrixXd default_proposal_cov(const GaussianApprox& approx);

struct Summary {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Mean and equal-tailed credible interval via linearly interpolated
/// order statistics.
Summary posterior_summary(const VectorXd& draws, double level);

/// Empirical quantile with linear interpolation at h = q*(T-1).
double interpolated_quantile(VectorXd draws, double q);

}  // namespace catalytic
