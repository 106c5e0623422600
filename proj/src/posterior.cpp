#include "catalytic/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace catalytic {

GaussianApprox laplace_approx(const MapResult& map_result) {
  if (!map_result.converged)
    throw std::invalid_argument("laplace_approx: mode did not converge");
  Eigen::LLT<MatrixXd> llt(map_result.neg_hessian_at_mode);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "laplace_approx: negative Hessian not positive definite");
  GaussianApprox out;
  out.mean = map_result.beta_hat;
  const Eigen::Index p = map_result.beta_hat.size();
  out.covariance = llt.solve(MatrixXd::Identity(p, p));
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

MatrixXd default_proposal_cov(const GaussianApprox& approx) {
  const double p = static_cast<double>(approx.mean.size());
  return (2.38 * 2.38 / p) * approx.covariance;
}

SampleMatrix rw_metropolis(const LogDensity& log_post, const VectorXd& init,
                           int steps, const MatrixXd& proposal_cov,
                           const RngStream& rng,
                           const MetropolisOptions& opts) {
  if (steps < 1) throw std::invalid_argument("rw_metropolis: steps < 1");
  const Eigen::Index p = init.size();
  Eigen::LLT<MatrixXd> llt(proposal_cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("rw_metropolis: proposal covariance not SPD");
  const MatrixXd L = llt.matrixL();

  double lp = log_post(init);
  if (!std::isfinite(lp))
    throw std::invalid_argument(
        "rw_metropolis: log posterior non-finite at init");

  auto eng = rng.child("chain").engine();
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  const int burn = static_cast<int>(opts.burn_in_fraction * steps);
  const int thin = std::max(1, opts.thin);
  const int kept = (steps - burn + thin - 1) / thin;

  SampleMatrix out;
  out.draws.resize(kept, p);
  out.burn_in = burn;
  out.thin = thin;
  out.seed = rng.state();

  VectorXd beta = init;
  VectorXd noise(p);
  long accepted = 0;
  int row = 0;
  for (int t = 0; t < steps; ++t) {
    for (Eigen::Index j = 0; j < p; ++j) noise[j] = z(eng);
    const VectorXd cand = beta + L * noise;
    const double lp_cand = log_post(cand);
    if (std::isfinite(lp_cand) && std::log(u(eng)) < lp_cand - lp) {
      beta = cand;
      lp = lp_cand;
      ++accepted;
    }
    if (t >= burn && (t - burn) % thin == 0) out.draws.row(row++) = beta;
  }
  out.acceptance_rate = static_cast<double>(accepted) / steps;
  return out;
}

double interpolated_quantile(VectorXd draws, double q) {
  if (draws.size() < 1)
    throw std::invalid_argument("quantile: empty draws");
  std::sort(draws.data(), draws.data() + draws.size());
  const double h = q * static_cast<double>(draws.size() - 1);
  const Eigen::Index lo = static_cast<Eigen::Index>(std::floor(h));
  const Eigen::Index hi = std::min<Eigen::Index>(lo + 1, draws.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return draws[lo] + frac * (draws[hi] - draws[lo]);
}

Summary posterior_summary(const VectorXd& draws, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("posterior_summary: level must be in (0,1)");
  if (draws.size() < 2)
    throw std::invalid_argument("posterior_summary: need >= 2 draws");
  const double alpha = 1.0 - level;
  Summary s;
  s.mean = draws.mean();
  s.lower = interpolated_quantile(draws, alpha / 2.0);
  s.upper = interpolated_quantile(draws, 1.0 - alpha / 2.0);
  return s;
}

}  // namespace catalytic
