#include "catalytic/fit.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace catalytic {

namespace {

void check_nonsingular(const MatrixXd& A, const char* who) {
  Eigen::FullPivLU<MatrixXd> lu(A);
  if (lu.rank() < A.cols())
    throw std::runtime_error(std::string(who) + ": singular system, rank " +
                             std::to_string(lu.rank()) + " < p=" +
                             std::to_string(A.cols()));
}

bool is_binary_column(const VectorXd& col) {
  for (Eigen::Index i = 0; i < col.size(); ++i)
    if (col[i] != 0.0 && col[i] != 1.0) return false;
  return true;
}

// Generic damped-Newton ascent of a concave-ish objective with analytic
// gradient/Hessian. Adds a Levenberg shift when -H is not positive definite.
MapResult newton_ascend(
    const std::function<double(const VectorXd&)>& value,
    const std::function<GradHess(const VectorXd&)>& grad_hess,
    VectorXd beta, int max_iter, double grad_tol, double divergence_norm) {
  MapResult out;
  double f = value(beta);
  GradHess gh = grad_hess(beta);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    const double gnorm = gh.gradient.norm();
    if (gnorm <= grad_tol) {
      out.converged = beta.norm() <= divergence_norm;
      break;
    }
    MatrixXd negH = -gh.hessian;
    VectorXd step;
    double shift = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Eigen::LLT<MatrixXd> llt(negH + shift * MatrixXd::Identity(
                                               negH.rows(), negH.cols()));
      if (llt.info() == Eigen::Success) {
        step = llt.solve(gh.gradient);
        break;
      }
      shift = shift == 0.0 ? 1e-8 * (1.0 + negH.diagonal().cwiseAbs().maxCoeff())
                           : shift * 10.0;
    }
    if (step.size() == 0 || !step.allFinite())
      throw std::runtime_error("newton: singular or non-finite Newton system");
    // near the optimum the true improvement drops below the rounding noise of
    // the summed objective, so accept any step within that noise band rather
    // than halving the exact Newton step away
    const double slack = 1e-12 * (1.0 + std::abs(f));
    double t = 1.0;
    VectorXd cand;
    double fc = -std::numeric_limits<double>::infinity();
    for (int h = 0; h < 60; ++h) {
      cand = beta + t * step;
      fc = value(cand);
      if (std::isfinite(fc) && fc >= f - slack) break;
      t *= 0.5;
    }
    if (!(fc >= f - slack)) {
      // no ascent direction left; stop where we are
      break;
    }
    beta = cand;
    f = fc;
    gh = grad_hess(beta);
  }
  out.beta_hat = beta;
  out.neg_hessian_at_mode = -gh.hessian;
  out.iterations = iter;
  out.final_grad_norm = gh.gradient.norm();
  if (out.final_grad_norm <= grad_tol && beta.norm() <= divergence_norm)
    out.converged = true;
  return out;
}

}  // namespace

LinearPosterior fit_linear_posterior(const Dataset& observed,
                                     const CatalyticPrior& prior,
                                     double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("fit_linear_posterior: sigma must be > 0");
  const Dataset combined = prior.combine(observed);
  const MatrixXd& X = combined.covariates;
  const MatrixXd A =
      X.transpose() * combined.weights.asDiagonal() * X;
  const VectorXd b =
      X.transpose() *
      (combined.weights.array() * combined.response.array()).matrix();
  check_nonsingular(A, "fit_linear_posterior");
  Eigen::LLT<MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("fit_linear_posterior: normal equations not SPD");
  LinearPosterior out;
  out.mean = llt.solve(b);
  out.covariance =
      sigma * sigma *
      llt.solve(MatrixXd::Identity(A.rows(), A.cols()));
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

MapResult fit_map(const Dataset& observed, const ModelFamily& family,
                  const CatalyticPrior* prior, const FitOptions& opts) {
  const Dataset data = prior ? prior->combine(observed) : [&] {
    Dataset d = observed;
    d.treatment.reset();
    return d;
  }();
  VectorXd beta = opts.init.size() == data.p()
                      ? opts.init
                      : VectorXd::Zero(data.p());
  auto value = [&](const VectorXd& b) {
    return log_likelihood(family, b, data);
  };
  auto gh = [&](const VectorXd& b) {
    return log_likelihood_grad_hess(family, b, data);
  };
  return newton_ascend(value, gh, beta, opts.max_iter, opts.grad_tol,
                       opts.divergence_norm);
}

MapResult fit_cauchy_map(const Dataset& observed, const CauchyOptions& opts) {
  auto [std_data, transform] = standardize(observed);
  std_data.treatment.reset();
  const Eigen::Index p = std_data.p();
  const Eigen::Index icol = std_data.intercept_index();

  VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j)
    scale[j] = (j == icol) ? opts.intercept_scale : opts.coef_scale;

  const ModelFamily fam = ModelFamily::bernoulli();
  auto value = [&](const VectorXd& b) {
    double v = log_likelihood(fam, b, std_data);
    for (Eigen::Index j = 0; j < p; ++j)
      v -= std::log1p((b[j] / scale[j]) * (b[j] / scale[j]));
    return v;
  };
  auto gh = [&](const VectorXd& b) {
    GradHess g = log_likelihood_grad_hess(fam, b, std_data);
    for (Eigen::Index j = 0; j < p; ++j) {
      const double s2 = scale[j] * scale[j];
      const double d = s2 + b[j] * b[j];
      g.gradient[j] += -2.0 * b[j] / d;
      g.hessian(j, j) += 2.0 * (b[j] * b[j] - s2) / (d * d);
    }
    return g;
  };
  MapResult res = newton_ascend(value, gh, VectorXd::Zero(p), opts.max_iter,
                                opts.grad_tol,
                                std::numeric_limits<double>::infinity());
  res.beta_hat = transform.beta_to_original(res.beta_hat, icol);
  return res;
}

VectorXd Standardization::beta_to_original(const VectorXd& beta_std,
                                           Eigen::Index intercept) const {
  VectorXd beta = beta_std;
  double shift = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (j == intercept) continue;
    beta[j] = beta_std[j] / scale[j];
    shift += beta[j] * center[j];
  }
  if (intercept >= 0) beta[intercept] -= shift;
  return beta;
}

std::pair<Dataset, Standardization> standardize(const Dataset& data) {
  const Eigen::Index p = data.p();
  const Eigen::Index icol = data.intercept_index();
  Standardization t;
  t.center = VectorXd::Zero(p);
  t.scale = VectorXd::Ones(p);
  Dataset out = data;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (j == icol) continue;
    const VectorXd col = data.covariates.col(j);
    const double mean = col.mean();
    if (is_binary_column(col)) {
      t.center[j] = mean;
      out.covariates.col(j).array() -= mean;
      continue;
    }
    const double var = (col.array() - mean).square().mean();
    if (var <= 0.0)
      throw std::invalid_argument(
          "standardize: zero-variance nonbinary column " + std::to_string(j));
    t.center[j] = mean;
    t.scale[j] = 2.0 * std::sqrt(var);  // target sd 0.5
    out.covariates.col(j) = (col.array() - mean) / t.scale[j];
  }
  return {out, t};
}

Dataset unstandardize(const Dataset& data, const Standardization& t) {
  Dataset out = data;
  for (Eigen::Index j = 0; j < data.p(); ++j)
    out.covariates.col(j) =
        data.covariates.col(j).array() * t.scale[j] + t.center[j];
  return out;
}

}  // namespace catalytic
