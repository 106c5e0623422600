#include "catalytic/bridge.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace catalytic {

namespace {

constexpr double kScaleFloor = 1e-12;

double sq(double x) { return x * x; }

double residual_ss(const VectorXd& beta, const Dataset& data) {
  return (data.response - data.covariates * beta).squaredNorm();
}

VectorXd group_norms(const VectorXd& d, const PenaltySpec& spec) {
  VectorXd norms(static_cast<Eigen::Index>(spec.groups.size()));
  for (std::size_t i = 0; i < spec.groups.size(); ++i) {
    const auto& g = spec.groups[i];
    VectorXd v(static_cast<Eigen::Index>(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k)
      v[static_cast<Eigen::Index>(k)] = d[g[k]];
    norms[static_cast<Eigen::Index>(i)] =
        std::sqrt(v.dot(spec.group_metrics[i] * v));
  }
  return norms;
}

// min_u (1/2t)||u - v||^2 + kappa * sqrt(u' Sigma u), solved by a 1-d root
// find on mu in (I + mu Sigma) u = v with mu ||u||_Sigma = t kappa.
VectorXd sigma_norm_prox(const VectorXd& v, const MatrixXd& sigma, double t,
                         double kappa) {
  const Eigen::Index k = v.size();
  Eigen::LLT<MatrixXd> llt(sigma);
  const VectorXd w = llt.matrixL().solve(v);  // Sigma^{-1/2}-type norm of v
  const double limit = std::sqrt(w.squaredNorm());
  const double target = t * kappa;
  if (limit <= target) return VectorXd::Zero(k);

  auto u_of = [&](double mu) -> VectorXd {
    return (MatrixXd::Identity(k, k) + mu * sigma).ldlt().solve(v);
  };
  auto g = [&](double mu) {
    const VectorXd u = u_of(mu);
    return mu * std::sqrt(u.dot(sigma * u)) - target;
  };
  double lo = 0.0, hi = 1.0;
  while (g(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * (1.0 + hi)) break;
  }
  return u_of(0.5 * (lo + hi));
}

}  // namespace

void PenaltySpec::validate(Eigen::Index p) const {
  if (!(tau > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("penalty spec: tau and sigma must be > 0");
  if (center.size() != p)
    throw std::invalid_argument("penalty spec: center length != p");
  if (kind == PenaltyKind::ridge) {
    if (delta.rows() != p || delta.cols() != p)
      throw std::invalid_argument("penalty spec: delta must be p x p");
    return;
  }
  if (!(lambda > 0.0))
    throw std::invalid_argument("penalty spec: lambda must be > 0");
  if (kind == PenaltyKind::lq && !(r > 0.0))
    throw std::invalid_argument("penalty spec: r must be > 0");
  if (kind == PenaltyKind::elastic_net && ridge_center.size() != p)
    throw std::invalid_argument("penalty spec: ridge_center length != p");
  if (kind == PenaltyKind::group_lasso) {
    if (groups.size() != group_metrics.size())
      throw std::invalid_argument("penalty spec: groups/metrics mismatch");
    std::vector<bool> seen(static_cast<std::size_t>(p), false);
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (groups[i].empty())
        throw std::invalid_argument("penalty spec: empty group");
      const Eigen::Index k = static_cast<Eigen::Index>(groups[i].size());
      if (group_metrics[i].rows() != k || group_metrics[i].cols() != k)
        throw std::invalid_argument("penalty spec: metric size mismatch");
      for (Eigen::Index j : groups[i]) {
        if (j < 0 || j >= p || seen[static_cast<std::size_t>(j)])
          throw std::invalid_argument(
              "penalty spec: groups must partition {1..p}");
        seen[static_cast<std::size_t>(j)] = true;
      }
    }
    for (bool s : seen)
      if (!s)
        throw std::invalid_argument(
            "penalty spec: groups must partition {1..p}");
  }
}

PenaltySpec PenaltySpec::lasso(double lambda, VectorXd center, double sigma,
                               double tau) {
  PenaltySpec s;
  s.kind = PenaltyKind::lasso;
  s.lambda = lambda;
  s.r = 1.0;
  s.center = std::move(center);
  s.sigma = sigma;
  s.tau = tau;
  return s;
}

PenaltySpec PenaltySpec::ridge(MatrixXd delta, VectorXd center, double sigma,
                               double tau) {
  PenaltySpec s;
  s.kind = PenaltyKind::ridge;
  s.delta = std::move(delta);
  s.center = std::move(center);
  s.sigma = sigma;
  s.tau = tau;
  return s;
}

PenaltySpec PenaltySpec::elastic_net(double lambda, VectorXd ridge_center,
                                     VectorXd center, double sigma,
                                     double tau) {
  PenaltySpec s;
  s.kind = PenaltyKind::elastic_net;
  s.lambda = lambda;
  s.r = 1.0;
  s.ridge_center = std::move(ridge_center);
  s.center = std::move(center);
  s.sigma = sigma;
  s.tau = tau;
  return s;
}

PenaltySpec PenaltySpec::lq(double lambda, double r, VectorXd center,
                            double sigma, double tau) {
  PenaltySpec s;
  s.kind = PenaltyKind::lq;
  s.lambda = lambda;
  s.r = r;
  s.center = std::move(center);
  s.sigma = sigma;
  s.tau = tau;
  return s;
}

PenaltySpec PenaltySpec::group_lasso(
    double lambda, std::vector<std::vector<Eigen::Index>> groups,
    std::vector<MatrixXd> metrics, VectorXd center, double sigma, double tau) {
  PenaltySpec s;
  s.kind = PenaltyKind::group_lasso;
  s.lambda = lambda;
  s.r = 1.0;
  s.groups = std::move(groups);
  s.group_metrics = std::move(metrics);
  s.center = std::move(center);
  s.sigma = sigma;
  s.tau = tau;
  return s;
}

double joint_objective(const VectorXd& beta, const VectorXd& scales,
                       const Dataset& data, const PenaltySpec& spec) {
  spec.validate(beta.size());
  const double s2 = sq(spec.sigma);
  const VectorXd d = beta - spec.center;
  double obj = 0.5 / s2 * residual_ss(beta, data);

  if (spec.kind == PenaltyKind::ridge) {
    return obj + 0.5 / s2 * d.dot(spec.delta * d);
  }

  for (Eigen::Index j = 0; j < scales.size(); ++j)
    if (!(scales[j] > 0.0))
      throw std::invalid_argument("joint_objective: scales must be > 0");

  switch (spec.kind) {
    case PenaltyKind::lasso:
    case PenaltyKind::lq: {
      if (scales.size() != beta.size())
        throw std::invalid_argument("joint_objective: need p scales");
      for (Eigen::Index j = 0; j < beta.size(); ++j)
        obj += spec.tau / (2.0 * s2) * sq(d[j]) / scales[j] +
               spec.lambda / spec.tau * std::pow(scales[j], spec.r);
      return obj;
    }
    case PenaltyKind::elastic_net: {
      if (scales.size() != beta.size())
        throw std::invalid_argument("joint_objective: need p scales");
      obj += spec.tau / (4.0 * s2) * (beta - spec.ridge_center).squaredNorm();
      for (Eigen::Index j = 0; j < beta.size(); ++j)
        obj += spec.tau / (4.0 * s2) * sq(d[j]) / scales[j] +
               spec.lambda / spec.tau * scales[j];
      return obj;
    }
    case PenaltyKind::group_lasso: {
      const Eigen::Index g = static_cast<Eigen::Index>(spec.groups.size());
      if (scales.size() != g)
        throw std::invalid_argument("joint_objective: need one scale per group");
      const VectorXd norms = group_norms(d, spec);
      for (Eigen::Index i = 0; i < g; ++i)
        obj += spec.tau / (2.0 * s2) * sq(norms[i]) / scales[i] +
               spec.lambda / spec.tau * scales[i];
      return obj;
    }
    default:
      throw std::logic_error("joint_objective: unknown kind");
  }
}

VectorXd profile_scales(const VectorXd& beta, const PenaltySpec& spec) {
  spec.validate(beta.size());
  const double s2 = sq(spec.sigma);
  const VectorXd d = beta - spec.center;
  const double b = spec.lambda / spec.tau;

  auto argmin = [&](double a, double r) {
    // d/ds (a/s + b s^r) = 0  =>  s = (a / (b r))^{1/(r+1)}; +0 when a = 0
    return a == 0.0 ? 0.0 : std::pow(a / (b * r), 1.0 / (r + 1.0));
  };

  switch (spec.kind) {
    case PenaltyKind::ridge:
      return VectorXd();
    case PenaltyKind::lasso:
    case PenaltyKind::lq: {
      VectorXd s(beta.size());
      for (Eigen::Index j = 0; j < beta.size(); ++j)
        s[j] = argmin(spec.tau * sq(d[j]) / (2.0 * s2), spec.r);
      return s;
    }
    case PenaltyKind::elastic_net: {
      VectorXd s(beta.size());
      for (Eigen::Index j = 0; j < beta.size(); ++j)
        s[j] = argmin(spec.tau * sq(d[j]) / (4.0 * s2), 1.0);
      return s;
    }
    case PenaltyKind::group_lasso: {
      const VectorXd norms = group_norms(d, spec);
      VectorXd s(norms.size());
      for (Eigen::Index i = 0; i < norms.size(); ++i)
        s[i] = argmin(spec.tau * sq(norms[i]) / (2.0 * s2), 1.0);
      return s;
    }
    default:
      throw std::logic_error("profile_scales: unknown kind");
  }
}

double profiled_objective(const VectorXd& beta, const Dataset& data,
                          const PenaltySpec& spec) {
  spec.validate(beta.size());
  const double s2 = sq(spec.sigma);
  const VectorXd d = beta - spec.center;
  const double rss = residual_ss(beta, data);

  switch (spec.kind) {
    case PenaltyKind::ridge:
      return 0.5 * rss + 0.5 * d.dot(spec.delta * d);
    case PenaltyKind::lasso:
      return 0.5 * rss +
             std::sqrt(2.0 * spec.lambda * s2) * d.cwiseAbs().sum();
    case PenaltyKind::elastic_net:
      // profiled constant re-derived from the tau/(4 sigma^2) quadratic and
      // the exponential(lambda/tau) hyperprior: sqrt(lambda sigma^2)
      return 0.5 * rss +
             spec.tau / 4.0 * (beta - spec.ridge_center).squaredNorm() +
             std::sqrt(spec.lambda * s2) * d.cwiseAbs().sum();
    case PenaltyKind::lq: {
      const double r = spec.r;
      const double c = std::pow(
          std::pow(spec.tau, r - 1.0) * 2.0 * spec.lambda * s2 /
              std::pow(r, r),
          1.0 / (r + 1.0));
      double pen = 0.0;
      for (Eigen::Index j = 0; j < beta.size(); ++j)
        pen += std::pow(std::abs(d[j]), spec.exponent());
      return rss / (r + 1.0) + c * pen;
    }
    case PenaltyKind::group_lasso:
      return 0.5 * rss +
             std::sqrt(2.0 * spec.lambda * s2) * group_norms(d, spec).sum();
    default:
      throw std::logic_error("profiled_objective: unknown kind");
  }
}

namespace {

VectorXd solve_ridge(const Dataset& data, const PenaltySpec& spec) {
  const MatrixXd& X = data.covariates;
  const MatrixXd A = X.transpose() * X + spec.delta;
  const VectorXd rhs = X.transpose() * data.response + spec.delta * spec.center;
  return A.ldlt().solve(rhs);
}

double soft_threshold(double z, double k) {
  if (z > k) return z - k;
  if (z < -k) return z + k;
  return 0.0;
}

// Cyclic coordinate descent on b = beta - center for the lasso and the
// elastic net profiled objectives.
VectorXd solve_coordinate_descent(const Dataset& data, const PenaltySpec& spec,
                                  const SolveOptions& opts) {
  const MatrixXd& X = data.covariates;
  const Eigen::Index p = X.cols();
  const double s2 = sq(spec.sigma);
  const bool enet = spec.kind == PenaltyKind::elastic_net;
  const double kappa = enet ? std::sqrt(spec.lambda * s2)
                            : std::sqrt(2.0 * spec.lambda * s2);
  const double ridge_w = enet ? spec.tau / 2.0 : 0.0;

  VectorXd beta = spec.center;
  VectorXd resid = data.response - X * beta;
  const VectorXd colsq = X.colwise().squaredNorm();

  for (int it = 0; it < opts.max_iter; ++it) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = beta[j];
      // partial residual: r + x_j * beta_j
      const double rho = X.col(j).dot(resid) + colsq[j] * old;
      const double A = colsq[j] + ridge_w;
      double B = rho;
      if (enet) B += ridge_w * spec.ridge_center[j];
      // minimize 0.5 A t^2 - B t + kappa |t - c| at c = center_j
      const double c = spec.center[j];
      const double nb = c + soft_threshold(B - A * c, kappa) / A;
      if (nb != old) {
        resid += X.col(j) * (old - nb);
        beta[j] = nb;
        max_change = std::max(max_change, std::abs(nb - old));
      }
    }
    if (max_change <= opts.tol) break;
  }
  return beta;
}

// FISTA with the Sigma-norm block proximal map on b = beta - center.
VectorXd solve_group_prox(const Dataset& data, const PenaltySpec& spec,
                          const SolveOptions& opts) {
  const MatrixXd& X = data.covariates;
  const Eigen::Index p = X.cols();
  const double kappa = std::sqrt(2.0 * spec.lambda * sq(spec.sigma));
  const VectorXd R = data.response - X * spec.center;

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(X.transpose() * X);
  const double L = std::max(es.eigenvalues().maxCoeff(), 1e-12);
  const double t = 1.0 / L;

  VectorXd b = VectorXd::Zero(p), y = b, b_prev = b;
  double theta = 1.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const VectorXd grad = X.transpose() * (X * y - R);
    const VectorXd v = y - t * grad;
    VectorXd b_new(p);
    for (std::size_t i = 0; i < spec.groups.size(); ++i) {
      const auto& g = spec.groups[i];
      VectorXd vg(static_cast<Eigen::Index>(g.size()));
      for (std::size_t k = 0; k < g.size(); ++k)
        vg[static_cast<Eigen::Index>(k)] = v[g[k]];
      const VectorXd ug = sigma_norm_prox(vg, spec.group_metrics[i], t, kappa);
      for (std::size_t k = 0; k < g.size(); ++k)
        b_new[g[k]] = ug[static_cast<Eigen::Index>(k)];
    }
    const double theta_new =
        0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    y = b_new + ((theta - 1.0) / theta_new) * (b_new - b_prev);
    const double change = (b_new - b_prev).cwiseAbs().maxCoeff();
    b_prev = b_new;
    b = b_new;
    theta = theta_new;
    if (change <= opts.tol && it > 1) break;
  }
  return spec.center + b;
}

// Iteratively reweighted least squares on the lq profiled objective.
// For r < 1 the objective is nonconvex; this is a local method.
VectorXd solve_lq_irls(const Dataset& data, const PenaltySpec& spec,
                       const SolveOptions& opts) {
  const MatrixXd& X = data.covariates;
  const Eigen::Index p = X.cols();
  const double r = spec.r;
  const double gamma = spec.exponent();
  const double c = std::pow(std::pow(spec.tau, r - 1.0) * 2.0 * spec.lambda *
                                sq(spec.sigma) / std::pow(r, r),
                            1.0 / (r + 1.0));
  const double data_w = 2.0 / (r + 1.0);
  const MatrixXd XtX = X.transpose() * X;
  const VectorXd Xty = X.transpose() * data.response;
  const double eps = 1e-10;

  VectorXd beta = solve_ridge(
      data, PenaltySpec::ridge(MatrixXd::Identity(p, p), spec.center,
                               spec.sigma, spec.tau));
  for (int it = 0; it < std::min(opts.max_iter, 5000); ++it) {
    VectorXd w(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      const double dj = std::max(std::abs(beta[j] - spec.center[j]), eps);
      w[j] = c * gamma * std::pow(dj, gamma - 2.0);
    }
    MatrixXd A = data_w * XtX;
    A.diagonal() += w;
    const VectorXd rhs = data_w * Xty + w.asDiagonal() * spec.center;
    const VectorXd beta_new = A.ldlt().solve(rhs);
    const double change = (beta_new - beta).cwiseAbs().maxCoeff();
    beta = beta_new;
    if (change <= std::max(opts.tol, 1e-13)) break;
  }
  return beta;
}

}  // namespace

VectorXd solve_penalized(const Dataset& data, const PenaltySpec& spec,
                         const SolveOptions& opts) {
  spec.validate(data.p());
  switch (spec.kind) {
    case PenaltyKind::ridge:
      return solve_ridge(data, spec);
    case PenaltyKind::lasso:
    case PenaltyKind::elastic_net:
      return solve_coordinate_descent(data, spec, opts);
    case PenaltyKind::group_lasso:
      return solve_group_prox(data, spec, opts);
    case PenaltyKind::lq:
      return solve_lq_irls(data, spec, opts);
    default:
      throw std::logic_error("solve_penalized: unknown kind");
  }
}

namespace {

// beta-step of the alternating scheme: weighted generalized-ridge closed form.
VectorXd beta_step(const Dataset& data, const PenaltySpec& spec,
                   const VectorXd& scales) {
  const MatrixXd& X = data.covariates;
  const Eigen::Index p = X.cols();
  MatrixXd A = X.transpose() * X;
  VectorXd rhs = X.transpose() * data.response;
  switch (spec.kind) {
    case PenaltyKind::ridge:
      A += spec.delta;
      rhs += spec.delta * spec.center;
      break;
    case PenaltyKind::lasso:
    case PenaltyKind::lq:
      for (Eigen::Index j = 0; j < p; ++j) {
        const double w = spec.tau / scales[j];
        A(j, j) += w;
        rhs[j] += w * spec.center[j];
      }
      break;
    case PenaltyKind::elastic_net:
      for (Eigen::Index j = 0; j < p; ++j) {
        const double wr = spec.tau / 2.0;
        const double ws = spec.tau / (2.0 * scales[j]);
        A(j, j) += wr + ws;
        rhs[j] += wr * spec.ridge_center[j] + ws * spec.center[j];
      }
      break;
    case PenaltyKind::group_lasso:
      for (std::size_t i = 0; i < spec.groups.size(); ++i) {
        const auto& g = spec.groups[i];
        const MatrixXd block =
            (spec.tau / scales[static_cast<Eigen::Index>(i)]) *
            spec.group_metrics[i];
        VectorXd cg(static_cast<Eigen::Index>(g.size()));
        for (std::size_t k = 0; k < g.size(); ++k)
          cg[static_cast<Eigen::Index>(k)] = spec.center[g[k]];
        const VectorXd bc = block * cg;
        for (std::size_t a = 0; a < g.size(); ++a) {
          rhs[g[a]] += bc[static_cast<Eigen::Index>(a)];
          for (std::size_t bcol = 0; bcol < g.size(); ++bcol)
            A(g[a], g[bcol]) += block(static_cast<Eigen::Index>(a),
                                      static_cast<Eigen::Index>(bcol));
        }
      }
      break;
    default:
      throw std::logic_error("beta_step: unexpected kind");
  }
  return A.ldlt().solve(rhs);
}

}  // namespace

bool CertifyReport::passed(double obj_rel_tol, double argmin_tol) const {
  const double scale = 1.0 + std::abs(objective_direct);
  return objective_gap <= obj_rel_tol * scale && argmin_gap <= argmin_tol;
}

CertifyReport certify_equivalence(const Dataset& data, const PenaltySpec& spec,
                                  const CertifyOptions& opts) {
  spec.validate(data.p());
  CertifyReport report;
  report.local_only = spec.kind == PenaltyKind::lq && spec.r < 1.0;
  report.beta_direct = solve_penalized(data, spec);
  report.objective_direct =
      profiled_objective(report.beta_direct, data, spec);

  if (spec.kind == PenaltyKind::ridge) {
    // no scales to profile; one closed-form step
    report.beta_joint = beta_step(data, spec, VectorXd());
    report.start_objectives.push_back(
        profiled_objective(report.beta_joint, data, spec));
  } else {
    const Eigen::Index p = data.p();
    const RngStream rng(opts.seed);
    double best = std::numeric_limits<double>::infinity();
    for (int start = 0; start < opts.starts; ++start) {
      VectorXd beta;
      if (start == 0) {
        beta = VectorXd::Zero(p);
      } else {
        auto eng = rng.child("start", static_cast<std::uint64_t>(start))
                       .engine();
        std::normal_distribution<double> z(0.0, 1.0);
        beta.resize(p);
        for (Eigen::Index j = 0; j < p; ++j) beta[j] = z(eng);
      }
      double prev = std::numeric_limits<double>::infinity();
      for (int it = 0; it < opts.max_alternations; ++it) {
        VectorXd s = profile_scales(beta, spec).cwiseMax(kScaleFloor);
        beta = beta_step(data, spec, s);
        if (it % 16 == 15) {
          s = profile_scales(beta, spec).cwiseMax(kScaleFloor);
          const double obj = joint_objective(beta, s, data, spec);
          if (prev - obj <= opts.tol * (1.0 + std::abs(obj))) break;
          prev = obj;
        }
      }
      const double obj = profiled_objective(beta, data, spec);
      report.start_objectives.push_back(obj);
      if (obj < best) {
        best = obj;
        report.beta_joint = beta;
      }
    }
  }

  report.objective_joint = profiled_objective(report.beta_joint, data, spec);
  report.objective_gap =
      std::abs(report.objective_joint - report.objective_direct);
  report.argmin_gap =
      (report.beta_joint - report.beta_direct).cwiseAbs().maxCoeff();
  return report;
}

}  // namespace catalytic
