#include "catalytic/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace catalytic {

CovariateScheme CovariateScheme::marginal_resample() {
  return CovariateScheme{CovariateSchemeKind::marginal_resample, {}};
}

CovariateScheme CovariateScheme::joint_resample() {
  return CovariateScheme{CovariateSchemeKind::joint_resample, {}};
}

CovariateScheme CovariateScheme::fixed_matrix(MatrixXd m) {
  return CovariateScheme{CovariateSchemeKind::fixed_matrix, std::move(m)};
}

void SynthConfig::validate(Eigen::Index p) const {
  if (M < 1) throw std::invalid_argument("synth config: M must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("synth config: tau must be > 0");
  if (sources.empty())
    throw std::invalid_argument("synth config: at least one source required");
  double wsum = 0.0;
  for (const auto& s : sources) {
    if (s.mixture_weight < 0.0)
      throw std::invalid_argument("synth config: negative mixture weight");
    if (s.model.coefficients.size() != p)
      throw std::invalid_argument("synth config: source coefficient length != p");
    wsum += s.mixture_weight;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("synth config: mixture weights must sum to 1");
}

SynthConfig SynthConfig::defaults_for(Eigen::Index p) {
  SynthConfig c;
  c.tau = static_cast<double>(p);
  c.M = std::max<int>(400, static_cast<int>(4 * p));
  c.scheme = CovariateScheme::marginal_resample();
  c.mode = ResponseMode::expected_value;
  return c;
}

MatrixXd gen_covariates(const Dataset& observed, const CovariateScheme& scheme,
                        int M, const RngStream& rng) {
  const Eigen::Index p = observed.p();
  if (scheme.kind != CovariateSchemeKind::fixed_matrix && observed.n() < 1)
    throw std::invalid_argument("gen_covariates: no observed rows to resample");
  if (M < p)
    std::cerr << "warning: M=" << M << " < p=" << p
              << "; catalytic prior may be improper\n";

  MatrixXd X(M, p);
  switch (scheme.kind) {
    case CovariateSchemeKind::fixed_matrix: {
      if (scheme.fixed.cols() != p)
        throw std::invalid_argument("gen_covariates: fixed matrix has wrong p");
      if (scheme.fixed.rows() != M)
        throw std::invalid_argument("gen_covariates: fixed matrix has wrong M");
      Eigen::FullPivLU<MatrixXd> lu(scheme.fixed);
      if (lu.rank() < p)
        std::cerr << "warning: fixed synthetic covariate matrix has rank "
                  << lu.rank() << " < p=" << p << "\n";
      return scheme.fixed;
    }
    case CovariateSchemeKind::joint_resample: {
      auto eng = rng.child("joint-rows").engine();
      std::uniform_int_distribution<Eigen::Index> pick(0, observed.n() - 1);
      for (int i = 0; i < M; ++i) X.row(i) = observed.covariates.row(pick(eng));
      return X;
    }
    case CovariateSchemeKind::marginal_resample: {
      for (Eigen::Index j = 0; j < p; ++j) {
        auto eng = rng.child("marginal-col", static_cast<std::uint64_t>(j))
                       .engine();
        std::uniform_int_distribution<Eigen::Index> pick(0, observed.n() - 1);
        for (int i = 0; i < M; ++i)
          X(i, j) = observed.covariates(pick(eng), j);
      }
      return X;
    }
  }
  throw std::logic_error("gen_covariates: unknown scheme");
}

VectorXd gen_responses(const MatrixXd& X_star, const SynthConfig& config,
                       const RngStream& rng) {
  config.validate(X_star.cols());
  const Eigen::Index M = X_star.rows();
  VectorXd y(M);
  const bool single = config.sources.size() == 1;

  for (Eigen::Index i = 0; i < M; ++i) {
    std::size_t src = 0;
    if (!single) {
      auto eng = rng.child("mixture", static_cast<std::uint64_t>(i)).engine();
      std::uniform_real_distribution<double> u(0.0, 1.0);
      double v = u(eng);
      double acc = 0.0;
      for (std::size_t s = 0; s < config.sources.size(); ++s) {
        acc += config.sources[s].mixture_weight;
        if (v < acc) {
          src = s;
          break;
        }
        src = s;  // fall to last source on rounding
      }
    }
    const SimpleModelSpec& g = config.sources[src].model;
    const double eta = X_star.row(i).dot(g.coefficients);
    if (config.mode == ResponseMode::expected_value) {
      y[i] = g.family.kind == FamilyKind::bernoulli ? sigmoid(eta) : eta;
    } else {
      auto eng = rng.child("response", static_cast<std::uint64_t>(i)).engine();
      if (g.family.kind == FamilyKind::bernoulli) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        y[i] = u(eng) < sigmoid(eta) ? 1.0 : 0.0;
      } else {
        std::normal_distribution<double> z(0.0, g.family.sigma);
        y[i] = eta + z(eng);
      }
    }
  }
  return y;
}

CatalyticPrior build_catalytic_prior(const Dataset& observed,
                                     const SynthConfig& config) {
  config.validate(observed.p());
  const RngStream rng(config.seed);
  const MatrixXd X_star =
      gen_covariates(observed, config.scheme, config.M, rng.child("covariates"));
  const VectorXd y_star = gen_responses(X_star, config, rng.child("responses"));

  CatalyticPrior prior;
  prior.synthetic.covariates = X_star;
  prior.synthetic.response = y_star;
  prior.synthetic.weights =
      VectorXd::Constant(config.M, config.tau / config.M);
  prior.synthetic.column_names = observed.column_names;
  prior.tau = config.tau;
  prior.provenance = config;
  return prior;
}

Dataset CatalyticPrior::combine(const Dataset& observed) const {
  if (observed.n() == 0) return synthetic;
  Dataset obs = observed;
  obs.treatment.reset();
  return Dataset::concat(obs, synthetic);
}

}  // namespace catalytic
