#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "catalytic/model.hpp"
#include "catalytic/rng.hpp"

namespace catalytic {

enum class CovariateSchemeKind { marginal_resample, joint_resample, fixed_matrix };

/// How synthetic covariates are produced: component-wise resampling of the
/// observed columns, whole-row resampling, or a user-supplied matrix.
struct CovariateScheme {
  CovariateSchemeKind kind = CovariateSchemeKind::marginal_resample;
  MatrixXd fixed;  // used only for fixed_matrix

  static CovariateScheme marginal_resample();
  static CovariateScheme joint_resample();
  static CovariateScheme fixed_matrix(MatrixXd m);
};

enum class ResponseMode { expected_value, stochastic };

struct SynthSource {
  SimpleModelSpec model;
  double mixture_weight = 1.0;
};

struct SynthConfig {
  int M = 400;
  double tau = 1.0;
  CovariateScheme scheme;
  ResponseMode mode = ResponseMode::expected_value;
  std::vector<SynthSource> sources;
  std::uint64_t seed = 0;

  void validate(Eigen::Index p) const;

  /// tau = p, M = max(400, 4p).
  static SynthConfig defaults_for(Eigen::Index p);
};

/// Synthetic dataset with every row weighted tau/M.
struct CatalyticPrior {
  Dataset synthetic;
  double tau = 0.0;
  SynthConfig provenance;

  double row_weight() const { return tau / synthetic.n(); }

  /// Observed rows at weight 1 followed by synthetic rows at weight tau/M.
  Dataset combine(const Dataset& observed) const;
};

MatrixXd gen_covariates(const Dataset& observed, const CovariateScheme& scheme,
                        int M, const RngStream& rng);

VectorXd gen_responses(const MatrixXd& X_star, const SynthConfig& config,
                       const RngStream& rng);

CatalyticPrior build_catalytic_prior(const Dataset& observed,
                                     const SynthConfig& config);

}  // namespace catalytic
