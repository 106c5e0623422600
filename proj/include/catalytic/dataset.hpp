#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace catalytic {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

inline constexpr const char* kInterceptName = "__intercept__";

/// Observed (or synthetic) data: covariate matrix, response, optional
/// treatment indicator, and per-row weights. Bernoulli responses may be
/// fractional in [0,1] (expected-value synthetic responses).
struct Dataset {
  MatrixXd covariates;                  // n x p
  VectorXd response;                    // n
  std::optional<VectorXi> treatment;    // n, values in {0,1}
  VectorXd weights;                     // n, strictly positive
  std::vector<std::string> column_names;  // p

  Eigen::Index n() const { return covariates.rows(); }
  Eigen::Index p() const { return covariates.cols(); }

  /// Index of the all-ones intercept column, or -1 if absent.
  Eigen::Index intercept_index() const;

  /// Throws std::invalid_argument on any dimension or invariant violation.
  void validate(bool bernoulli_response = false) const;

  /// Rows where treatment == z; weights and response carried along.
  Dataset arm(int z) const;

  /// Row-concatenation of two datasets with matching columns.
  static Dataset concat(const Dataset& a, const Dataset& b);

  static Dataset make(MatrixXd X, VectorXd y,
                      std::vector<std::string> names = {},
                      VectorXd w = VectorXd());
};

}  // namespace catalytic
