#pragma once

#include <string>

#include "catalytic/posterior.hpp"

namespace catalytic {

/// Per-unit and average treatment effects on the log-probability-ratio
/// scale for a pair of independently fitted logistic arms.
struct EffectResult {
  double gamma_avg = 0.0;
  VectorXd per_unit;        // empty unless requested
  std::string group_label;
  VectorXd draws;           // posterior draws of gamma_avg, empty if none
};

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// log sigma(x'beta_t) - log sigma(x'beta_c); stable for |eta| up to ~700.
double log_prob_ratio(const VectorXd& x, const VectorXd& beta_t,
                      const VectorXd& beta_c);

EffectResult avg_effect(const MatrixXd& X, const Mask& mask,
                        const VectorXd& beta_t, const VectorXd& beta_c,
                        bool keep_per_unit = false,
                        const std::string& label = "All");

/// Pairs draw k of each arm's sample matrix and evaluates the averaged
/// effect per draw; arms are sampled independently.
EffectResult posterior_effect_distribution(const MatrixXd& X, const Mask& mask,
                                           const SampleMatrix& samples_t,
                                           const SampleMatrix& samples_c,
                                           const std::string& label = "All");

}  // namespace catalytic
