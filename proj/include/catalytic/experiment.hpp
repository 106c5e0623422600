#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "catalytic/fit.hpp"

namespace catalytic {

/// Simulated employment-program population: 9 binary covariates, a child
/// count, and prior-year earnings with a point mass at zero tied to the
/// positive-earnings indicator. Potential outcomes follow two independent
/// logistic models.
struct JobSimSpec {
  Eigen::Index N = 3200;
  VectorXd beta_t_true;        // 12: intercept + 11 covariates
  VectorXd beta_c_true;        // 12
  VectorXd binary_prevalence;  // 9, last entry = P(positive prior earnings)
  double children_rate = 1.5;  // Poisson mean for number of children
  double earnings_meanlog = 0.0;
  double earnings_sdlog = 0.75;
  std::uint64_t seed = 0;

  void validate() const;

  /// Frozen defaults used as the regression-test target.
  static JobSimSpec frozen_default();

  static const std::vector<std::string>& column_names();
};

struct Population {
  Dataset observed;  // treatment assigned, only Y(Z) exposed
  VectorXd y_treat;  // potential outcome Y(1), held for diagnostics
  VectorXd y_control;
};

Population simulate_population(const JobSimSpec& spec);

struct ArmFits {
  MapResult treat;
  MapResult control;
};

/// Flat-prior MAP per arm on the full data; aborts on divergence.
ArmFits benchmark_fit(const Dataset& full);

/// Balanced disjoint subsamples: n/2 and n_prime/2 rows per arm.
std::pair<Dataset, Dataset> draw_train_test(const Dataset& full, int n,
                                            int n_prime,
                                            const RngStream& rng);

enum class Method { flat, cauchy, catalytic };

std::string method_name(Method m);

struct CatalyticMethodConfig {
  double tau = 24.0;
  int M = 400;
  /// Simple-model covariate subsets (each includes the intercept column 0).
  /// More than one subset means an equal-weight mixture of the sources.
  std::vector<std::vector<Eigen::Index>> source_subsets = {{0}};
};

struct SubgroupDef {
  std::string label;
  Eigen::Index column = -1;  // -1 => all rows
  bool positive = true;      // keep rows with column value > threshold
  double threshold = 0.5;
};

/// All + the eight standard subgroups (hsdip, age>35, nevmar, divwid).
std::vector<SubgroupDef> default_subgroups();

struct ReplicationResult {
  int n = 0;
  Method method = Method::flat;
  std::map<std::string, double> gamma_avg_by_group;
  double msdpte = 0.0;
  bool diverged = false;
};

std::vector<ReplicationResult> run_replication(
    const Dataset& train, const Dataset& test, const ArmFits& benchmark,
    const std::vector<Method>& methods, const CatalyticMethodConfig& cata,
    const RngStream& rng);

struct CellStat {
  double mse = 0.0;
  double se = 0.0;
  int diverged = 0;
  int replications = 0;
};

struct ExperimentReport {
  std::vector<std::string> groups;
  std::vector<int> n_grid;
  std::vector<Method> methods;
  // key: group "|" n "|" method
  std::map<std::string, CellStat> cells;
  // key: n "|" method; MSDPTE mean and SE over replications
  std::map<std::string, std::pair<double, double>> msdpte;
  std::map<std::string, double> benchmark_gamma;  // per group
  std::string estimator = "map";
  double display_clip = 50.0;  // "> 50" convention for diverged cells

  static std::string cell_key(const std::string& group, int n, Method m);
  static std::string curve_key(int n, Method m);

  std::string to_csv() const;
  std::string to_json() const;
};

ExperimentReport aggregate(
    const std::vector<std::vector<ReplicationResult>>& results,
    const std::vector<SubgroupDef>& groups,
    const std::map<std::string, double>& benchmark_gamma);

struct ExperimentConfig {
  JobSimSpec sim;
  std::vector<int> n_grid = {100, 200, 400, 800, 1600};
  int replications = 250;
  int n_prime = 500;
  std::vector<Method> methods = {Method::flat, Method::cauchy,
                                 Method::catalytic};
  CatalyticMethodConfig cata;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Full protocol: simulate, benchmark, replicate over the n grid, aggregate.
/// Deterministic for a fixed seed regardless of worker count.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace catalytic
