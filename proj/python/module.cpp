// Python bindings for the main library operations.

#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "catalytic/bridge.hpp"
#include "catalytic/csv.hpp"
#include "catalytic/effects.hpp"
#include "catalytic/experiment.hpp"
#include "catalytic/posterior.hpp"

namespace py = pybind11;
using namespace catalytic;

namespace {

Dataset make_dataset(MatrixXd X, VectorXd y,
                     std::optional<Eigen::VectorXi> treatment,
                     std::optional<VectorXd> weights,
                     std::vector<std::string> names) {
  Dataset d = Dataset::make(std::move(X), std::move(y), std::move(names),
                            weights ? *weights : VectorXd());
  if (treatment) d.treatment = *treatment;
  d.validate();
  return d;
}

ModelFamily family_from(const std::string& kind, double sigma) {
  if (kind == "gaussian") return ModelFamily::gaussian(sigma);
  if (kind == "bernoulli") return ModelFamily::bernoulli();
  throw std::invalid_argument("family must be 'gaussian' or 'bernoulli'");
}

}  // namespace

PYBIND11_MODULE(_catalytic, m) {
  m.doc() = "catalytic prior library bindings";

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("covariates"), py::arg("response"),
           py::arg("treatment") = std::nullopt,
           py::arg("weights") = std::nullopt,
           py::arg("column_names") = std::vector<std::string>())
      .def_readonly("covariates", &Dataset::covariates)
      .def_readonly("response", &Dataset::response)
      .def_readonly("weights", &Dataset::weights)
      .def_readonly("column_names", &Dataset::column_names)
      .def_property_readonly(
          "treatment",
          [](const Dataset& d) -> std::optional<Eigen::VectorXi> {
            return d.treatment;
          })
      .def("n", &Dataset::n)
      .def("p", &Dataset::p)
      .def("arm", &Dataset::arm);

  m.def("read_dataset_csv", &read_dataset_csv_file, py::arg("path"));
  m.def("write_dataset_csv", &write_dataset_csv_file, py::arg("dataset"),
        py::arg("path"));

  py::class_<ModelFamily>(m, "ModelFamily")
      .def(py::init(&family_from), py::arg("kind"), py::arg("sigma") = 1.0);

  py::class_<SimpleModelSpec>(m, "SimpleModelSpec")
      .def_readonly("subset", &SimpleModelSpec::subset)
      .def_readonly("coefficients", &SimpleModelSpec::coefficients);

  m.def("log_likelihood", &log_likelihood, py::arg("family"), py::arg("beta"),
        py::arg("data"));
  m.def("fit_simple_model", &fit_simple_model, py::arg("data"),
        py::arg("subset"), py::arg("family"));

  py::class_<CatalyticPrior>(m, "CatalyticPrior")
      .def_readonly("synthetic", &CatalyticPrior::synthetic)
      .def_readonly("tau", &CatalyticPrior::tau)
      .def("row_weight", &CatalyticPrior::row_weight)
      .def("combine", &CatalyticPrior::combine);

  m.def(
      "build_catalytic_prior",
      [](const Dataset& observed, double tau, int M,
         const std::string& scheme, const std::string& mode,
         const std::vector<std::vector<Eigen::Index>>& source_subsets,
         const std::string& family, double sigma, std::uint64_t seed) {
        const ModelFamily fam = family_from(family, sigma);
        SynthConfig cfg = SynthConfig::defaults_for(observed.p());
        if (tau > 0) cfg.tau = tau;
        if (M > 0) cfg.M = M;
        cfg.scheme = scheme == "joint" ? CovariateScheme::joint_resample()
                                       : CovariateScheme::marginal_resample();
        cfg.mode = mode == "stochastic" ? ResponseMode::stochastic
                                        : ResponseMode::expected_value;
        cfg.seed = seed;
        std::vector<std::vector<Eigen::Index>> subsets = source_subsets;
        if (subsets.empty()) subsets = {{0}};
        for (const auto& sub : subsets)
          cfg.sources.push_back(
              {fit_simple_model(observed, sub, fam),
               1.0 / double(subsets.size())});
        return build_catalytic_prior(observed, cfg);
      },
      py::arg("observed"), py::arg("tau") = -1.0, py::arg("m") = -1,
      py::arg("scheme") = "marginal", py::arg("mode") = "expected_value",
      py::arg("source_subsets") = std::vector<std::vector<Eigen::Index>>(),
      py::arg("family") = "bernoulli", py::arg("sigma") = 1.0,
      py::arg("seed") = 0);

  py::class_<LinearPosterior>(m, "LinearPosterior")
      .def_readonly("mean", &LinearPosterior::mean)
      .def_readonly("covariance", &LinearPosterior::covariance);

  py::class_<MapResult>(m, "MapResult")
      .def_readonly("beta_hat", &MapResult::beta_hat)
      .def_readonly("neg_hessian_at_mode", &MapResult::neg_hessian_at_mode)
      .def_readonly("converged", &MapResult::converged)
      .def_readonly("iterations", &MapResult::iterations)
      .def_readonly("final_grad_norm", &MapResult::final_grad_norm);

  m.def("fit_linear_posterior", &fit_linear_posterior, py::arg("observed"),
        py::arg("prior"), py::arg("sigma"));
  m.def(
      "fit_map",
      [](const Dataset& observed, const ModelFamily& family,
         const CatalyticPrior* prior) {
        return fit_map(observed, family, prior);
      },
      py::arg("observed"), py::arg("family"), py::arg("prior") = nullptr);
  m.def(
      "fit_cauchy_map",
      [](const Dataset& observed) { return fit_cauchy_map(observed); },
      py::arg("observed"));

  py::class_<GaussianApprox>(m, "GaussianApprox")
      .def_readonly("mean", &GaussianApprox::mean)
      .def_readonly("covariance", &GaussianApprox::covariance);

  py::class_<SampleMatrix>(m, "SampleMatrix")
      .def_readonly("draws", &SampleMatrix::draws)
      .def_readonly("acceptance_rate", &SampleMatrix::acceptance_rate);

  m.def("laplace_approx", &laplace_approx, py::arg("map_result"));
  m.def(
      "sample_posterior",
      [](const Dataset& observed, const ModelFamily& family,
         const CatalyticPrior* prior, int steps, std::uint64_t seed) {
        const MapResult map = fit_map(observed, family, prior);
        if (!map.converged)
          throw std::runtime_error("sample_posterior: MAP did not converge");
        const GaussianApprox approx = laplace_approx(map);
        const Dataset target = prior ? prior->combine(observed) : observed;
        auto log_post = [family, target](const VectorXd& b) {
          return log_likelihood(family, b, target);
        };
        return rw_metropolis(log_post, map.beta_hat, steps,
                             default_proposal_cov(approx), RngStream(seed));
      },
      py::arg("observed"), py::arg("family"), py::arg("prior") = nullptr,
      py::arg("steps") = 50000, py::arg("seed") = 0);

  py::class_<Summary>(m, "Summary")
      .def_readonly("mean", &Summary::mean)
      .def_readonly("lower", &Summary::lower)
      .def_readonly("upper", &Summary::upper);
  m.def("posterior_summary", &posterior_summary, py::arg("draws"),
        py::arg("level"));

  py::class_<EffectResult>(m, "EffectResult")
      .def_readonly("gamma_avg", &EffectResult::gamma_avg)
      .def_readonly("per_unit", &EffectResult::per_unit)
      .def_readonly("group_label", &EffectResult::group_label)
      .def_readonly("draws", &EffectResult::draws);

  m.def("log_prob_ratio", &log_prob_ratio, py::arg("x"), py::arg("beta_t"),
        py::arg("beta_c"));
  m.def(
      "avg_effect",
      [](const MatrixXd& X, const std::vector<bool>& mask, const VectorXd& bt,
         const VectorXd& bc, bool keep_per_unit, const std::string& label) {
        Mask m_(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i)
          m_[i] = mask.empty() ? true : mask[static_cast<std::size_t>(i)];
        return avg_effect(X, m_, bt, bc, keep_per_unit, label);
      },
      py::arg("covariates"), py::arg("mask") = std::vector<bool>(),
      py::arg("beta_t"), py::arg("beta_c"), py::arg("keep_per_unit") = false,
      py::arg("label") = "All");
  m.def(
      "posterior_effect_distribution",
      [](const MatrixXd& X, const std::vector<bool>& mask,
         const SampleMatrix& st, const SampleMatrix& sc,
         const std::string& label) {
        Mask m_(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i)
          m_[i] = mask.empty() ? true : mask[static_cast<std::size_t>(i)];
        return posterior_effect_distribution(X, m_, st, sc, label);
      },
      py::arg("covariates"), py::arg("mask") = std::vector<bool>(),
      py::arg("samples_t"), py::arg("samples_c"), py::arg("label") = "All");

  py::class_<JobSimSpec>(m, "JobSimSpec")
      .def_static("frozen_default", &JobSimSpec::frozen_default)
      .def_readwrite("N", &JobSimSpec::N)
      .def_readwrite("seed", &JobSimSpec::seed)
      .def_readwrite("beta_t_true", &JobSimSpec::beta_t_true)
      .def_readwrite("beta_c_true", &JobSimSpec::beta_c_true);

  py::class_<Population>(m, "Population")
      .def_readonly("observed", &Population::observed)
      .def_readonly("y_treat", &Population::y_treat)
      .def_readonly("y_control", &Population::y_control);
  m.def("simulate_population", &simulate_population, py::arg("spec"));

  py::class_<ExperimentReport>(m, "ExperimentReport")
      .def("to_csv", &ExperimentReport::to_csv)
      .def("to_json", &ExperimentReport::to_json);
  m.def(
      "run_experiment",
      [](Eigen::Index N, std::vector<int> n_grid, int replications,
         int n_prime, std::uint64_t seed, int workers) {
        ExperimentConfig cfg;
        cfg.sim = JobSimSpec::frozen_default();
        cfg.sim.N = N;
        if (!n_grid.empty()) cfg.n_grid = std::move(n_grid);
        cfg.replications = replications;
        cfg.n_prime = n_prime;
        cfg.seed = seed;
        cfg.workers = workers;
        return run_experiment(cfg);
      },
      py::arg("N") = 3200, py::arg("n_grid") = std::vector<int>(),
      py::arg("replications") = 250, py::arg("n_prime") = 500,
      py::arg("seed") = 0, py::arg("workers") = 1);

  py::class_<CertifyReport>(m, "CertifyReport")
      .def_readonly("beta_joint", &CertifyReport::beta_joint)
      .def_readonly("beta_direct", &CertifyReport::beta_direct)
      .def_readonly("objective_gap", &CertifyReport::objective_gap)
      .def_readonly("argmin_gap", &CertifyReport::argmin_gap)
      .def_readonly("local_only", &CertifyReport::local_only)
      .def("passed", &CertifyReport::passed,
           py::arg("obj_rel_tol") = 1e-8, py::arg("argmin_tol") = 1e-6);

  m.def(
      "certify_lasso",
      [](const Dataset& data, double lambda, const VectorXd& center,
         double sigma, double tau, std::uint64_t seed) {
        CertifyOptions opts;
        opts.seed = seed;
        return certify_equivalence(
            data, PenaltySpec::lasso(lambda, center, sigma, tau), opts);
      },
      py::arg("data"), py::arg("lambda_"), py::arg("center"),
      py::arg("sigma") = 1.0, py::arg("tau") = 1.0, py::arg("seed") = 0);
}
