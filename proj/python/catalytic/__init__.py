"""Catalytic prior library: synthetic-data priors, weighted-likelihood
posteriors, causal effects, and penalized-regression certification."""

from ._catalytic import (  # noqa: F401
    CatalyticPrior,
    CertifyReport,
    Dataset,
    EffectResult,
    ExperimentReport,
    GaussianApprox,
    LinearPosterior,
    MapResult,
    ModelFamily,
    Population,
    SampleMatrix,
    SimpleModelSpec,
    Summary,
    JobSimSpec,
    avg_effect,
    build_catalytic_prior,
    certify_lasso,
    fit_cauchy_map,
    fit_linear_posterior,
    fit_map,
    fit_simple_model,
    laplace_approx,
    log_likelihood,
    log_prob_ratio,
    posterior_effect_distribution,
    posterior_summary,
    read_dataset_csv,
    run_experiment,
    sample_posterior,
    simulate_population,
    write_dataset_csv,
)

__all__ = [
    "CatalyticPrior",
    "CertifyReport",
    "Dataset",
    "EffectResult",
    "ExperimentReport",
    "GaussianApprox",
    "LinearPosterior",
    "MapResult",
    "ModelFamily",
    "Population",
    "SampleMatrix",
    "SimpleModelSpec",
    "Summary",
    "JobSimSpec",
    "avg_effect",
    "build_catalytic_prior",
    "certify_lasso",
    "fit_cauchy_map",
    "fit_linear_posterior",
    "fit_map",
    "fit_simple_model",
    "laplace_approx",
    "log_likelihood",
    "log_prob_ratio",
    "posterior_effect_distribution",
    "posterior_summary",
    "read_dataset_csv",
    "run_experiment",
    "sample_posterior",
    "simulate_population",
    "write_dataset_csv",
]
