#include "catalytic/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "catalytic/effects.hpp"

namespace catalytic {

namespace {

Mask group_mask(const MatrixXd& X, const SubgroupDef& g) {
  Mask m(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (g.column < 0)
      m[i] = true;
    else
      m[i] = g.positive ? X(i, g.column) > g.threshold
                        : !(X(i, g.column) > g.threshold);
  }
  return m;
}

double logit(double q) { return std::log(q / (1.0 - q)); }

bool arm_diverged(const MapResult& r, double threshold = 1e3) {
  return !r.converged || r.beta_hat.norm() > threshold;
}

// Intercept-only or single-covariate logistic source fit, with a smoothed
// fallback when the arm response is all 0 or all 1.
SimpleModelSpec fit_source(const Dataset& arm,
                           const std::vector<Eigen::Index>& subset,
                           double tau) {
  try {
    // each candidate source model is itself fitted under an intercept-only
    // catalytic prior of the same total weight tau as the downstream prior:
    // the arm's own covariates are appended once more with response equal to
    // the arm's observed rate. This leaves the fitted level untouched,
    // shrinks the fitted slope toward zero, and keeps every cell rate away
    // from 0 and 1 (a near-empty covariate cell otherwise sends the plain
    // MLE to infinity)
    Dataset aug;
    const Eigen::Index n = arm.n();
    aug.covariates.resize(2 * n, arm.p());
    aug.covariates << arm.covariates, arm.covariates;
    aug.response.resize(2 * n);
    aug.response << arm.response, VectorXd::Constant(n, arm.response.mean());
    aug.weights.resize(2 * n);
    aug.weights << VectorXd::Ones(n),
        VectorXd::Constant(n, tau / static_cast<double>(n));
    aug.column_names = arm.column_names;
    return fit_simple_model(aug, subset, ModelFamily::bernoulli());
  } catch (const std::invalid_argument&) {
    const double count = arm.response.sum();
    const double prop =
        (count + 0.5) / (static_cast<double>(arm.n()) + 1.0);
    SimpleModelSpec spec;
    spec.family = ModelFamily::bernoulli();
    spec.subset = {0};
    spec.coefficients = VectorXd::Zero(arm.p());
    spec.coefficients[0] = logit(prop);
    return spec;
  }
}

MapResult fit_catalytic_arm(const Dataset& arm, const MatrixXd& x_star,
                            const CatalyticMethodConfig& cfg,
                            std::uint64_t seed) {
  SynthConfig sc;
  sc.M = cfg.M;
  sc.tau = cfg.tau;
  sc.scheme = CovariateScheme::fixed_matrix(x_star);
  sc.mode = ResponseMode::expected_value;
  sc.seed = seed;
  const double w = 1.0 / static_cast<double>(cfg.source_subsets.size());
  for (const auto& subset : cfg.source_subsets)
    sc.sources.push_back({fit_source(arm, subset, cfg.tau), w});
  const CatalyticPrior prior = build_catalytic_prior(arm, sc);
  return fit_map(arm, ModelFamily::bernoulli(), &prior);
}

double msdpte_of(const Dataset& test, const VectorXd& bt, const VectorXd& bc,
                 const ArmFits& benchmark) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < test.n(); ++j) {
    const VectorXd x = test.covariates.row(j);
    const double g = log_prob_ratio(x, bt, bc);
    const double g_bm = log_prob_ratio(x, benchmark.treat.beta_hat,
                                       benchmark.control.beta_hat);
    sum += (g - g_bm) * (g - g_bm);
  }
  return sum / static_cast<double>(test.n());
}

}  // namespace

const std::vector<std::string>& JobSimSpec::column_names() {
  static const std::vector<std::string> names = {
      kInterceptName, "gender",   "age35",    "hsdip",
      "nevmar",       "divwid",   "child6",   "black",
      "hispanic",     "emppre1y", "children", "earnpre1y"};
  return names;
}

void JobSimSpec::validate() const {
  if (N < 4) throw std::invalid_argument("sim spec: N too small");
  if (beta_t_true.size() != 12 || beta_c_true.size() != 12)
    throw std::invalid_argument("sim spec: coefficient vectors must be length 12");
  if (binary_prevalence.size() != 9)
    throw std::invalid_argument("sim spec: need 9 binary prevalences");
  for (Eigen::Index j = 0; j < 9; ++j)
    if (!(binary_prevalence[j] > 0.0 && binary_prevalence[j] < 1.0))
      throw std::invalid_argument("sim spec: prevalences must be in (0,1)");
  if (!(children_rate > 0.0) || !(earnings_sdlog > 0.0))
    throw std::invalid_argument("sim spec: bad distribution parameters");
}

JobSimSpec JobSimSpec::frozen_default() {
  JobSimSpec s;
  s.N = 3200;
  s.beta_t_true.resize(12);
  s.beta_c_true.resize(12);
  // frozen draws; intercepts tuned so marginal employment probabilities land
  // in the 0.70-0.85 band, where predicted-effect curves flatten out quickly
  // as the training sample grows
  s.beta_t_true << 2.50, 1.05, -0.95, 0.30, -0.15, 0.35, -1.05, -0.80, 0.95,
      0.50, -0.45, 0.15;
  s.beta_c_true << 2.15, 1.10, -1.00, 0.45, -0.20, 0.15, -1.10, -0.85, 1.00,
      0.60, -0.47, 0.18;
  s.binary_prevalence.resize(9);
  s.binary_prevalence << 0.45, 0.45, 0.50, 0.40, 0.45, 0.30, 0.35, 0.20, 0.55;
  s.children_rate = 1.5;
  s.earnings_meanlog = 0.0;
  s.earnings_sdlog = 0.75;
  s.seed = 20240801;
  return s;
}

Population simulate_population(const JobSimSpec& spec) {
  spec.validate();
  const RngStream rng(spec.seed);
  const Eigen::Index N = spec.N;
  MatrixXd X(N, 12);
  X.col(0).setOnes();

  auto cov_eng = rng.child("covariates").engine();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::poisson_distribution<int> kids(spec.children_rate);
  std::lognormal_distribution<double> earn(spec.earnings_meanlog,
                                           spec.earnings_sdlog);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < 8; ++j)
      X(i, 1 + j) = u(cov_eng) < spec.binary_prevalence[j] ? 1.0 : 0.0;
    const bool emp = u(cov_eng) < spec.binary_prevalence[8];
    X(i, 9) = emp ? 1.0 : 0.0;
    X(i, 10) = static_cast<double>(kids(cov_eng));
    // log scale bounds the leverage of the earnings tail; zero when not
    // employed, so the indicator ties to earnings > 0
    X(i, 11) = emp ? std::log1p(earn(cov_eng)) : 0.0;
  }

  auto out_eng = rng.child("outcomes").engine();
  VectorXd y1(N), y0(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    y1[i] = u(out_eng) < sigmoid(X.row(i).dot(spec.beta_t_true)) ? 1.0 : 0.0;
    y0[i] = u(out_eng) < sigmoid(X.row(i).dot(spec.beta_c_true)) ? 1.0 : 0.0;
  }

  // complete randomization: exactly floor(N/2) treated
  std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  auto assign_eng = rng.child("assignment").engine();
  std::shuffle(order.begin(), order.end(), assign_eng);
  VectorXi z = VectorXi::Zero(N);
  for (Eigen::Index k = 0; k < N / 2; ++k) z[order[static_cast<std::size_t>(k)]] = 1;

  Population pop;
  pop.observed.covariates = X;
  pop.observed.response.resize(N);
  for (Eigen::Index i = 0; i < N; ++i)
    pop.observed.response[i] = z[i] == 1 ? y1[i] : y0[i];
  pop.observed.treatment = z;
  pop.observed.weights = VectorXd::Ones(N);
  pop.observed.column_names = JobSimSpec::column_names();
  pop.y_treat = y1;
  pop.y_control = y0;
  return pop;
}

ArmFits benchmark_fit(const Dataset& full) {
  ArmFits fits;
  fits.treat = fit_map(full.arm(1), ModelFamily::bernoulli(), nullptr);
  fits.control = fit_map(full.arm(0), ModelFamily::bernoulli(), nullptr);
  if (arm_diverged(fits.treat) || arm_diverged(fits.control))
    throw std::runtime_error(
        "benchmark_fit: flat prior diverged on the full data");
  return fits;
}

std::pair<Dataset, Dataset> draw_train_test(const Dataset& full, int n,
                                            int n_prime,
                                            const RngStream& rng) {
  if (n % 2 != 0 || n_prime % 2 != 0)
    throw std::invalid_argument("draw_train_test: n and n_prime must be even");
  if (!full.treatment)
    throw std::invalid_argument("draw_train_test: treatment required");

  std::vector<Eigen::Index> rows_train, rows_test;
  for (int z = 0; z <= 1; ++z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < full.n(); ++i)
      if ((*full.treatment)[i] == z) idx.push_back(i);
    const std::size_t need =
        static_cast<std::size_t>(n / 2 + n_prime / 2);
    if (idx.size() < need)
      throw std::invalid_argument(
          "draw_train_test: arm too small for requested sizes");
    auto eng = rng.child("arm", static_cast<std::uint64_t>(z)).engine();
    std::shuffle(idx.begin(), idx.end(), eng);
    for (int k = 0; k < n / 2; ++k) rows_train.push_back(idx[static_cast<std::size_t>(k)]);
    for (int k = 0; k < n_prime / 2; ++k)
      rows_test.push_back(idx[static_cast<std::size_t>(n / 2 + k)]);
  }

  auto take = [&](const std::vector<Eigen::Index>& rows) {
    Dataset d;
    d.covariates.resize(static_cast<Eigen::Index>(rows.size()), full.p());
    d.response.resize(static_cast<Eigen::Index>(rows.size()));
    d.weights.resize(static_cast<Eigen::Index>(rows.size()));
    d.treatment = VectorXi(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto dst = static_cast<Eigen::Index>(k);
      d.covariates.row(dst) = full.covariates.row(rows[k]);
      d.response[dst] = full.response[rows[k]];
      d.weights[dst] = full.weights[rows[k]];
      (*d.treatment)[dst] = (*full.treatment)[rows[k]];
    }
    d.column_names = full.column_names;
    return d;
  };
  return {take(rows_train), take(rows_test)};
}

std::string method_name(Method m) {
  switch (m) {
    case Method::flat: return "flat";
    case Method::cauchy: return "cauchy";
    case Method::catalytic: return "catalytic";
  }
  return "?";
}

std::vector<SubgroupDef> default_subgroups() {
  return {
      {"All", -1, true, 0.5},
      {"hsdip+", 3, true, 0.5},   {"hsdip-", 3, false, 0.5},
      {"age>35", 2, true, 0.5},   {"age<=35", 2, false, 0.5},
      {"nevmar+", 4, true, 0.5},  {"nevmar-", 4, false, 0.5},
      {"divwid+", 5, true, 0.5},  {"divwid-", 5, false, 0.5},
  };
}

std::vector<ReplicationResult> run_replication(
    const Dataset& train, const Dataset& test, const ArmFits& benchmark,
    const std::vector<Method>& methods, const CatalyticMethodConfig& cata,
    const RngStream& rng) {
  if (arm_diverged(benchmark.treat) || arm_diverged(benchmark.control))
    throw std::invalid_argument("run_replication: benchmark not converged");

  const Dataset train_t = train.arm(1);
  const Dataset train_c = train.arm(0);
  const auto groups = default_subgroups();

  // one synthetic covariate draw shared by both arms
  MatrixXd x_star;
  if (std::find(methods.begin(), methods.end(), Method::catalytic) !=
      methods.end()) {
    Dataset cov_only = train;
    cov_only.treatment.reset();
    x_star = gen_covariates(cov_only, CovariateScheme::marginal_resample(),
                            cata.M, rng.child("xstar"));
  }

  std::vector<ReplicationResult> out;
  for (Method m : methods) {
    MapResult fit_t, fit_c;
    switch (m) {
      case Method::flat:
        fit_t = fit_map(train_t, ModelFamily::bernoulli(), nullptr);
        fit_c = fit_map(train_c, ModelFamily::bernoulli(), nullptr);
        break;
      case Method::cauchy:
        fit_t = fit_cauchy_map(train_t);
        fit_c = fit_cauchy_map(train_c);
        break;
      case Method::catalytic:
        fit_t = fit_catalytic_arm(train_t, x_star, cata,
                                  rng.child("seed-t").state());
        fit_c = fit_catalytic_arm(train_c, x_star, cata,
                                  rng.child("seed-c").state());
        break;
    }

    ReplicationResult r;
    r.n = static_cast<int>(train.n());
    r.method = m;
    r.diverged = arm_diverged(fit_t) || arm_diverged(fit_c);
    for (const auto& g : groups) {
      const Mask mask = group_mask(train.covariates, g);
      if (mask.count() == 0) continue;  // subgroup absent in this subsample
      r.gamma_avg_by_group[g.label] =
          avg_effect(train.covariates, mask, fit_t.beta_hat, fit_c.beta_hat)
              .gamma_avg;
    }
    r.msdpte = msdpte_of(test, fit_t.beta_hat, fit_c.beta_hat, benchmark);
    out.push_back(std::move(r));
  }
  return out;
}

std::string ExperimentReport::cell_key(const std::string& group, int n,
                                       Method m) {
  return group + "|" + std::to_string(n) + "|" + method_name(m);
}

std::string ExperimentReport::curve_key(int n, Method m) {
  return std::to_string(n) + "|" + method_name(m);
}

ExperimentReport aggregate(
    const std::vector<std::vector<ReplicationResult>>& results,
    const std::vector<SubgroupDef>& groups,
    const std::map<std::string, double>& benchmark_gamma) {
  if (results.empty())
    throw std::invalid_argument("aggregate: no replication results");

  ExperimentReport rep;
  rep.benchmark_gamma = benchmark_gamma;
  for (const auto& g : groups) rep.groups.push_back(g.label);

  // collect squared deviations and msdpte per (group, n, method)
  std::map<std::string, std::vector<double>> sq_dev;
  std::map<std::string, std::vector<double>> curves;
  std::map<std::string, int> div_count;
  for (const auto& batch : results) {
    for (const auto& r : batch) {
      if (std::find(rep.n_grid.begin(), rep.n_grid.end(), r.n) ==
          rep.n_grid.end())
        rep.n_grid.push_back(r.n);
      if (std::find(rep.methods.begin(), rep.methods.end(), r.method) ==
          rep.methods.end())
        rep.methods.push_back(r.method);
      for (const auto& [label, gamma] : r.gamma_avg_by_group) {
        const auto it = benchmark_gamma.find(label);
        if (it == benchmark_gamma.end()) continue;
        const double d = gamma - it->second;
        const std::string key = ExperimentReport::cell_key(label, r.n, r.method);
        sq_dev[key].push_back(d * d);
        if (r.diverged) ++div_count[key];
      }
      curves[ExperimentReport::curve_key(r.n, r.method)].push_back(r.msdpte);
    }
  }
  std::sort(rep.n_grid.begin(), rep.n_grid.end());

  auto mean_se = [](const std::vector<double>& v) {
    const double mean =
        std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double se = v.size() > 1
                          ? std::sqrt(ss / static_cast<double>(v.size() - 1) /
                                      static_cast<double>(v.size()))
                          : 0.0;
    return std::make_pair(mean, se);
  };

  for (const auto& [key, devs] : sq_dev) {
    CellStat c;
    std::tie(c.mse, c.se) = mean_se(devs);
    c.replications = static_cast<int>(devs.size());
    const auto it = div_count.find(key);
    c.diverged = it == div_count.end() ? 0 : it->second;
    rep.cells[key] = c;
  }
  for (const auto& [key, vals] : curves) rep.msdpte[key] = mean_se(vals);
  return rep;
}

namespace {
std::string clip_display(double v, double clip) {
  if (v > clip) return "> " + std::to_string(static_cast<int>(clip));
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}
}  // namespace

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  os << "Group,n";
  for (Method m : methods)
    os << "," << method_name(m) << " MSE," << method_name(m) << " SE";
  os << "\n";
  for (const auto& g : groups) {
    for (int n : n_grid) {
      os << g << "," << n;
      for (Method m : methods) {
        const auto it = cells.find(cell_key(g, n, m));
        if (it == cells.end()) {
          os << ",,";
        } else {
          os << "," << clip_display(it->second.mse, display_clip) << ","
             << clip_display(it->second.se, display_clip);
        }
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string ExperimentReport::to_json() const {
  nlohmann::json j;
  j["estimator"] = estimator;
  j["display_clip"] = display_clip;
  j["groups"] = groups;
  j["n_grid"] = n_grid;
  for (Method m : methods) j["methods"].push_back(method_name(m));
  for (const auto& [k, v] : benchmark_gamma) j["benchmark_gamma"][k] = v;
  for (const auto& [k, c] : cells) {
    j["cells"][k] = {{"mse", c.mse},
                     {"se", c.se},
                     {"diverged", c.diverged},
                     {"replications", c.replications},
                     {"display", clip_display(c.mse, display_clip)}};
  }
  for (const auto& [k, v] : msdpte)
    j["msdpte"][k] = {{"mean", v.first}, {"se", v.second}};
  return j.dump(2);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const Population pop = simulate_population(config.sim);
  const ArmFits bm = benchmark_fit(pop.observed);

  const auto groups = default_subgroups();
  std::map<std::string, double> bm_gamma;
  for (const auto& g : groups) {
    const Mask mask = group_mask(pop.observed.covariates, g);
    bm_gamma[g.label] = avg_effect(pop.observed.covariates, mask,
                                   bm.treat.beta_hat, bm.control.beta_hat)
                            .gamma_avg;
  }

  const RngStream master(config.seed);
  struct Task {
    int n;
    int rep;
  };
  std::vector<Task> tasks;
  for (int n : config.n_grid)
    for (int r = 0; r < config.replications; ++r) tasks.push_back({n, r});

  std::vector<std::vector<ReplicationResult>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const auto [n, r] = tasks[t];
      const RngStream rng = master.child("n", static_cast<std::uint64_t>(n))
                                .child("rep", static_cast<std::uint64_t>(r));
      auto [train, test] =
          draw_train_test(pop.observed, n, config.n_prime, rng.child("draw"));
      results[t] = run_replication(train, test, bm, config.methods,
                                   config.cata, rng.child("fit"));
    }
  };
  const int workers = std::max(1, config.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ExperimentReport rep = aggregate(results, groups, bm_gamma);
  rep.estimator = "map";
  return rep;
}

}  // namespace catalytic
