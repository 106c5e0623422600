// Acceptance suite: 12 numbered criteria, one PASS/FAIL line each.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "catalytic/bridge.hpp"
#include "catalytic/effects.hpp"
#include "catalytic/experiment.hpp"
#include "catalytic/posterior.hpp"
#include "helpers.hpp"

using namespace catalytic;
using testutil::random_matrix;
using testutil::random_vector;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Dataset centered_instance(std::mt19937_64& eng, Eigen::Index n,
                          Eigen::Index p, double noise = 0.5) {
  MatrixXd X = random_matrix(eng, n, p);
  for (Eigen::Index j = 0; j < p; ++j) X.col(j).array() -= X.col(j).mean();
  VectorXd y = X * random_vector(eng, p) + noise * random_vector(eng, n);
  y.array() -= y.mean();
  return Dataset::make(std::move(X), std::move(y));
}

// Completely separated logistic data built from mirrored pairs: each y=1
// row (1, a, c) has a y=0 twin (1, -a, c); the smallest margin a = 0.01
// forces the flat-prior mode to very large norm.
Dataset separated_dataset() {
  const int pairs = 20;
  MatrixXd X(2 * pairs, 3);
  VectorXd y(2 * pairs);
  std::mt19937_64 eng(99);
  std::uniform_real_distribution<double> ua(0.2, 2.0), uc(0.2, 2.0);
  for (int k = 0; k < pairs; ++k) {
    const double a = k == 0 ? 0.01 : ua(eng);
    const double c = uc(eng);
    X.row(2 * k) << 1.0, a, c;
    y[2 * k] = 1.0;
    X.row(2 * k + 1) << 1.0, -a, c;
    y[2 * k + 1] = 0.0;
  }
  return Dataset::make(X, y, {kInterceptName, "x1", "x2"});
}

// ---------------------------------------------------------------- criterion 1
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 eng(1001);
  std::uniform_int_distribution<int> nd(10, 30), pd(2, 8);
  double worst_mean = 0.0, worst_cov = 0.0;
  bool ok = true;
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = nd(eng);
    const Eigen::Index p = std::min<Eigen::Index>(pd(eng), n - 1);
    const Dataset d = testutil::random_dataset(eng, n, p, false);
    const double sigma = 1.3;
    SynthConfig cfg = SynthConfig::defaults_for(p);
    cfg.M = 400;
    cfg.seed = 5000 + t;
    cfg.mode = ResponseMode::stochastic;
    cfg.sources.push_back(
        {fit_simple_model(d, {0}, ModelFamily::gaussian(sigma)), 1.0});
    const CatalyticPrior prior = build_catalytic_prior(d, cfg);
    const LinearPosterior post = fit_linear_posterior(d, prior, sigma);

    const Dataset combined = prior.combine(d);
    const ModelFamily fam = ModelFamily::gaussian(sigma);
    auto neg = [&](const VectorXd& b) {
      return -log_likelihood(fam, b, combined);
    };
    auto neg_grad = [&](const VectorXd& b) {
      return VectorXd(-log_likelihood_grad_hess(fam, b, combined).gradient);
    };
    VectorXd opt = testutil::bfgs_minimize(neg, neg_grad,
                                           VectorXd::Zero(p), 1e-11);
    // polish with damped Newton steps on the finite-difference Hessian so the
    // oracle is limited by arithmetic, not by the quasi-Newton stopping rule
    for (int it = 0; it < 3; ++it) {
      const MatrixXd Hp = testutil::fd_jacobian(neg_grad, opt, 1e-5);
      opt -= Hp.ldlt().solve(neg_grad(opt));
    }
    worst_mean = std::max(worst_mean, (opt - post.mean).cwiseAbs().maxCoeff());

    const MatrixXd H = testutil::fd_jacobian(neg_grad, opt, 1e-5);
    const MatrixXd cov = H.inverse();  // independent path: explicit inverse
    worst_cov = std::max(worst_cov,
                         (cov - post.covariance).cwiseAbs().maxCoeff());
  }
  const double elapsed = seconds_since(t0);
  ok = worst_mean <= 1e-8 && worst_cov <= 1e-6 && elapsed < 10.0;
  std::ostringstream msg;
  msg << "closed-form linear posterior vs generic optimizer on 50 instances"
      << " (max mean gap " << worst_mean << ", max cov gap " << worst_cov
      << ", " << elapsed << " s)";
  report(1, ok, msg.str());
}

// ---------------------------------------------------------------- criterion 2
void criterion_2() {
  std::mt19937_64 eng(1002);
  const Eigen::Index n = 20, p = 4;
  MatrixXd X = random_matrix(eng, n, p);
  for (Eigen::Index j = 0; j < p; ++j) X.col(j).array() -= X.col(j).mean();
  VectorXd y = X * random_vector(eng, p) + 0.4 * random_vector(eng, n);
  y.array() -= y.mean();
  const Dataset d = Dataset::make(X, y);
  const double tau = 2.7;

  CatalyticPrior iso;
  iso.tau = tau;
  iso.synthetic =
      Dataset::make(std::sqrt(double(p)) * MatrixXd::Identity(p, p),
                    VectorXd::Zero(p), {}, VectorXd::Constant(p, tau / p));
  const VectorXd ridge =
      (X.transpose() * X + tau * MatrixXd::Identity(p, p))
          .ldlt()
          .solve(X.transpose() * y);
  const double gap_iso =
      (fit_linear_posterior(d, iso, 1.0).mean - ridge).cwiseAbs().maxCoeff();

  const Eigen::Index M = 60;
  const MatrixXd Xs = random_matrix(eng, M, p);
  const VectorXd beta0 = random_vector(eng, p);
  CatalyticPrior gen;
  gen.tau = tau;
  gen.synthetic =
      Dataset::make(Xs, Xs * beta0, {}, VectorXd::Constant(M, tau / M));
  const MatrixXd Delta = (tau / double(M)) * Xs.transpose() * Xs;
  const VectorXd gridge = (X.transpose() * X + Delta)
                              .ldlt()
                              .solve(X.transpose() * y + Delta * beta0);
  const double gap_gen =
      (fit_linear_posterior(d, gen, 1.0).mean - gridge).cwiseAbs().maxCoeff();

  std::ostringstream msg;
  msg << "ridge reductions (identity gap " << gap_iso << ", generalized gap "
      << gap_gen << ")";
  report(2, gap_iso <= 1e-10 && gap_gen <= 1e-10, msg.str());
}

// ---------------------------------------------------------------- criterion 3
void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 eng(1003);
  bool ok = true;
  std::ostringstream msg;
  msg << "penalty-equivalence certification:";

  auto run_kind = [&](const std::string& name, auto make_spec) {
    double worst_obj = 0.0, worst_arg = 0.0;
    bool kind_ok = true;
    for (int t = 0; t < 20; ++t) {
      const Dataset d = centered_instance(eng, 30, 8);
      const VectorXd center = 0.3 * random_vector(eng, 8);
      const PenaltySpec spec = make_spec(center);
      CertifyOptions opts;
      opts.seed = 7000 + t;
      const CertifyReport rep = certify_equivalence(d, spec, opts);
      worst_obj = std::max(worst_obj, rep.objective_gap);
      worst_arg = std::max(worst_arg, rep.argmin_gap);
      if (!rep.passed()) kind_ok = false;
    }
    msg << " " << name << "(obj " << worst_obj << ", arg " << worst_arg << ")";
    ok = ok && kind_ok;
  };

  run_kind("lasso", [&](const VectorXd& c) {
    return PenaltySpec::lasso(1.0, c, 1.0, 2.0);
  });
  run_kind("enet", [&](const VectorXd& c) {
    return PenaltySpec::elastic_net(1.0, 0.2 * c, c, 1.0, 2.0);
  });
  run_kind("group", [&](const VectorXd& c) {
    std::vector<std::vector<Eigen::Index>> groups = {{0, 1, 2}, {3, 4},
                                                     {5, 6, 7}};
    std::vector<MatrixXd> metrics;
    for (const auto& g : groups) {
      const Eigen::Index k = static_cast<Eigen::Index>(g.size());
      const MatrixXd A = random_matrix(eng, k, k);
      metrics.push_back(A * A.transpose() + MatrixXd::Identity(k, k));
    }
    return PenaltySpec::group_lasso(1.0, groups, metrics, c, 1.0, 2.0);
  });
  run_kind("lq(r=3)", [&](const VectorXd& c) {
    return PenaltySpec::lq(1.0, 3.0, c, 1.0, 2.0);
  });

  // nonconvex r = 1/3: local-only flag plus multi-start consistency
  int consistent = 0;
  bool flagged = true;
  for (int t = 0; t < 5; ++t) {
    const Dataset d = centered_instance(eng, 30, 8);
    const PenaltySpec spec =
        PenaltySpec::lq(1.0, 1.0 / 3.0, 0.3 * random_vector(eng, 8), 1.0, 2.0);
    CertifyOptions opts;
    opts.seed = 8000 + t;
    const CertifyReport rep = certify_equivalence(d, spec, opts);
    if (!rep.local_only) flagged = false;
    // consistency: the largest cluster of starts agreeing on one local
    // objective value must contain at least 3 of the 5 starts
    int largest = 0;
    for (double a : rep.start_objectives) {
      int near = 0;
      for (double v : rep.start_objectives)
        if (std::abs(v - a) <= 1e-6 * (1.0 + std::abs(a))) ++near;
      largest = std::max(largest, near);
    }
    if (largest >= 3) ++consistent;
  }
  ok = ok && flagged && consistent == 5;
  const double elapsed = seconds_since(t0);
  msg << " lq(r=1/3) local-only with >=3/5 start agreement in " << consistent
      << "/5 instances; " << elapsed << " s";
  report(3, ok && elapsed < 60.0, msg.str());
}

// ---------------------------------------------------------------- criterion 4
void criterion_4() {
  std::mt19937_64 eng(1004);
  std::uniform_real_distribution<double> ud(0.05, 2.0), ul(0.2, 2.0);
  struct Task {
    double d, lambda, tau, sigma, r;
  };
  std::vector<Task> tasks;
  for (const double r : {1.0 / 3.0, 1.0, 3.0})
    for (int t = 0; t < 100; ++t)
      tasks.push_back({ud(eng), ul(eng), ul(eng) + 0.5, 1.0, r});

  std::vector<double> s_gap(tasks.size()), o_gap(tasks.size());
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const Task& tk = tasks[k];
      const double a = tk.tau * tk.d * tk.d / (2.0 * tk.sigma * tk.sigma);
      const double b = tk.lambda / tk.tau;
      auto phi = [&](double s) { return a / s + b * std::pow(s, tk.r); };
      const double grid_s = testutil::grid_min_scale(phi);
      PenaltySpec spec =
          PenaltySpec::lq(tk.lambda, tk.r, VectorXd::Zero(1), tk.sigma, tk.tau);
      VectorXd beta(1);
      beta << tk.d;
      const double closed_s = profile_scales(beta, spec)[0];
      s_gap[k] = std::abs(closed_s - grid_s);
      o_gap[k] = std::abs(phi(closed_s) - phi(grid_s));
    }
  };
  const unsigned W = 4;
  std::vector<std::thread> threads;
  const std::size_t chunk = (tasks.size() + W - 1) / W;
  for (unsigned w = 0; w < W; ++w)
    threads.emplace_back(work, w * chunk,
                         std::min(tasks.size(), (w + 1) * chunk));
  for (auto& th : threads) th.join();

  double worst_s = 0.0, worst_o = 0.0;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    worst_s = std::max(worst_s, s_gap[k]);
    worst_o = std::max(worst_o, o_gap[k]);
  }
  std::ostringstream msg;
  msg << "profile_scales vs 1e-4 grid oracle, 300 coordinates (max s gap "
      << worst_s << ", max objective gap " << worst_o << ")";
  report(4, worst_s <= 1e-3 && worst_o <= 1e-6, msg.str());
}

// ---------------------------------------------------------------- criterion 5
void criterion_5() {
  std::mt19937_64 eng(1005);
  const Eigen::Index n = 40, p = 3, M = 30;
  double worst_lin = 0.0, worst_log = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const MatrixXd X = random_matrix(eng, n, p);
    const MatrixXd Xs = random_matrix(eng, M, p);
    MatrixXd A = random_matrix(eng, p, p);
    A += 3.0 * MatrixXd::Identity(p, p);
    for (const bool logistic : {false, true}) {
      VectorXd y(n);
      const VectorXd bt = random_vector(eng, p, 0.5);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double eta = X.row(i).dot(bt);
        y[i] = logistic ? (u(eng) < sigmoid(eta) ? 1.0 : 0.0) : eta;
      }
      const ModelFamily fam =
          logistic ? ModelFamily::bernoulli() : ModelFamily::gaussian(1.0);
      auto fit_with = [&](const MatrixXd& Xo, const MatrixXd& Xsyn) {
        const Dataset data = Dataset::make(Xo, y);
        SynthConfig cfg;
        cfg.M = static_cast<int>(M);
        cfg.tau = double(p);
        cfg.scheme = CovariateScheme::fixed_matrix(Xsyn);
        cfg.mode = ResponseMode::expected_value;
        cfg.sources.push_back({fit_simple_model(data, {0, 1, 2}, fam), 1.0});
        const CatalyticPrior prior = build_catalytic_prior(data, cfg);
        return fit_map(data, fam, &prior).beta_hat;
      };
      const VectorXd base = fit_with(X, Xs);
      const VectorXd transformed = fit_with(X * A, Xs * A);
      const double gap =
          (transformed - A.partialPivLu().solve(base)).cwiseAbs().maxCoeff();
      (logistic ? worst_log : worst_lin) =
          std::max(logistic ? worst_log : worst_lin, gap);
    }
  }
  std::ostringstream msg;
  msg << "affine invariance over 20 transforms (linear " << worst_lin
      << ", logistic " << worst_log << ")";
  report(5, worst_lin <= 1e-8 && worst_log <= 1e-6, msg.str());
}

// ---------------------------------------------------------------- criterion 6
void criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset d = separated_dataset();
  const MapResult flat = fit_map(d, ModelFamily::bernoulli(), nullptr);
  SynthConfig cfg = SynthConfig::defaults_for(d.p());
  cfg.seed = 17;
  cfg.sources.push_back(
      {fit_simple_model(d, {0}, ModelFamily::bernoulli()), 1.0});
  const CatalyticPrior prior = build_catalytic_prior(d, cfg);
  const MapResult cata = fit_map(d, ModelFamily::bernoulli(), &prior);
  const double elapsed = seconds_since(t0);
  std::ostringstream msg;
  msg << "separation: flat ||beta|| = " << flat.beta_hat.norm()
      << " (diverged), catalytic grad " << cata.final_grad_norm << " in "
      << elapsed << " s";
  report(6,
         !flat.converged && flat.beta_hat.norm() > 1e3 && cata.converged &&
             cata.final_grad_norm <= 1e-8 && elapsed < 1.0,
         msg.str());
}

// ---------------------------------------------------------------- criterion 7
void criterion_7() {
  std::mt19937_64 eng(1007);
  const Dataset d = testutil::random_dataset(eng, 120, 3, true);
  const auto simple = fit_simple_model(d, {0}, ModelFamily::bernoulli());
  auto prior_with_tau = [&](double tau) {
    SynthConfig cfg = SynthConfig::defaults_for(3);
    cfg.tau = tau;
    cfg.seed = 4;
    cfg.sources.push_back({simple, 1.0});
    return build_catalytic_prior(d, cfg);
  };
  const CatalyticPrior big = prior_with_tau(1e6);
  const MapResult bm = fit_map(d, ModelFamily::bernoulli(), &big);
  const double gap_big =
      (bm.beta_hat - simple.coefficients).cwiseAbs().maxCoeff();
  const CatalyticPrior tiny = prior_with_tau(1e-6);
  // synthetic rows of weight tau/M = 2.5e-9 put a rounding floor on the
  // combined gradient just above 1e-8, so loosen the tolerance for this fit
  FitOptions tiny_opts;
  tiny_opts.grad_tol = 1e-7;
  const MapResult tm = fit_map(d, ModelFamily::bernoulli(), &tiny, tiny_opts);
  const MapResult mle = fit_map(d, ModelFamily::bernoulli(), nullptr);
  const double gap_tiny = (tm.beta_hat - mle.beta_hat).cwiseAbs().maxCoeff();
  std::ostringstream msg;
  msg << "shrinkage limits (tau=1e6 gap " << gap_big << ", tau=1e-6 gap "
      << gap_tiny << ")";
  report(7,
         bm.converged && tm.converged && mle.converged && gap_big <= 1e-3 &&
             gap_tiny <= 1e-6,
         msg.str());
}

// ---------------------------------------------------------------- criterion 8
void criterion_8() {
  std::mt19937_64 eng(1008);
  bool ident_ok = true;
  for (int t = 0; t < 50; ++t) {
    const VectorXd x = random_vector(eng, 4);
    const VectorXd a = random_vector(eng, 4);
    const VectorXd b = random_vector(eng, 4);
    if (log_prob_ratio(x, a, b) != -log_prob_ratio(x, b, a)) ident_ok = false;
  }
  const MatrixXd X = random_matrix(eng, 60, 4);
  const VectorXd bt = random_vector(eng, 4), bc = random_vector(eng, 4);
  Mask all = Mask::Constant(60, true), ga = Mask::Constant(60, false),
       gb = Mask::Constant(60, false);
  for (int i = 0; i < 60; ++i) (i % 4 == 0 ? ga : gb)[i] = true;
  const double overall = avg_effect(X, all, bt, bc).gamma_avg;
  const double recomb = (double(ga.count()) * avg_effect(X, ga, bt, bc).gamma_avg +
                         double(gb.count()) * avg_effect(X, gb, bt, bc).gamma_avg) /
                        60.0;
  if (std::abs(overall - recomb) > 1e-12) ident_ok = false;

  // full pipeline on a simulated population
  JobSimSpec spec = JobSimSpec::frozen_default();
  spec.N = 3000;
  const Population pop = simulate_population(spec);
  const Dataset& d = pop.observed;
  SampleMatrix draws[2];
  GaussianApprox approx[2];
  for (int z = 0; z < 2; ++z) {
    Dataset arm = d.arm(z);
    arm.treatment.reset();
    SynthConfig cfg = SynthConfig::defaults_for(arm.p());
    cfg.tau = 12.0;
    cfg.M = 400;
    cfg.seed = 900 + z;
    cfg.sources.push_back(
        {fit_simple_model(arm, {0}, ModelFamily::bernoulli()), 1.0});
    const CatalyticPrior prior = build_catalytic_prior(arm, cfg);
    const MapResult map = fit_map(arm, ModelFamily::bernoulli(), &prior);
    approx[z] = laplace_approx(map);
    const Dataset combined = prior.combine(arm);
    auto log_post = [&combined](const VectorXd& b) {
      return log_likelihood(ModelFamily::bernoulli(), b, combined);
    };
    draws[z] = rw_metropolis(log_post, map.beta_hat, 50000,
                             default_proposal_cov(approx[z]),
                             RngStream(77).child("arm", z));
  }
  const Mask every = Mask::Constant(d.n(), true);
  const EffectResult eff = posterior_effect_distribution(
      d.covariates, every, draws[1], draws[0]);
  const double laplace_gamma =
      avg_effect(d.covariates, every, approx[1].mean, approx[0].mean).gamma_avg;
  const Eigen::Index T = eff.draws.size();
  const double m = eff.draws.mean();
  const double sd =
      std::sqrt((eff.draws.array() - m).square().sum() / double(T - 1));
  const double mcse = sd / std::sqrt(double(T) / 4.0);
  const double gap = std::abs(m - laplace_gamma);
  std::ostringstream msg;
  msg << "causal layer: identities exact; MCMC gamma mean vs Laplace gap "
      << gap << " (3 MCSE = " << 3.0 * mcse << ")";
  report(8, ident_ok && gap <= 3.0 * mcse, msg.str());
}

// ---------------------------------------------------- criteria 9-12 (shared)
ExperimentConfig main_config() {
  ExperimentConfig cfg;
  cfg.sim = JobSimSpec::frozen_default();
  cfg.n_grid = {100, 200, 400, 800, 1600};
  cfg.replications = 250;
  cfg.n_prime = 500;
  cfg.seed = 2025;
  cfg.workers = 4;
  return cfg;
}

ExperimentConfig mixture_config(std::vector<std::vector<Eigen::Index>> subs) {
  ExperimentConfig cfg;
  cfg.sim = JobSimSpec::frozen_default();
  cfg.n_grid = {100};
  cfg.replications = 250;
  cfg.n_prime = 500;
  cfg.methods = {Method::catalytic};
  cfg.cata.source_subsets = std::move(subs);
  cfg.seed = 2025;
  cfg.workers = 4;
  return cfg;
}

void criteria_9_to_12() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = main_config();
  const ExperimentReport rep = run_experiment(cfg);
  const double main_elapsed = seconds_since(t0);

  // criterion 9: ordering at n in {100, 200} plus flat divergence and
  // monotone-within-1-SE decay for every method
  auto cell = [&](int n, Method m) -> const CellStat& {
    return rep.cells.at(ExperimentReport::cell_key("All", n, m));
  };
  bool order_ok = true;
  for (const int n : {100, 200}) {
    const double cat = cell(n, Method::catalytic).mse;
    const double cau = cell(n, Method::cauchy).mse;
    const double fla = cell(n, Method::flat).mse;
    if (!(cat < cau && cau < fla)) order_ok = false;
  }
  const bool diverged_ok = cell(100, Method::flat).diverged >= 1;
  bool monotone_ok = true;
  for (const Method m : {Method::flat, Method::cauchy, Method::catalytic}) {
    for (std::size_t k = 1; k < cfg.n_grid.size(); ++k) {
      const CellStat& prev = cell(cfg.n_grid[k - 1], m);
      const CellStat& cur = cell(cfg.n_grid[k], m);
      if (cur.mse > prev.mse + prev.se + cur.se) monotone_ok = false;
    }
  }
  {
    std::ostringstream msg;
    msg << "experiment pattern: ordering "
        << (order_ok ? "holds" : "VIOLATED") << ", flat divergences at n=100: "
        << cell(100, Method::flat).diverged << ", monotone "
        << (monotone_ok ? "holds" : "VIOLATED") << "; " << main_elapsed
        << " s";
    report(9, order_ok && diverged_ok && monotone_ok && main_elapsed < 900.0,
           msg.str());
  }

  // criterion 10: MSDPTE ordering at n=100 and convergence at n=1600
  auto curve = [&](int n, Method m) {
    return rep.msdpte.at(ExperimentReport::curve_key(n, m));
  };
  const double mt100_cat = curve(100, Method::catalytic).first;
  const double mt100_cau = curve(100, Method::cauchy).first;
  const double mt100_fla = curve(100, Method::flat).first;
  bool conv_ok = true;
  for (const Method m : {Method::flat, Method::cauchy, Method::catalytic})
    if (!(curve(1600, m).first < 0.01)) conv_ok = false;
  {
    std::ostringstream msg;
    msg << "MSDPTE: n=100 catalytic " << mt100_cat << " <= cauchy "
        << mt100_cau << " <= flat " << mt100_fla << "; all < 0.01 at n=1600 "
        << (conv_ok ? "holds" : "VIOLATED");
    report(10,
           mt100_cat <= mt100_cau && mt100_cau <= mt100_fla && conv_ok,
           msg.str());
  }

  // criterion 11: equal-weight five-model mixture near the best single model
  const std::vector<std::vector<Eigen::Index>> singles = {
      {0}, {0, 3}, {0, 5}, {0, 9}, {0, 11}};
  double best_single = std::numeric_limits<double>::infinity();
  double best_single_se = 0.0;
  for (const auto& sub : singles) {
    const ExperimentReport r = run_experiment(mixture_config({sub}));
    const auto [m, se] =
        r.msdpte.at(ExperimentReport::curve_key(100, Method::catalytic));
    if (m < best_single) {
      best_single = m;
      best_single_se = se;
    }
  }
  const ExperimentConfig mix_cfg = mixture_config(singles);
  const ExperimentReport mix = run_experiment(mix_cfg);
  const auto [mix_m, mix_se] =
      mix.msdpte.at(ExperimentReport::curve_key(100, Method::catalytic));
  {
    std::ostringstream msg;
    msg << "mixture MSDPTE " << mix_m << " vs best single " << best_single
        << " (+1 SE = " << best_single + best_single_se + mix_se << ")";
    report(11, mix_m <= best_single + best_single_se + mix_se, msg.str());
  }

  // criterion 12: byte-identical reruns of the same seeds
  ExperimentConfig again = cfg;
  again.workers = 2;  // different schedule must not change the bytes
  const ExperimentReport rep2 = run_experiment(again);
  const ExperimentReport mix2 = run_experiment(mix_cfg);
  const bool identical =
      rep.to_json() == rep2.to_json() && mix.to_json() == mix2.to_json();
  report(12, identical, "determinism: reruns byte-identical");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criteria_9_to_12();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 12 criteria passed\n");
  return 0;
}
