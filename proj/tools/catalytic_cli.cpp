// Command-line frontend: thin wrappers over the library with JSON configs.
// Exit codes: 0 success, 1 usage/config error, 2 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "catalytic/bridge.hpp"
#include "catalytic/csv.hpp"
#include "catalytic/effects.hpp"
#include "catalytic/experiment.hpp"
#include "catalytic/posterior.hpp"

using nlohmann::json;
using namespace catalytic;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

std::string env_or(const std::string& suffix, const std::string& fallback) {
  const std::string name = "CATALYTIC_" + suffix;
  const char* v = std::getenv(name.c_str());
  return v ? std::string(v) : fallback;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j;
  in >> j;
  return j;
}

VectorXd json_vector(const json& j) {
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json vector_json(const VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

json matrix_json_rowmajor(const MatrixXd& m) {
  json j = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) j.push_back(m(i, k));
  return j;
}

JobSimSpec parse_sim_spec(const json& j) {
  JobSimSpec s = JobSimSpec::frozen_default();
  if (j.contains("N")) s.N = j["N"].get<Eigen::Index>();
  if (j.contains("beta_t_true")) s.beta_t_true = json_vector(j["beta_t_true"]);
  if (j.contains("beta_c_true")) s.beta_c_true = json_vector(j["beta_c_true"]);
  if (j.contains("binary_prevalence"))
    s.binary_prevalence = json_vector(j["binary_prevalence"]);
  if (j.contains("children_rate")) s.children_rate = j["children_rate"];
  if (j.contains("earnings_meanlog")) s.earnings_meanlog = j["earnings_meanlog"];
  if (j.contains("earnings_sdlog")) s.earnings_sdlog = j["earnings_sdlog"];
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  return s;
}

json sim_spec_json(const JobSimSpec& s) {
  return json{{"N", s.N},
              {"beta_t_true", vector_json(s.beta_t_true)},
              {"beta_c_true", vector_json(s.beta_c_true)},
              {"binary_prevalence", vector_json(s.binary_prevalence)},
              {"children_rate", s.children_rate},
              {"earnings_meanlog", s.earnings_meanlog},
              {"earnings_sdlog", s.earnings_sdlog},
              {"seed", s.seed}};
}

json map_result_json(const MapResult& r) {
  return json{{"beta", vector_json(r.beta_hat)},
              {"neg_hessian_row_major", matrix_json_rowmajor(r.neg_hessian_at_mode)},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"final_grad_norm", r.final_grad_norm}};
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output " + path);
  out << body;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed) {
  json cfg = load_config(config_path);
  JobSimSpec spec = parse_sim_spec(cfg);
  if (seed) spec.seed = *seed;
  const Population pop = simulate_population(spec);
  write_dataset_csv_file(pop.observed, out_path);
  write_file(out_path + ".meta.json", sim_spec_json(spec).dump(2));
  return 0;
}

int cmd_fit(const std::string& config_path, const std::string& out_path,
            std::optional<std::uint64_t> seed) {
  json cfg = load_config(config_path);
  if (!cfg.contains("data"))
    throw std::runtime_error("fit config: 'data' (CSV path) required");
  Dataset data = read_dataset_csv_file(cfg["data"].get<std::string>());
  data.treatment.reset();

  const std::string family_s = cfg.value("family", "bernoulli");
  const double sigma = cfg.value("sigma", 1.0);
  const ModelFamily family = family_s == "gaussian"
                                 ? ModelFamily::gaussian(sigma)
                                 : ModelFamily::bernoulli();
  const std::string prior_s = cfg.value("prior", "catalytic");
  const std::string fit_kind = cfg.value("fit", "map");

  json out;
  out["prior"] = prior_s;
  out["fit"] = fit_kind;

  std::optional<CatalyticPrior> prior;
  if (prior_s == "catalytic") {
    SynthConfig sc = SynthConfig::defaults_for(data.p());
    if (cfg.contains("tau")) sc.tau = cfg["tau"];
    if (cfg.contains("m")) sc.M = cfg["m"];
    if (cfg.value("scheme", "marginal") == "joint")
      sc.scheme = CovariateScheme::joint_resample();
    sc.mode = cfg.value("mode", family_s == "gaussian"
                                    ? std::string("stochastic")
                                    : std::string("expected_value")) ==
                      "stochastic"
                  ? ResponseMode::stochastic
                  : ResponseMode::expected_value;
    sc.seed = seed.value_or(cfg.value("seed", 0ULL));
    std::vector<Eigen::Index> subset;
    if (cfg.contains("subset"))
      for (const auto& v : cfg["subset"]) subset.push_back(v.get<Eigen::Index>());
    else
      subset = {0};
    sc.sources.push_back({fit_simple_model(data, subset, family), 1.0});
    prior = build_catalytic_prior(data, sc);
    out["tau"] = sc.tau;
    out["m"] = sc.M;
    out["synthetic_row_weight"] = sc.tau / sc.M;
  }

  if (fit_kind == "linear") {
    if (!prior) throw std::runtime_error("fit: linear path requires catalytic prior");
    const LinearPosterior post = fit_linear_posterior(data, *prior, sigma);
    out["mean"] = vector_json(post.mean);
    out["covariance_row_major"] = matrix_json_rowmajor(post.covariance);
  } else {
    MapResult res;
    if (prior_s == "cauchy") {
      res = fit_cauchy_map(data);
    } else {
      res = fit_map(data, family, prior ? &*prior : nullptr);
    }
    out["map"] = map_result_json(res);
    if (!res.converged) {
      out["diagnostic"] = "fit did not converge (possible separation)";
      write_file(out_path, out.dump(2));
      std::cerr << "fit: did not converge; ||beta|| = " << res.beta_hat.norm()
                << "\n";
      return kExitNumerical;
    }
    if (fit_kind == "mcmc") {
      const GaussianApprox approx = laplace_approx(res);
      const MatrixXd prop = default_proposal_cov(approx);
      // the synthetic rows already carry their tau/M weights, so the log
      // posterior is just the weighted log likelihood of the combined data
      const Dataset target = prior ? prior->combine(data) : data;
      auto log_post_combined = [&](const VectorXd& b) {
        return log_likelihood(family, b, target);
      };
      MetropolisOptions mopts;
      const int steps = cfg.value("steps", 50000);
      const SampleMatrix samples = rw_metropolis(
          log_post_combined, res.beta_hat, steps, prop,
          RngStream(seed.value_or(cfg.value("seed", 0ULL))).child("mcmc"),
          mopts);
      out["acceptance_rate"] = samples.acceptance_rate;
      out["draws_kept"] = samples.draws.rows();
      const std::string draws_path = out_path + ".draws.csv";
      write_matrix_csv_file(samples.draws, draws_path);
      out["draws_csv"] = draws_path;
    }
  }
  write_file(out_path, out.dump(2));
  return 0;
}

Mask parse_subgroup(const Dataset& data, const std::string& expr) {
  // expressions like "hsdip == 1", "age35 > 0", "all"
  Mask mask(data.n());
  if (expr.empty() || expr == "all") {
    mask.setConstant(true);
    return mask;
  }
  std::istringstream ss(expr);
  std::string name, op;
  double value;
  if (!(ss >> name >> op >> value))
    throw std::runtime_error("bad subgroup expression: " + expr);
  Eigen::Index col = -1;
  for (Eigen::Index j = 0; j < data.p(); ++j)
    if (data.column_names[static_cast<std::size_t>(j)] == name) col = j;
  if (col < 0) throw std::runtime_error("unknown column in subgroup: " + name);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double x = data.covariates(i, col);
    bool keep;
    if (op == "==") keep = x == value;
    else if (op == "!=") keep = x != value;
    else if (op == ">") keep = x > value;
    else if (op == ">=") keep = x >= value;
    else if (op == "<") keep = x < value;
    else if (op == "<=") keep = x <= value;
    else throw std::runtime_error("bad operator in subgroup: " + op);
    mask[i] = keep;
  }
  return mask;
}

MatrixXd read_plain_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty matrix csv " + path);
  MatrixXd m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

int cmd_effect(const std::string& config_path, const std::string& out_path) {
  json cfg = load_config(config_path);
  Dataset data = read_dataset_csv_file(cfg.at("covariates").get<std::string>());
  SampleMatrix st, sc;
  st.draws = read_plain_matrix_csv(cfg.at("samples_t").get<std::string>());
  sc.draws = read_plain_matrix_csv(cfg.at("samples_c").get<std::string>());
  const double level = cfg.value("level", 0.99);

  json out = json::array();
  std::vector<std::string> exprs = {"all"};
  if (cfg.contains("subgroups"))
    exprs = cfg["subgroups"].get<std::vector<std::string>>();
  for (const auto& expr : exprs) {
    const Mask mask = parse_subgroup(data, expr);
    EffectResult eff = posterior_effect_distribution(data.covariates, mask, st,
                                                     sc, expr);
    const Summary s = posterior_summary(eff.draws, level);
    json entry{{"group", expr},
               {"gamma_avg", eff.gamma_avg},
               {"level", level},
               {"mean", s.mean},
               {"interval", {s.lower, s.upper}}};
    if (cfg.value("write_draws", false)) {
      const std::string path = out_path + "." + std::to_string(out.size()) +
                               ".draws.csv";
      write_matrix_csv_file(eff.draws, path);
      entry["draws_csv"] = path;
    }
    out.push_back(entry);
  }
  write_file(out_path, out.dump(2));
  return 0;
}

ExperimentConfig parse_experiment_config(const json& cfg) {
  ExperimentConfig ec;
  if (cfg.contains("sim")) ec.sim = parse_sim_spec(cfg["sim"]);
  else ec.sim = JobSimSpec::frozen_default();
  if (cfg.contains("n_grid")) ec.n_grid = cfg["n_grid"].get<std::vector<int>>();
  if (cfg.contains("replications")) ec.replications = cfg["replications"];
  if (cfg.contains("n_prime")) ec.n_prime = cfg["n_prime"];
  if (cfg.contains("methods")) {
    ec.methods.clear();
    for (const auto& m : cfg["methods"]) {
      const std::string s = m.get<std::string>();
      if (s == "flat") ec.methods.push_back(Method::flat);
      else if (s == "cauchy") ec.methods.push_back(Method::cauchy);
      else if (s == "catalytic") ec.methods.push_back(Method::catalytic);
      else throw std::runtime_error("unknown method " + s);
    }
  }
  if (cfg.contains("cata")) {
    const json& c = cfg["cata"];
    if (c.contains("tau")) ec.cata.tau = c["tau"];
    if (c.contains("m")) ec.cata.M = c["m"];
    if (c.contains("source_subsets")) {
      ec.cata.source_subsets.clear();
      for (const auto& sub : c["source_subsets"])
        ec.cata.source_subsets.push_back(sub.get<std::vector<Eigen::Index>>());
    }
  }
  if (cfg.contains("seed")) ec.seed = cfg["seed"].get<std::uint64_t>();
  return ec;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path,
                   std::optional<std::uint64_t> seed, const std::string& format,
                   int workers) {
  json cfg = load_config(config_path);
  ExperimentConfig ec = parse_experiment_config(cfg);
  if (seed) ec.seed = *seed;
  ec.workers = workers;
  const ExperimentReport report = run_experiment(ec);
  write_file(out_path, format == "csv" ? report.to_csv() : report.to_json());
  return 0;
}

int cmd_bridge_check(const std::string& config_path, const std::string& out_path,
                     std::optional<std::uint64_t> seed,
                     const std::string& only_kind) {
  json cfg = load_config(config_path);
  std::vector<std::string> kinds = {"ridge", "lasso", "elastic_net", "lq",
                                    "group_lasso"};
  if (!only_kind.empty()) kinds = {only_kind};
  else if (cfg.contains("kinds"))
    kinds = cfg["kinds"].get<std::vector<std::string>>();
  const int instances = cfg.value("instances", 5);
  const int n = cfg.value("n", 30);
  const int p = cfg.value("p", 8);
  const std::uint64_t master_seed = seed.value_or(cfg.value("seed", 0ULL));
  const double obj_tol = cfg.value("objective_rel_tol", 1e-8);
  const double arg_tol = cfg.value("argmin_tol", 1e-6);

  const RngStream master(master_seed);
  json out = json::array();
  bool convex_failure = false;

  for (const auto& kind : kinds) {
    for (int inst = 0; inst < instances; ++inst) {
      auto eng = master.child(kind, static_cast<std::uint64_t>(inst)).engine();
      std::normal_distribution<double> z(0.0, 1.0);
      MatrixXd X(n, p);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) X(i, j) = z(eng);
      for (Eigen::Index j = 0; j < p; ++j)
        X.col(j).array() -= X.col(j).mean();
      VectorXd beta_true(p), center(p);
      for (Eigen::Index j = 0; j < p; ++j) {
        beta_true[j] = z(eng);
        center[j] = 0.3 * z(eng);
      }
      VectorXd y = X * beta_true;
      for (Eigen::Index i = 0; i < n; ++i) y[i] += 0.5 * z(eng);
      y.array() -= y.mean();
      Dataset data = Dataset::make(X, y);

      PenaltySpec spec;
      if (kind == "ridge") {
        MatrixXd A(p, p);
        for (Eigen::Index i = 0; i < p; ++i)
          for (Eigen::Index j = 0; j < p; ++j) A(i, j) = z(eng);
        spec = PenaltySpec::ridge(A * A.transpose() + MatrixXd::Identity(p, p),
                                  center, 1.0, 2.0);
      } else if (kind == "lasso") {
        spec = PenaltySpec::lasso(2.0, center, 1.0, 2.0);
      } else if (kind == "elastic_net") {
        spec = PenaltySpec::elastic_net(2.0, VectorXd::Zero(p), center, 1.0, 2.0);
      } else if (kind == "lq") {
        const double r = cfg.value("r", 3.0);
        spec = PenaltySpec::lq(2.0, r, center, 1.0, 2.0);
      } else if (kind == "group_lasso") {
        std::vector<std::vector<Eigen::Index>> groups;
        std::vector<MatrixXd> metrics;
        for (Eigen::Index j = 0; j < p; j += 2) {
          const Eigen::Index k = std::min<Eigen::Index>(2, p - j);
          std::vector<Eigen::Index> g;
          for (Eigen::Index t = 0; t < k; ++t) g.push_back(j + t);
          MatrixXd B(k, k);
          for (Eigen::Index a = 0; a < k; ++a)
            for (Eigen::Index b = 0; b < k; ++b) B(a, b) = z(eng);
          metrics.push_back(B * B.transpose() + MatrixXd::Identity(k, k));
          groups.push_back(std::move(g));
        }
        spec = PenaltySpec::group_lasso(2.0, groups, metrics, center, 1.0, 2.0);
      } else {
        throw std::runtime_error("unknown bridge kind " + kind);
      }

      CertifyOptions copts;
      copts.seed = master.child("cert", static_cast<std::uint64_t>(inst)).state();
      const CertifyReport rep = certify_equivalence(data, spec, copts);
      const bool ok = rep.passed(obj_tol, arg_tol);
      if (!ok && !rep.local_only) convex_failure = true;
      json entry{{"kind", kind},
                 {"instance", inst},
                 {"objective_gap", rep.objective_gap},
                 {"argmin_gap", rep.argmin_gap},
                 {"objective_direct", rep.objective_direct},
                 {"objective_joint", rep.objective_joint},
                 {"guarantee", rep.local_only ? "local" : "global"},
                 {"passed", ok}};
      if (rep.local_only) entry["start_objectives"] = rep.start_objectives;
      out.push_back(entry);
    }
  }
  write_file(out_path, out.dump(2));
  return convex_failure ? kExitNumerical : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"catalytic prior toolkit"};
  app.require_subcommand(1);

  std::string config_path = env_or("CONFIG", "");
  std::string out_path = env_or("OUT", "out.json");
  std::string format = env_or("FORMAT", "json");
  std::string bridge_kind;
  int workers = std::atoi(env_or("WORKERS", "1").c_str());
  std::optional<std::uint64_t> seed;
  if (const char* s = std::getenv("CATALYTIC_SEED")) seed = std::strtoull(s, nullptr, 10);

  for (auto* sub : {app.add_subcommand("simulate", "write a simulated population CSV"),
                    app.add_subcommand("fit", "fit a posterior to a dataset CSV"),
                    app.add_subcommand("effect", "posterior treatment effects from arm samples"),
                    app.add_subcommand("experiment", "run the subsampling benchmark grid"),
                    app.add_subcommand("bridge-check", "certify regularization equivalences")}) {
    sub->add_option("--config", config_path, "JSON config path");
    sub->add_option("--out", out_path, "output path");
    sub->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--workers", workers, "worker thread count");
    sub->add_option("--seed", seed, "master seed override");
    if (std::string(sub->get_name()) == "bridge-check")
      sub->add_option("--kind", bridge_kind, "restrict to one penalty kind");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("simulate")) return cmd_simulate(config_path, out_path, seed);
    if (app.got_subcommand("fit")) return cmd_fit(config_path, out_path, seed);
    if (app.got_subcommand("effect")) return cmd_effect(config_path, out_path);
    if (app.got_subcommand("experiment"))
      return cmd_experiment(config_path, out_path, seed, format, workers);
    if (app.got_subcommand("bridge-check"))
      return cmd_bridge_check(config_path, out_path, seed, bridge_kind);
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
