#pragma once

// Shared test utilities: random instances, finite differences, an
// independent BFGS minimizer, and a brute-force 1-d grid search. These are
// deliberately separate implementations from the library so tests compare
// against independent oracles.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "catalytic/dataset.hpp"
#include "catalytic/model.hpp"

namespace testutil {

using catalytic::Dataset;
using catalytic::MatrixXd;
using catalytic::VectorXd;

inline MatrixXd random_matrix(std::mt19937_64& eng, Eigen::Index n,
                              Eigen::Index p, double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  MatrixXd m(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = z(eng);
  return m;
}

inline VectorXd random_vector(std::mt19937_64& eng, Eigen::Index p,
                              double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  VectorXd v(p);
  for (Eigen::Index j = 0; j < p; ++j) v[j] = z(eng);
  return v;
}

/// Random dataset with an intercept column and gaussian or bernoulli
/// response drawn from a random true coefficient vector.
inline Dataset random_dataset(std::mt19937_64& eng, Eigen::Index n,
                              Eigen::Index p, bool bernoulli,
                              bool with_intercept = true) {
  MatrixXd X = random_matrix(eng, n, p);
  if (with_intercept) X.col(0).setOnes();
  const VectorXd beta = random_vector(eng, p, 0.5);
  VectorXd y(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eta = X.row(i).dot(beta);
    y[i] = bernoulli ? (u(eng) < catalytic::sigmoid(eta) ? 1.0 : 0.0)
                     : eta + z(eng);
  }
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < p; ++j)
    names.push_back(with_intercept && j == 0 ? catalytic::kInterceptName
                                             : "x" + std::to_string(j));
  return Dataset::make(std::move(X), std::move(y), std::move(names));
}

inline VectorXd fd_gradient(const std::function<double(const VectorXd&)>& f,
                            const VectorXd& x, double h = 1e-6) {
  VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    VectorXd a = x, b = x;
    a[j] += h;
    b[j] -= h;
    g[j] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

inline MatrixXd fd_jacobian(
    const std::function<VectorXd(const VectorXd&)>& g, const VectorXd& x,
    double h = 1e-5) {
  MatrixXd J(g(x).size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    VectorXd a = x, b = x;
    a[j] += h;
    b[j] -= h;
    J.col(j) = (g(a) - g(b)) / (2 * h);
  }
  return J;
}

/// BFGS with backtracking line search; independent of the library's Newton
/// solver. Minimizes f with analytic gradient grad.
inline VectorXd bfgs_minimize(const std::function<double(const VectorXd&)>& f,
                              const std::function<VectorXd(const VectorXd&)>& grad,
                              VectorXd x, double tol = 1e-11,
                              int max_iter = 2000) {
  const Eigen::Index p = x.size();
  MatrixXd H = MatrixXd::Identity(p, p);  // inverse-Hessian approximation
  VectorXd g = grad(x);
  double fx = f(x);
  for (int it = 0; it < max_iter && g.norm() > tol; ++it) {
    VectorXd d = -H * g;
    if (d.dot(g) > 0) {
      H = MatrixXd::Identity(p, p);
      d = -g;
    }
    double t = 1.0;
    double fn = f(x + t * d);
    int halvings = 0;
    while (!(fn <= fx + 1e-4 * t * g.dot(d)) && halvings < 60) {
      t *= 0.5;
      fn = f(x + t * d);
      ++halvings;
    }
    const VectorXd xn = x + t * d;
    const VectorXd gn = grad(xn);
    const VectorXd s = xn - x, yv = gn - g;
    const double sy = s.dot(yv);
    if (sy > 1e-14) {
      const MatrixXd I = MatrixXd::Identity(p, p);
      H = (I - s * yv.transpose() / sy) * H * (I - yv * s.transpose() / sy) +
          s * s.transpose() / sy;
    }
    x = xn;
    g = gn;
    fx = fn;
  }
  return x;
}

/// Brute-force minimizer of phi over the grid {h, 2h, ..., 100} (h=1e-4):
/// the stated oracle for scale profiling.
inline double grid_min_scale(const std::function<double(double)>& phi,
                             double h = 1e-4, double upper = 100.0) {
  double best_s = h, best_v = phi(h);
  const long steps = static_cast<long>(upper / h);
  for (long k = 2; k <= steps; ++k) {
    const double s = static_cast<double>(k) * h;
    const double v = phi(s);
    if (v < best_v) {
      best_v = v;
      best_s = s;
    }
  }
  return best_s;
}

}  // namespace testutil
