#include "catalytic/effects.hpp"

#include <stdexcept>

namespace catalytic {

namespace {
double log_sigmoid(double eta) { return eta - log1p_exp(eta); }
}  // namespace

double log_prob_ratio(const VectorXd& x, const VectorXd& beta_t,
                      const VectorXd& beta_c) {
  if (x.size() != beta_t.size() || x.size() != beta_c.size())
    throw std::invalid_argument("log_prob_ratio: dimension mismatch");
  return log_sigmoid(x.dot(beta_t)) - log_sigmoid(x.dot(beta_c));
}

EffectResult avg_effect(const MatrixXd& X, const Mask& mask,
                        const VectorXd& beta_t, const VectorXd& beta_c,
                        bool keep_per_unit, const std::string& label) {
  if (mask.size() != X.rows())
    throw std::invalid_argument("avg_effect: mask length != rows");
  const Eigen::Index count = mask.count();
  if (count == 0) throw std::invalid_argument("avg_effect: empty mask");

  EffectResult out;
  out.group_label = label;
  if (keep_per_unit) out.per_unit.resize(count);
  double sum = 0.0;
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (!mask[i]) continue;
    const double g = log_prob_ratio(X.row(i), beta_t, beta_c);
    sum += g;
    if (keep_per_unit) out.per_unit[k++] = g;
  }
  out.gamma_avg = sum / static_cast<double>(count);
  return out;
}

EffectResult posterior_effect_distribution(const MatrixXd& X, const Mask& mask,
                                           const SampleMatrix& samples_t,
                                           const SampleMatrix& samples_c,
                                           const std::string& label) {
  const Eigen::Index T = samples_t.draws.rows();
  if (T != samples_c.draws.rows())
    throw std::invalid_argument(
        "posterior_effect_distribution: draw count mismatch");
  EffectResult out;
  out.group_label = label;
  out.draws.resize(T);
  for (Eigen::Index k = 0; k < T; ++k)
    out.draws[k] = avg_effect(X, mask, samples_t.draws.row(k),
                              samples_c.draws.row(k))
                       .gamma_avg;
  out.gamma_avg = out.draws.mean();
  return out;
}

}  // namespace catalytic
