#include "irlbound/risk_bounds.hpp"

#include "irlbound/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace irlbound {

double evd(const TabularMdp& mdp, const RewardWeights& w, const Policy& pi_eval,
           double tol) {
  pi_eval.validate_for(mdp);
  const ValueFunction opt = policy_iteration(mdp, w, tol);
  return policy_value(mdp, w, optimal_policy(opt)) -
         policy_value(mdp, w, pi_eval);
}

EvdSamples evd_samples(const TabularMdp& mdp, const PosteriorChain& chain,
                       const Policy& pi_eval, double tol) {
  if (chain.samples.empty()) throw InvalidInput("evd_samples: empty chain");
  return {kernels::evd_batch(mdp, chain.samples, pi_eval, tol)};
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw InvalidInput("normal_quantile: p must lie in [0, 1]");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against the exact CDF.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

VarIndex var_index(std::size_t n, double alpha, double delta) {
  if (n == 0) throw InvalidInput("var_index: n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw InvalidInput("var_index: alpha and delta must lie in (0, 1)");
  }
  const double nd = static_cast<double>(n);
  const double raw = std::ceil(nd * alpha +
                               normal_quantile(1.0 - delta) *
                                   std::sqrt(nd * alpha * (1.0 - alpha)) -
                               0.5);
  if (raw < 1.0) return {1, true};
  if (raw > nd) return {n, true};
  return {static_cast<std::size_t>(raw), false};
}

std::size_t var_index_exact_binomial(std::size_t n, double alpha, double delta) {
  if (n == 0) throw InvalidInput("var_index_exact_binomial: n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw InvalidInput("var_index_exact_binomial: alpha, delta must lie in (0, 1)");
  }
  const double nd = static_cast<double>(n);
  const double log_a = std::log(alpha);
  const double log_b = std::log1p(-alpha);
  const double target = 1.0 - delta;
  double cdf = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double id = static_cast<double>(i);
    const double log_pmf = std::lgamma(nd + 1.0) - std::lgamma(id + 1.0) -
                           std::lgamma(nd - id + 1.0) + id * log_a +
                           (nd - id) * log_b;
    cdf += std::exp(log_pmf);
    if (cdf >= target) return std::max<std::size_t>(i, 1);
  }
  return n;
}

BoundReport var_bound(const EvdSamples& z, double alpha, double delta) {
  if (z.z.empty()) throw InvalidInput("var_bound: no samples");
  std::vector<double> sorted = z.z;
  std::stable_sort(sorted.begin(), sorted.end());
  const VarIndex idx = var_index(sorted.size(), alpha, delta);
  BoundReport report;
  report.alpha = alpha;
  report.delta = delta;
  report.n_samples = sorted.size();
  report.k_index = idx.k;
  report.bound = sorted[idx.k - 1];
  const double top_coverage_miss =
      std::exp(static_cast<double>(sorted.size()) * std::log(alpha));
  report.saturated = idx.clamped || top_coverage_miss > delta;
  return report;
}

}  // namespace irlbound
