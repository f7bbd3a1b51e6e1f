#pragma once

// Expected value difference (policy loss) and the (1 - delta)-confidence
// upper bound on its alpha-quantile over posterior reward samples.

#include "irlbound/birl.hpp"
#include "irlbound/mdp.hpp"

#include <vector>

namespace irlbound {

struct EvdSamples {
  std::vector<double> z;
};

struct VarIndex {
  std::size_t k;  // 1-based
  bool clamped;
};

struct BoundReport {
  double alpha = 0.0;
  double delta = 0.0;
  std::size_t n_samples = 0;
  std::size_t k_index = 0;  // 1-based
  double bound = 0.0;
  /// Too few samples for the requested confidence; see var_bound.
  bool saturated = false;
};

/// V*_w - V^pi_eval_w over the initial distribution.
double evd(const TabularMdp& mdp, const RewardWeights& w, const Policy& pi_eval,
           double tol = kDefaultSolverTol);

EvdSamples evd_samples(const TabularMdp& mdp, const PosteriorChain& chain,
                       const Policy& pi_eval, double tol = kDefaultSolverTol);

/// Standard normal quantile. Acklam's rational approximation polished with
/// one Halley step, accurate to well below 1e-8 on (0, 1).
double normal_quantile(double p);

/// ceil(N alpha + z_{1-delta} sqrt(N alpha (1 - alpha)) - 1/2), clamped to
/// [1, N].
VarIndex var_index(std::size_t n, double alpha, double delta);

/// Smallest j with sum_{i<=j} C(N,i) alpha^i (1-alpha)^(N-i) >= 1 - delta.
/// Exact oracle for var_index.
std::size_t var_index_exact_binomial(std::size_t n, double alpha, double delta);

/// Sorts ascending and returns the var_index order statistic. The report is
/// flagged saturated when the index had to be clamped, or when even the
/// largest sample cannot reach the confidence (alpha^N > delta).
BoundReport var_bound(const EvdSamples& z, double alpha, double delta);

}  // namespace irlbound
