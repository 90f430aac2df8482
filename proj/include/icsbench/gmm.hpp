#pragma once

#include <cstdint>
#include <vector>

namespace icsbench::invariants {

struct GmmComponent {
  double weight = 1.0;
  double mean = 0.0;
  double variance = 1.0;
};

/// Univariate Gaussian mixture over a sensor's update series, selected by
/// BIC among K = 1..max_components. novelty_cutoff is the lowest training
/// log-density; test values below it are treated as novel updates.
struct GmmModel {
  std::vector<GmmComponent> components;
  double bic = 0.0;
  double novelty_cutoff = 0.0;

  double log_density(double x) const;
  /// Component with the largest responsibility for x.
  int argmax_component(double x) const;
};

struct GmmFitInfo {
  /// Log-likelihood after every EM iteration of the chosen-K winning
  /// restart; non-decreasing by construction.
  std::vector<double> loglik_trace;
  std::vector<double> bic_per_k;
  int chosen_k = 0;
};

/// Multi-restart seeded EM, convergence when the total log-likelihood
/// improves by under 1e-7 (or 300 iterations). Variances are floored at
/// 1e-9. Throws if the likelihood ever decreases beyond rounding slack.
GmmModel fit_update_gmm(const std::vector<double>& updates, int max_components = 4,
                        std::uint64_t seed = 0, GmmFitInfo* info = nullptr);

}  // namespace icsbench::invariants
