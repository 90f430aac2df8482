#include "icsbench/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "icsbench/rng.hpp"

namespace icsbench::invariants {

namespace {

constexpr double kVarianceFloor = 1e-9;
constexpr double kLogLikTol = 1e-7;
constexpr int kMaxIterations = 300;
constexpr int kRestarts = 3;

double component_log_density(double x, const GmmComponent& c) {
  const double d = x - c.mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * c.variance) - 0.5 * d * d / c.variance;
}

struct EmOutcome {
  std::vector<GmmComponent> components;
  double loglik = -std::numeric_limits<double>::infinity();
  std::vector<double> trace;
};

EmOutcome run_em(const std::vector<double>& x, int k, rng::GaussianStream& stream) {
  const std::size_t n = x.size();
  const double lo = *std::min_element(x.begin(), x.end());
  const double hi = *std::max_element(x.begin(), x.end());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var = std::max(var / static_cast<double>(n), kVarianceFloor);

  EmOutcome out;
  out.components.resize(k);
  for (int c = 0; c < k; ++c) {
    out.components[c].weight = 1.0 / k;
    out.components[c].mean = lo + (hi - lo) * (c + 0.5) / k + 0.05 * std::sqrt(var) * stream.next();
    out.components[c].variance = var;
  }

  std::vector<double> resp(n * k);
  double prev_loglik = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    // E step with log-sum-exp per sample.
    double loglik = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double max_term = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double term = std::log(out.components[c].weight) + component_log_density(x[i], out.components[c]);
        resp[i * k + c] = term;
        max_term = std::max(max_term, term);
      }
      double denom = 0.0;
      for (int c = 0; c < k; ++c) denom += std::exp(resp[i * k + c] - max_term);
      const double log_denom = max_term + std::log(denom);
      loglik += log_denom;
      for (int c = 0; c < k; ++c) resp[i * k + c] = std::exp(resp[i * k + c] - log_denom);
    }

    if (loglik + 1e-9 * (1.0 + std::abs(loglik)) < prev_loglik) {
      throw std::logic_error("EM log-likelihood decreased");
    }
    out.trace.push_back(loglik);
    const bool converged = iter > 0 && std::abs(loglik - prev_loglik) < kLogLikTol;
    prev_loglik = loglik;
    out.loglik = loglik;
    if (converged) break;

    // M step.
    for (int c = 0; c < k; ++c) {
      double nk = 0.0;
      double mu = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * k + c];
        mu += resp[i * k + c] * x[i];
      }
      nk = std::max(nk, 1e-300);
      mu /= nk;
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) v += resp[i * k + c] * (x[i] - mu) * (x[i] - mu);
      out.components[c].weight = nk / static_cast<double>(n);
      out.components[c].mean = mu;
      out.components[c].variance = std::max(v / nk, kVarianceFloor);
    }
  }
  return out;
}

}  // namespace

double GmmModel::log_density(double x) const {
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(components.size());
  for (std::size_t c = 0; c < components.size(); ++c) {
    terms[c] = std::log(components[c].weight) + component_log_density(x, components[c]);
    max_term = std::max(max_term, terms[c]);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  return max_term + std::log(acc);
}

int GmmModel::argmax_component(double x) const {
  int best = 0;
  double best_term = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < components.size(); ++c) {
    const double term = std::log(components[c].weight) + component_log_density(x, components[c]);
    if (term > best_term) {
      best_term = term;
      best = static_cast<int>(c);
    }
  }
  return best;
}

GmmModel fit_update_gmm(const std::vector<double>& updates, int max_components, std::uint64_t seed,
                        GmmFitInfo* info) {
  if (max_components < 1) throw std::invalid_argument("need at least one component");
  if (updates.size() < 10 * static_cast<std::size_t>(max_components)) {
    throw std::invalid_argument("need at least 10*maxK update samples");
  }
  const std::size_t n = updates.size();

  const double first = updates[0];
  const bool constant = std::all_of(updates.begin(), updates.end(), [&](double v) { return v == first; });
  if (constant) {
    GmmModel model;
    model.components = {{1.0, first, kVarianceFloor}};
    model.bic = 0.0;
    model.novelty_cutoff = model.log_density(first);
    if (info) {
      info->chosen_k = 1;
      info->loglik_trace = {model.novelty_cutoff * static_cast<double>(n)};
      info->bic_per_k = {0.0};
    }
    return model;
  }

  GmmModel best_model;
  double best_bic = std::numeric_limits<double>::infinity();
  GmmFitInfo local;
  for (int k = 1; k <= max_components; ++k) {
    EmOutcome best_run;
    for (int restart = 0; restart < kRestarts; ++restart) {
      rng::GaussianStream stream(rng::derive_seed(seed, "gmm/" + std::to_string(k) + "/" + std::to_string(restart)));
      EmOutcome run = run_em(updates, k, stream);
      if (run.loglik > best_run.loglik) best_run = std::move(run);
    }
    const double params = 3.0 * k - 1.0;  // weights (k-1) + means + variances
    const double bic = -2.0 * best_run.loglik + params * std::log(static_cast<double>(n));
    local.bic_per_k.push_back(bic);
    if (bic < best_bic) {
      best_bic = bic;
      best_model.components = best_run.components;
      best_model.bic = bic;
      local.chosen_k = k;
      local.loglik_trace = best_run.trace;
    }
  }

  double cutoff = std::numeric_limits<double>::infinity();
  for (double v : updates) cutoff = std::min(cutoff, best_model.log_density(v));
  best_model.novelty_cutoff = cutoff;

  if (info) *info = std::move(local);
  return best_model;
}

}  // namespace icsbench::invariants
