#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "icsbench/errors.hpp"
#include "icsbench/metrics.hpp"

namespace icsbench::pasad {

/// Trained subspace detector state: orthonormal basis of the signal
/// subspace of the lagged trajectory matrix plus the projected centroid of
/// the training cluster.
struct PasadModel {
  std::size_t lag = 0;            // L
  std::size_t subspace_dim = 0;   // r
  std::size_t train_len = 0;      // N
  double theta = 0.0;
  Eigen::MatrixXd basis;          // L x r, orthonormal columns
  Eigen::VectorXd centroid;       // r
  std::size_t effective_rank = 0;

  std::string to_json_string() const;
  static PasadModel from_json_string(const std::string& text);
  void save(const std::string& path) const;
  static PasadModel load(const std::string& path);
};

/// Builds the L x (N-L+1) Hankel trajectory matrix over series[0..N) and
/// keeps the top-r left singular directions. The decomposition runs on the
/// L x L lagged Gram matrix, assembled in O(L^2 + LK) via the Hankel shift
/// identity; dense eigensolve up to L = 512, seeded subspace iteration with
/// residual tolerance 1e-8 above.
PasadModel train(const std::vector<double>& series, std::size_t n, std::size_t lag, std::size_t r);

/// Departure score per step: squared distance between the projected lagged
/// vector ending at the step and the training centroid. The first L-1
/// steps emit 0 (warm-up).
std::vector<double> score(const PasadModel& model, const std::vector<double>& series);

AlarmSeries detect(const PasadModel& model, const std::vector<double>& series, double theta);

/// Score series as CSV (step, departure) for external plotting.
void write_score_csv(const std::vector<double>& departure, std::size_t warmup, const std::string& path);

}  // namespace icsbench::pasad
