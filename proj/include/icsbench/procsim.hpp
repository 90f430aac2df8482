#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "icsbench/rng.hpp"
#include "icsbench/series_frame.hpp"

namespace icsbench::procsim {

/// Bang-bang rule: drive `actuator` to on_value when the sensed output
/// falls to `low`, back to off_value when it reaches `high`.
struct HysteresisRule {
  int actuator = 0;
  int output = 0;
  double low = 0.0;
  double high = 1.0;
  double on_value = 1.0;
  double off_value = 0.0;
};

/// Forces one actuator to a fixed value over steps [start, end).
struct ActuatorAttack {
  std::size_t start = 0;
  std::size_t end = 0;
  int actuator = 0;
  double value = 0.0;
};

/// Discrete-time LTI plant x' = Ax + Bu + w, y = Cx + Du + v with a
/// hysteresis controller closing the loop on reported outputs.
/// Noise standard deviations are per state / per output; the JSON form
/// also accepts a scalar shorthand.
struct PlantConfig {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;
  Eigen::VectorXd process_noise_std;
  Eigen::VectorXd sensor_noise_std;
  std::vector<HysteresisRule> controller;
  Eigen::VectorXd x0;
  std::vector<std::string> sensor_names;
  std::vector<std::string> actuator_names;
  std::string rng_algorithm = rng::GaussianStream::kAlgorithm;

  std::size_t state_dim() const { return static_cast<std::size_t>(A.rows()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(B.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(C.rows()); }

  void validate() const;
  double spectral_radius() const;

  std::string to_json_string() const;
  static PlantConfig from_json_string(const std::string& text);

  /// n=1 tank with pump hysteresis; outputs: level, inflow pressure
  /// (carries the pump feed-through), outflow pressure (noisy).
  static PlantConfig single_tank();
  /// n=3 weakly coupled cascade, two outputs per tank, one pump each.
  static PlantConfig three_tank_cascade();
};

/// Runs the closed loop for `steps` steps. Output frame holds q sensor
/// columns then p actuator columns; labels are 1 inside attack intervals.
/// Noise draws come from a single seeded stream (per step: state noise,
/// then output noise), so equal seeds give bit-identical frames.
SeriesFrame simulate(const PlantConfig& config, std::size_t steps,
                     const std::vector<ActuatorAttack>& attacks, std::uint64_t seed);

struct RecoveryResult {
  SeriesFrame frame;
  /// Final label windows [start, end) per attack, post extension.
  std::vector<std::pair<std::size_t, std::size_t>> windows;
  /// Set when some attack never re-entered the controller bands before the
  /// run ended; the label extends to the end of the run.
  bool never_recovered = false;
};

/// Extends each attack's label window past its end until every sensed
/// output is back inside its controller band (widened by band_tolerance).
RecoveryResult label_recovery(const SeriesFrame& run, const PlantConfig& config,
                              const std::vector<ActuatorAttack>& attacks,
                              double band_tolerance = 0.02);

}  // namespace icsbench::procsim
