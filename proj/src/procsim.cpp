#include "icsbench/procsim.hpp"

#include <algorithm>
#include <json.hpp>

namespace icsbench::procsim {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a non-empty nested array");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw ValidationError("ragged matrix in config");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

void PlantConfig::validate() const {
  const auto n = A.rows();
  if (A.cols() != n) throw ValidationError("A must be square");
  if (B.rows() != n) throw ValidationError("B row count must match state dimension");
  if (C.cols() != n) throw ValidationError("C column count must match state dimension");
  if (D.rows() != C.rows() || D.cols() != B.cols()) {
    throw ValidationError("D must be outputs x inputs");
  }
  if (x0.size() != n) throw ValidationError("x0 length must match state dimension");
  if (process_noise_std.size() != n) {
    throw ValidationError("process noise std must have one entry per state");
  }
  for (Eigen::Index i = 0; i < process_noise_std.size(); ++i) {
    if (process_noise_std(i) < 0.0) throw ValidationError("process noise std must be >= 0");
  }
  if (sensor_noise_std.size() != C.rows()) {
    throw ValidationError("sensor noise std must have one entry per output");
  }
  for (Eigen::Index i = 0; i < sensor_noise_std.size(); ++i) {
    if (sensor_noise_std(i) < 0.0) throw ValidationError("sensor noise std must be >= 0");
  }
  if (sensor_names.size() != static_cast<std::size_t>(C.rows())) {
    throw ValidationError("sensor name count must match output dimension");
  }
  if (actuator_names.size() != static_cast<std::size_t>(B.cols())) {
    throw ValidationError("actuator name count must match input dimension");
  }
  for (const auto& rule : controller) {
    if (rule.actuator < 0 || rule.actuator >= B.cols()) throw ValidationError("controller rule actuator out of range");
    if (rule.output < 0 || rule.output >= C.rows()) throw ValidationError("controller rule output out of range");
    if (!(rule.low < rule.high)) throw ValidationError("hysteresis rule needs low < high");
  }
}

double PlantConfig::spectral_radius() const {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, false);
  double radius = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    radius = std::max(radius, std::abs(solver.eigenvalues()(i)));
  }
  return radius;
}

std::string PlantConfig::to_json_string() const {
  json j;
  j["A"] = matrix_to_json(A);
  j["B"] = matrix_to_json(B);
  j["C"] = matrix_to_json(C);
  j["D"] = matrix_to_json(D);
  j["process_noise_std"] = vector_to_json(process_noise_std);
  j["sensor_noise_std"] = vector_to_json(sensor_noise_std);
  j["x0"] = vector_to_json(x0);
  j["sensor_names"] = sensor_names;
  j["actuator_names"] = actuator_names;
  j["rng"] = rng_algorithm;
  json rules = json::array();
  for (const auto& r : controller) {
    rules.push_back({{"actuator", r.actuator},
                     {"output", r.output},
                     {"low", r.low},
                     {"high", r.high},
                     {"on_value", r.on_value},
                     {"off_value", r.off_value}});
  }
  j["controller"] = std::move(rules);
  return j.dump(2);
}

PlantConfig PlantConfig::from_json_string(const std::string& text) {
  json j = json::parse(text);
  PlantConfig cfg;
  cfg.A = matrix_from_json(j.at("A"));
  cfg.B = matrix_from_json(j.at("B"));
  cfg.C = matrix_from_json(j.at("C"));
  cfg.D = matrix_from_json(j.at("D"));
  const auto& pn = j.at("process_noise_std");
  if (pn.is_number()) {
    cfg.process_noise_std = Eigen::VectorXd::Constant(cfg.A.rows(), pn.get<double>());
  } else {
    cfg.process_noise_std = vector_from_json(pn);
  }
  const auto& sn = j.at("sensor_noise_std");
  if (sn.is_number()) {
    cfg.sensor_noise_std = Eigen::VectorXd::Constant(cfg.C.rows(), sn.get<double>());
  } else {
    cfg.sensor_noise_std = vector_from_json(sn);
  }
  cfg.x0 = vector_from_json(j.at("x0"));
  cfg.sensor_names = j.at("sensor_names").get<std::vector<std::string>>();
  cfg.actuator_names = j.at("actuator_names").get<std::vector<std::string>>();
  cfg.rng_algorithm = j.value("rng", std::string(rng::GaussianStream::kAlgorithm));
  for (const auto& r : j.at("controller")) {
    HysteresisRule rule;
    rule.actuator = r.at("actuator").get<int>();
    rule.output = r.at("output").get<int>();
    rule.low = r.at("low").get<double>();
    rule.high = r.at("high").get<double>();
    rule.on_value = r.at("on_value").get<double>();
    rule.off_value = r.at("off_value").get<double>();
    cfg.controller.push_back(rule);
  }
  cfg.validate();
  return cfg;
}

PlantConfig PlantConfig::single_tank() {
  PlantConfig cfg;
  cfg.A = Eigen::MatrixXd::Constant(1, 1, 0.95);
  cfg.B = Eigen::MatrixXd::Constant(1, 1, 0.10);
  cfg.C = Eigen::MatrixXd(3, 1);
  cfg.C << 1.0, 0.1, 0.25;
  cfg.D = Eigen::MatrixXd(3, 1);
  cfg.D << 0.0, 1.0, 0.0;
  cfg.process_noise_std = Eigen::VectorXd::Constant(1, 0.012);
  cfg.sensor_noise_std = Eigen::VectorXd(3);
  cfg.sensor_noise_std << 0.010, 0.020, 0.012;
  cfg.x0 = Eigen::VectorXd::Constant(1, 0.5);
  cfg.sensor_names = {"TANK_LEVEL", "INFLOW_PRESSURE", "OUTFLOW_PRESSURE"};
  cfg.actuator_names = {"PUMP"};
  cfg.controller = {{0, 0, 0.30, 0.70, 1.0, 0.0}};
  return cfg;
}

PlantConfig PlantConfig::three_tank_cascade() {
  // Tank 1 cycles fast and noisy, tank 2 sits in between, tank 3 is a
  // slow reservoir whose level ramps over ~1200 steps. Tank 1 pressure
  // carries the pump feed-through.
  PlantConfig cfg;
  cfg.A = Eigen::MatrixXd::Zero(3, 3);
  cfg.A(0, 0) = 0.95;
  cfg.A(1, 1) = 0.95;
  cfg.A(2, 2) = 0.999;
  cfg.A(1, 0) = 0.0005;
  cfg.A(2, 1) = 0.0002;
  cfg.B = Eigen::MatrixXd::Zero(3, 3);
  cfg.B(0, 0) = 0.10;
  cfg.B(1, 1) = 0.05;
  cfg.B(2, 2) = 0.0017;
  cfg.C = Eigen::MatrixXd::Zero(6, 3);
  cfg.C(0, 0) = 1.0;
  cfg.C(1, 0) = 0.1;
  cfg.C(2, 1) = 1.0;
  cfg.C(3, 1) = 0.3;
  cfg.C(4, 2) = 1.0;
  cfg.C(5, 2) = 0.3;
  cfg.D = Eigen::MatrixXd::Zero(6, 3);
  cfg.D(1, 0) = 0.8;
  cfg.process_noise_std = Eigen::VectorXd(3);
  cfg.process_noise_std << 0.020, 0.004, 0.0002;
  cfg.sensor_noise_std = Eigen::VectorXd(6);
  cfg.sensor_noise_std << 0.030, 0.020, 0.020, 0.010, 0.002, 0.004;
  cfg.x0 = Eigen::VectorXd(3);
  cfg.x0 << 0.50, 0.45, 0.42;
  cfg.sensor_names = {"T1_LEVEL", "T1_PRESSURE", "T2_LEVEL", "T2_PRESSURE", "T3_LEVEL", "T3_PRESSURE"};
  cfg.actuator_names = {"PUMP1", "PUMP2", "PUMP3"};
  cfg.controller = {{0, 0, 0.30, 0.70, 1.0, 0.0},
                    {1, 2, 0.35, 0.72, 1.0, 0.0},
                    {2, 4, 0.30, 0.70, 1.0, 0.0}};
  return cfg;
}

SeriesFrame simulate(const PlantConfig& config, std::size_t steps,
                     const std::vector<ActuatorAttack>& attacks, std::uint64_t seed) {
  config.validate();
  if (steps < 1) throw ValidationError("simulation needs at least one step");
  for (const auto& a : attacks) {
    if (a.start >= a.end || a.end > steps) throw ValidationError("attack interval out of range");
    if (a.actuator < 0 || a.actuator >= static_cast<int>(config.input_dim())) {
      throw ValidationError("attack actuator out of range");
    }
  }
  for (std::size_t i = 0; i < attacks.size(); ++i) {
    for (std::size_t j = i + 1; j < attacks.size(); ++j) {
      if (attacks[i].actuator == attacks[j].actuator && attacks[i].start < attacks[j].end &&
          attacks[j].start < attacks[i].end) {
        throw ValidationError("overlapping attacks on the same actuator");
      }
    }
  }

  const std::size_t n = config.state_dim();
  const std::size_t p = config.input_dim();
  const std::size_t q = config.output_dim();

  rng::GaussianStream noise(seed);

  Eigen::VectorXd x = config.x0;
  std::vector<bool> rule_on(config.controller.size());
  for (std::size_t i = 0; i < config.controller.size(); ++i) {
    const auto& rule = config.controller[i];
    rule_on[i] = (config.C.row(rule.output) * x)(0) <= 0.5 * (rule.low + rule.high);
  }

  std::vector<double> values;
  values.reserve(steps * (q + p));
  std::vector<std::uint8_t> labels(steps, 0);

  // The controller reads the measured output before the actuator
  // feed-through is added; its rules reference plain plant outputs.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd w(n), v(q), sensed(q), y(q);
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < n; ++i) w(i) = noise.next(0.0, config.process_noise_std(i));
    for (std::size_t i = 0; i < q; ++i) v(i) = noise.next(0.0, config.sensor_noise_std(i));

    sensed = config.C * x + v;
    u.setZero();
    for (std::size_t i = 0; i < config.controller.size(); ++i) {
      const auto& rule = config.controller[i];
      if (sensed(rule.output) <= rule.low) {
        rule_on[i] = true;
      } else if (sensed(rule.output) >= rule.high) {
        rule_on[i] = false;
      }
      u(rule.actuator) = rule_on[i] ? rule.on_value : rule.off_value;
    }
    for (const auto& a : attacks) {
      if (k >= a.start && k < a.end) {
        u(a.actuator) = a.value;
        labels[k] = 1;
      }
    }

    y = sensed + config.D * u;
    for (std::size_t i = 0; i < q; ++i) values.push_back(y(i));
    for (std::size_t i = 0; i < p; ++i) values.push_back(u(i));

    x = config.A * x + config.B * u + w;
  }

  std::vector<ColumnMeta> columns;
  columns.reserve(q + p);
  for (const auto& name : config.sensor_names) {
    columns.push_back({name, ColumnKind::kSensorContinuous});
  }
  for (const auto& name : config.actuator_names) {
    columns.push_back({name, ColumnKind::kActuatorDiscrete});
  }
  return SeriesFrame::create(std::move(columns), std::move(values), std::move(labels));
}

RecoveryResult label_recovery(const SeriesFrame& run, const PlantConfig& config,
                              const std::vector<ActuatorAttack>& attacks, double band_tolerance) {
  config.validate();
  const auto in_bands = [&](std::size_t step) {
    for (const auto& rule : config.controller) {
      const double y = run.at(step, static_cast<std::size_t>(rule.output));
      if (y < rule.low - band_tolerance || y > rule.high + band_tolerance) return false;
    }
    return true;
  };

  std::vector<std::uint8_t> labels(run.rows(), 0);
  RecoveryResult result;
  for (const auto& a : attacks) {
    if (a.end > run.rows()) throw ValidationError("attack interval exceeds run length");
    std::size_t r = a.end;
    while (r < run.rows() && !in_bands(r)) ++r;
    if (r == run.rows()) result.never_recovered = true;
    for (std::size_t k = a.start; k < r; ++k) labels[k] = 1;
    result.windows.emplace_back(a.start, r);
  }

  std::vector<double> values = run.values();
  result.frame = SeriesFrame::create(run.columns(), std::move(values), std::move(labels));
  return result;
}

}  // namespace icsbench::procsim
