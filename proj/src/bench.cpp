#include "icsbench/bench.hpp"

#include <chrono>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "icsbench/arcusum.hpp"
#include "icsbench/invariants.hpp"
#include "icsbench/pasad.hpp"
#include "icsbench/rng.hpp"
#include "icsbench/tracesvm.hpp"

namespace icsbench::bench {

namespace {

using nlohmann::json;

std::vector<procsim::ActuatorAttack> attacks_from_json(const json& j) {
  std::vector<procsim::ActuatorAttack> attacks;
  for (const auto& a : j) {
    procsim::ActuatorAttack attack;
    attack.start = a.at("start").get<std::size_t>();
    attack.end = a.at("end").get<std::size_t>();
    attack.actuator = a.at("actuator").get<int>();
    attack.value = a.at("value").get<double>();
    attacks.push_back(attack);
  }
  return attacks;
}

spoofer::SpoofPlan plan_from_json(const json& j, std::uint64_t global_seed) {
  spoofer::SpoofPlan plan;
  plan.id = j.at("id").get<std::string>();
  plan.technique = spoofer::technique_from_name(j.at("technique").get<std::string>());
  if (j.contains("columns")) plan.columns = j.at("columns").get<std::vector<std::string>>();
  if (j.contains("stat")) {
    const auto stat = j.at("stat").get<std::string>();
    if (stat == "mean") {
      plan.stat = spoofer::ConstantStat::kMean;
    } else if (stat == "median") {
      plan.stat = spoofer::ConstantStat::kMedian;
    } else {
      throw ValidationError("unknown constant stat '" + stat + "'");
    }
  }
  if (j.contains("sigma_scale")) plan.sigma_scale = j.at("sigma_scale").get<double>();
  if (j.contains("replay_offset")) plan.replay_offset = j.at("replay_offset").get<std::size_t>();
  if (j.contains("actuator_mode")) {
    const auto mode = j.at("actuator_mode").get<std::string>();
    if (mode == "unknown_state") {
      plan.actuator_mode = spoofer::ActuatorMode::kUnknownState;
    } else if (mode == "constant") {
      plan.actuator_mode = spoofer::ActuatorMode::kConstant;
    } else {
      throw ValidationError("unknown actuator mode '" + mode + "'");
    }
  }
  plan.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>()
                                 : rng::derive_seed(global_seed, "plan/" + plan.id);
  return plan;
}

}  // namespace

BenchConfig BenchConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }

  BenchConfig cfg;
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.output_dir = j.value("output_dir", std::string("."));

  const json& data = j.at("data");
  const auto source = data.value("source", std::string("procsim"));
  if (source == "procsim") {
    cfg.data.source = DataConfig::Source::kProcsim;
    cfg.data.preset = data.value("preset", std::string("single_tank"));
    if (data.contains("plant")) cfg.data.plant_json = data.at("plant").dump();
    cfg.data.train_steps = data.value("train_steps", std::size_t{6000});
    cfg.data.test_steps = data.value("test_steps", std::size_t{3000});
    cfg.data.attack_train_steps = data.value("attack_train_steps", std::size_t{0});
    cfg.data.band_tolerance = data.value("band_tolerance", 0.1);
    if (data.contains("test_attacks")) cfg.data.test_attacks = attacks_from_json(data.at("test_attacks"));
    if (data.contains("attack_train_attacks")) {
      cfg.data.attack_train_attacks = attacks_from_json(data.at("attack_train_attacks"));
    }
  } else if (source == "csv") {
    cfg.data.source = DataConfig::Source::kCsv;
    cfg.data.train_path = data.at("train_path").get<std::string>();
    cfg.data.test_path = data.at("test_path").get<std::string>();
    cfg.data.attack_train_path = data.value("attack_train_path", std::string());
    for (const auto& c : data.at("columns")) {
      ColumnMeta meta;
      meta.name = c.at("name").get<std::string>();
      const auto kind = c.at("kind").get<std::string>();
      if (kind == "sensor") {
        meta.kind = ColumnKind::kSensorContinuous;
      } else if (kind == "actuator") {
        meta.kind = ColumnKind::kActuatorDiscrete;
      } else {
        throw ValidationError("unknown column kind '" + kind + "'");
      }
      cfg.data.schema.columns.push_back(meta);
    }
    cfg.data.schema.label_column = data.value("label_column", std::string("ATT_FLAG"));
  } else {
    throw ValidationError("unknown data source '" + source + "'");
  }

  for (const auto& d : j.at("detectors")) {
    DetectorConfig dc;
    dc.type = d.at("type").get<std::string>();
    dc.name = d.value("name", dc.type);
    dc.params_json = d.dump();
    cfg.detectors.push_back(std::move(dc));
  }
  for (std::size_t i = 0; i < cfg.detectors.size(); ++i) {
    for (std::size_t k = i + 1; k < cfg.detectors.size(); ++k) {
      if (cfg.detectors[i].name == cfg.detectors[k].name) {
        throw ValidationError("duplicate detector name '" + cfg.detectors[i].name + "'");
      }
    }
  }

  if (j.contains("plans")) {
    for (const auto& p : j.at("plans")) cfg.plans.push_back(plan_from_json(p, cfg.seed));
  }
  for (std::size_t i = 0; i < cfg.plans.size(); ++i) {
    for (std::size_t k = i + 1; k < cfg.plans.size(); ++k) {
      if (cfg.plans[i].id == cfg.plans[k].id) {
        throw ValidationError("duplicate plan id '" + cfg.plans[i].id + "'");
      }
    }
  }
  return cfg;
}

BenchConfig BenchConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_string(text);
}

MaterializedData materialize_data(const DataConfig& data, std::uint64_t seed) {
  MaterializedData out;
  if (data.source == DataConfig::Source::kProcsim) {
    procsim::PlantConfig plant;
    if (data.plant_json) {
      plant = procsim::PlantConfig::from_json_string(*data.plant_json);
    } else if (data.preset == "single_tank") {
      plant = procsim::PlantConfig::single_tank();
    } else if (data.preset == "three_tank_cascade") {
      plant = procsim::PlantConfig::three_tank_cascade();
    } else {
      throw ValidationError("unknown plant preset '" + data.preset + "'");
    }

    out.train = procsim::simulate(plant, data.train_steps, {}, rng::derive_seed(seed, "train"));
    SeriesFrame raw_test =
        procsim::simulate(plant, data.test_steps, data.test_attacks, rng::derive_seed(seed, "test"));
    auto recovered = procsim::label_recovery(raw_test, plant, data.test_attacks, data.band_tolerance);
    out.test = std::move(recovered.frame);
    out.flags.push_back("labels_extended_to_recovery");
    if (recovered.never_recovered) out.flags.push_back("never_recovered");

    if (!data.attack_train_attacks.empty()) {
      const std::size_t steps = data.attack_train_steps ? data.attack_train_steps : data.test_steps;
      SeriesFrame raw = procsim::simulate(plant, steps, data.attack_train_attacks,
                                          rng::derive_seed(seed, "attack_train"));
      auto rec = procsim::label_recovery(raw, plant, data.attack_train_attacks, data.band_tolerance);
      out.attack_train = std::move(rec.frame);
      if (rec.never_recovered) out.flags.push_back("attack_train_never_recovered");
    }
  } else {
    out.train = load_csv(data.train_path, data.schema);
    out.test = load_csv(data.test_path, data.schema);
    if (!data.attack_train_path.empty()) {
      out.attack_train = load_csv(data.attack_train_path, data.schema);
    }
  }
  if (!out.test.has_labels()) throw ValidationError("test capture must be labeled");
  if (out.train.has_labels()) {
    for (std::uint8_t l : out.train.labels()) {
      if (l) throw ValidationError("eavesdropped training capture must contain no anomalies");
    }
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Detector adapters

class Detector {
public:
  virtual ~Detector() = default;
  const std::string& name() const { return name_; }
  virtual void train(const SeriesFrame& benign, const SeriesFrame* attack_run) = 0;
  virtual AlarmSeries evaluate(const SeriesFrame& test) const = 0;
  /// Model files / rule exports; returns written paths.
  virtual std::vector<std::string> save_artifacts(const std::string& dir) const { (void)dir; return {}; }
  /// Score/statistic series behind the verdicts, for external plotting.
  virtual std::vector<std::string> export_series(const SeriesFrame& test, const std::string& dir) const {
    (void)test;
    (void)dir;
    return {};
  }
  const std::vector<std::string>& flags() const { return flags_; }

protected:
  explicit Detector(std::string name) : name_(std::move(name)) {}
  std::string name_;
  std::vector<std::string> flags_;
};

class PasadDetector : public Detector {
public:
  PasadDetector(std::string name, const json& p) : Detector(std::move(name)) {
    column_ = p.at("column").get<std::string>();
    lag_ = p.at("lag").get<std::size_t>();
    subspace_dim_ = p.at("subspace_dim").get<std::size_t>();
    theta_ = p.at("theta").get<double>();
    train_len_ = p.value("train_len", std::size_t{0});
  }

  void train(const SeriesFrame& benign, const SeriesFrame*) override {
    const auto series = benign.column_values(column_);
    const std::size_t n = train_len_ ? train_len_ : series.size();
    model_ = pasad::train(series, n, lag_, subspace_dim_);
    model_.theta = theta_;
    if (model_.effective_rank < subspace_dim_) flags_.push_back("subspace_exceeds_effective_rank");
  }

  AlarmSeries evaluate(const SeriesFrame& test) const override {
    return pasad::detect(model_, test.column_values(column_), theta_);
  }

  std::vector<std::string> save_artifacts(const std::string& dir) const override {
    const std::string path = dir + "/" + name_ + "_model.json";
    model_.save(path);
    return {path};
  }

  std::vector<std::string> export_series(const SeriesFrame& test, const std::string& dir) const override {
    const std::string path = dir + "/" + name_ + "_departure.csv";
    pasad::write_score_csv(pasad::score(model_, test.column_values(column_)), model_.lag - 1, path);
    return {path};
  }

private:
  std::string column_;
  std::size_t lag_ = 0;
  std::size_t subspace_dim_ = 0;
  std::size_t train_len_ = 0;
  double theta_ = 0.0;
  pasad::PasadModel model_;
};

class ArCusumDetector : public Detector {
public:
  ArCusumDetector(std::string name, const json& p) : Detector(std::move(name)) {
    column_ = p.at("column").get<std::string>();
    order_ = p.value("order", std::size_t{20});
    params_.control_limit = p.value("control_limit", 5.5);
    params_.min_mean_shift = p.value("min_mean_shift", 1.0);
  }

  void train(const SeriesFrame& benign, const SeriesFrame*) override {
    model_ = arcusum::fit_ar(benign.column_values(column_), order_);
    if (model_.degenerate) flags_.push_back("degenerate_ar_model");
  }

  AlarmSeries evaluate(const SeriesFrame& test) const override {
    const auto series = test.column_values(column_);
    const auto res = arcusum::residuals(model_, series);
    auto trace = arcusum::cusum_detect(res, params_, model_.residual_std, model_.residual_mean, order_);
    return std::move(trace.alarms);
  }

  std::vector<std::string> save_artifacts(const std::string& dir) const override {
    const std::string path = dir + "/" + name_ + "_model.json";
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << model_.to_json_string();
    return {path};
  }

  std::vector<std::string> export_series(const SeriesFrame& test, const std::string& dir) const override {
    const auto series = test.column_values(column_);
    const auto res = arcusum::residuals(model_, series);
    const auto trace =
        arcusum::cusum_detect(res, params_, model_.residual_std, model_.residual_mean, order_);
    const std::string path = dir + "/" + name_ + "_cusum.csv";
    arcusum::write_cusum_csv(res, trace, path);
    return {path};
  }

private:
  std::string column_;
  std::size_t order_ = 20;
  arcusum::CusumParams params_;
  arcusum::ArModel model_;
};

class InvariantDetector : public Detector {
public:
  InvariantDetector(std::string name, const json& p, std::uint64_t seed) : Detector(std::move(name)) {
    config_.max_components = p.value("max_components", 4);
    config_.epsilon = p.value("epsilon", 0.05);
    config_.alpha = p.value("alpha", 0.1);
    config_.gamma = p.value("gamma", 1.0);
    config_.mis.floor_fraction = p.value("mis_floor", 0.05);
    config_.mis.beta = p.value("mis_beta", 0.4);
    config_.min_event_occurrences = p.value("min_event_occurrences", std::size_t{20});
    config_.seed = seed;
  }

  void train(const SeriesFrame& benign, const SeriesFrame*) override {
    model_ = invariants::train(benign, config_);
    if (!model_.warnings.empty()) flags_.push_back("events_omitted");
  }

  AlarmSeries evaluate(const SeriesFrame& test) const override {
    return invariants::detect(model_, invariants::encode_transactions(model_, test));
  }

  std::vector<std::string> save_artifacts(const std::string& dir) const override {
    const std::string text_path = dir + "/" + name_ + "_rules.txt";
    const std::string csv_path = dir + "/" + name_ + "_rules.csv";
    invariants::write_rules_text(model_, text_path);
    invariants::write_rules_csv(model_, csv_path);
    return {text_path, csv_path};
  }

  const invariants::InvariantModel& model() const { return model_; }

private:
  invariants::InvariantConfig config_;
  invariants::InvariantModel model_;
};

class TraceSvmDetector : public Detector {
public:
  TraceSvmDetector(std::string name, const json& p) : Detector(std::move(name)) {
    spec_.delay = p.value("delay", std::size_t{100});
    spec_.mode = tracesvm::trace_mode_from_name(p.value("mode", std::string("spatiotemporal")));
    if (p.contains("sensors")) spec_.sensors = p.at("sensors").get<std::vector<std::string>>();
    c_ = p.value("C", 1.0);
    kernel_.type = p.value("kernel", std::string("rbf")) == "linear" ? tracesvm::Kernel::Type::kLinear
                                                                     : tracesvm::Kernel::Type::kRbf;
    kernel_.gamma = p.value("gamma", 0.0);
    stride_ = p.value("train_stride", std::size_t{1});
    one_class_ = p.value("variant", std::string("two_class")) == "one_class";
    nu_ = p.value("nu", 0.1);
    tol_ = p.value("tol", 1e-3);
  }

  void train(const SeriesFrame& benign, const SeriesFrame* attack_run) override {
    if (spec_.sensors.empty()) {
      for (const auto& c : benign.columns()) {
        if (c.kind == ColumnKind::kSensorContinuous) spec_.sensors.push_back(c.name);
      }
    }
    const auto benign_traces = tracesvm::subsample(tracesvm::build_traces(benign, spec_), stride_);
    if (one_class_) {
      oc_model_ = tracesvm::train_ocsvm(benign_traces.features, nu_, kernel_, tol_);
      return;
    }
    if (!attack_run) {
      throw ValidationError("two-class trace SVM needs an attack training capture");
    }
    const auto attack_traces = tracesvm::subsample(tracesvm::build_traces(*attack_run, spec_), stride_);
    Eigen::MatrixXd features(benign_traces.features.rows() + attack_traces.features.rows(),
                             benign_traces.features.cols());
    features << benign_traces.features, attack_traces.features;
    std::vector<std::uint8_t> labels = benign_traces.labels;
    labels.insert(labels.end(), attack_traces.labels.begin(), attack_traces.labels.end());
    model_ = tracesvm::train_svm(features, labels, c_, kernel_, tol_);
  }

  AlarmSeries evaluate(const SeriesFrame& test) const override {
    const auto traces = tracesvm::build_traces(test, spec_);
    const auto verdicts = one_class_ ? tracesvm::predict(oc_model_, traces.features)
                                     : tracesvm::predict(model_, traces.features);
    return tracesvm::trace_alarms(verdicts, traces.delay, traces.frame_rows);
  }

  std::vector<std::string> save_artifacts(const std::string& dir) const override {
    const std::string path = dir + "/" + name_ + "_model.json";
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << (one_class_ ? oc_model_.to_json_string() : model_.to_json_string());
    return {path};
  }

private:
  tracesvm::TraceFeatureSpec spec_;
  double c_ = 1.0;
  tracesvm::Kernel kernel_;
  std::size_t stride_ = 1;
  bool one_class_ = false;
  double nu_ = 0.1;
  double tol_ = 1e-3;
  tracesvm::SvmModel model_;
  tracesvm::OcSvmModel oc_model_;
};

std::unique_ptr<Detector> make_detector(const DetectorConfig& config, std::uint64_t seed) {
  const json p = json::parse(config.params_json);
  if (config.type == "pasad") return std::make_unique<PasadDetector>(config.name, p);
  if (config.type == "arcusum") return std::make_unique<ArCusumDetector>(config.name, p);
  if (config.type == "invariants") {
    return std::make_unique<InvariantDetector>(config.name, p, rng::derive_seed(seed, "detector/" + config.name));
  }
  if (config.type == "tracesvm") return std::make_unique<TraceSvmDetector>(config.name, p);
  throw ValidationError("unknown detector type '" + config.type + "'");
}

std::uint64_t label_fingerprint(const std::vector<std::uint8_t>& labels) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : labels) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::optional<double> delta(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

}  // namespace

ResiliencyReport run(const BenchConfig& config) {
  ResiliencyReport report;
  {
    json fp;
    fp["seed"] = config.seed;
    fp["detectors"] = json::array();
    for (const auto& d : config.detectors) fp["detectors"].push_back(json::parse(d.params_json));
    fp["plans"] = json::array();
    for (const auto& p : config.plans) {
      fp["plans"].push_back({{"id", p.id},
                             {"technique", spoofer::technique_name(p.technique)},
                             {"columns", p.columns},
                             {"sigma_scale", p.sigma_scale},
                             {"seed", p.seed}});
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(rng::fnv1a64(fp.dump())));
    report.config_fingerprint = buf;
  }

  const MaterializedData data = materialize_data(config.data, config.seed);
  report.global_flags = data.flags;
  report.global_flags.push_back("population_statistics");
  report.global_flags.push_back("warmup_steps_excluded");

  const auto tuning = compute_stats(data.train);
  const std::uint64_t label_fp = label_fingerprint(data.test.labels());

  for (const auto& detector_config : config.detectors) {
    std::unique_ptr<Detector> detector;
    std::string train_error;
    const auto train_start = std::chrono::steady_clock::now();
    try {
      detector = make_detector(detector_config, config.seed);
      detector->train(data.train, data.attack_train ? &*data.attack_train : nullptr);
    } catch (const std::exception& e) {
      train_error = e.what();
    }
    const double train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - train_start).count();

    metrics::ScoreSet baseline;
    // Baseline row.
    {
      ReportRow row;
      row.detector = detector_config.name;
      row.plan_id = "baseline";
      row.technique = "none";
      row.runtime_seconds = train_seconds;
      if (train_error.empty()) {
        try {
          const auto t0 = std::chrono::steady_clock::now();
          const AlarmSeries alarms = detector->evaluate(data.test);
          row.runtime_seconds +=
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          baseline = metrics::scores(
              metrics::confusion(alarms.values, data.test.labels(), alarms.exclude_mask()));
          row.scores = baseline;
          row.baseline = baseline;
          row.recall_delta = 0.0;
          row.fpr_delta = 0.0;
          row.flags = detector->flags();
        } catch (const std::exception& e) {
          row.failed = true;
          row.flags.push_back(std::string("error:") + e.what());
        }
      } else {
        row.failed = true;
        row.flags.push_back("error:" + train_error);
      }
      report.has_failures = report.has_failures || row.failed;
      report.rows.push_back(std::move(row));
    }

    for (const auto& plan : config.plans) {
      ReportRow row;
      row.detector = detector_config.name;
      row.plan_id = plan.id;
      row.technique = spoofer::technique_name(plan.technique);
      row.n_spoofed_columns = plan.columns.empty() ? data.test.cols() : plan.columns.size();
      if (!train_error.empty()) {
        row.failed = true;
        row.flags.push_back("error:" + train_error);
        report.has_failures = true;
        report.rows.push_back(std::move(row));
        continue;
      }
      try {
        const auto t0 = std::chrono::steady_clock::now();
        auto spoofed = spoofer::apply(plan, data.test, tuning, data.train);
        if (label_fingerprint(spoofed.frame.labels()) != label_fp) {
          throw std::logic_error("spoofing altered the ground-truth labels");
        }
        const AlarmSeries alarms = detector->evaluate(spoofed.frame);
        row.runtime_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.scores = metrics::scores(
            metrics::confusion(alarms.values, data.test.labels(), alarms.exclude_mask()));
        row.baseline = baseline;
        row.recall_delta = delta(row.scores.recall, baseline.recall);
        row.fpr_delta = delta(row.scores.fpr, baseline.fpr);
        for (const auto& w : spoofed.warnings) row.flags.push_back(w);
      } catch (const std::exception& e) {
        row.failed = true;
        row.flags.push_back(std::string("error:") + e.what());
      }
      report.has_failures = report.has_failures || row.failed;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

ResiliencyReport sweep_constrained(const BenchConfig& config, spoofer::Technique technique,
                                   const std::vector<std::string>& column_order,
                                   const std::vector<std::size_t>& counts) {
  BenchConfig sweep = config;
  sweep.plans.clear();
  for (std::size_t count : counts) {
    if (count == 0 || count > column_order.size()) {
      throw ValidationError("sweep count out of range");
    }
    spoofer::SpoofPlan plan;
    plan.technique = technique;
    plan.id = spoofer::technique_name(technique) + "_k" + std::to_string(count);
    plan.columns.assign(column_order.begin(), column_order.begin() + static_cast<std::ptrdiff_t>(count));
    plan.seed = rng::derive_seed(config.seed, "sweep/" + plan.id);
    sweep.plans.push_back(std::move(plan));
  }
  return run(sweep);
}

namespace {

std::string row_to_csv(const ReportRow& row) {
  std::ostringstream out;
  out << row.detector << ',' << row.plan_id << ',' << row.technique << ',' << row.n_spoofed_columns
      << ',' << metrics::score_to_string(row.scores.accuracy) << ','
      << metrics::score_to_string(row.scores.precision) << ','
      << metrics::score_to_string(row.scores.recall) << ','
      << metrics::score_to_string(row.scores.f1) << ',' << metrics::score_to_string(row.scores.fpr)
      << ',' << metrics::score_to_string(row.baseline.recall) << ','
      << metrics::score_to_string(row.recall_delta) << ','
      << metrics::score_to_string(row.fpr_delta) << ',' << join_flags(row.flags);
  return out.str();
}

}  // namespace

namespace {

const DetectorConfig& find_detector_config(const BenchConfig& config, const std::string& name) {
  for (const auto& d : config.detectors) {
    if (d.name == name) return d;
  }
  throw ValidationError("no detector named '" + name + "' in the config");
}

}  // namespace

std::vector<std::string> train_artifacts(const BenchConfig& config, const std::string& detector_name,
                                         const std::string& out_dir) {
  const auto& dc = find_detector_config(config, detector_name);
  const MaterializedData data = materialize_data(config.data, config.seed);
  auto detector = make_detector(dc, config.seed);
  detector->train(data.train, data.attack_train ? &*data.attack_train : nullptr);
  return detector->save_artifacts(out_dir);
}

EvaluateResult evaluate_detector(const BenchConfig& config, const std::string& detector_name,
                                 const std::string& plan_id, const std::string& out_dir) {
  const auto& dc = find_detector_config(config, detector_name);
  const MaterializedData data = materialize_data(config.data, config.seed);
  auto detector = make_detector(dc, config.seed);
  detector->train(data.train, data.attack_train ? &*data.attack_train : nullptr);

  SeriesFrame target = data.test;
  if (!plan_id.empty()) {
    const spoofer::SpoofPlan* plan = nullptr;
    for (const auto& p : config.plans) {
      if (p.id == plan_id) plan = &p;
    }
    if (!plan) throw ValidationError("no plan named '" + plan_id + "' in the config");
    target = spoofer::apply(*plan, data.test, compute_stats(data.train), data.train).frame;
  }

  const AlarmSeries alarms = detector->evaluate(target);

  EvaluateResult result;
  result.scores =
      metrics::scores(metrics::confusion(alarms.values, data.test.labels(), alarms.exclude_mask()));

  const std::string alarms_path = out_dir + "/" + detector_name +
                                  (plan_id.empty() ? std::string("_baseline") : "_" + plan_id) +
                                  "_alarms.csv";
  std::ofstream out(alarms_path);
  if (!out) throw ValidationError("cannot write '" + alarms_path + "'");
  out << "step,alarm,label,warmup\n";
  for (std::size_t i = 0; i < alarms.values.size(); ++i) {
    out << i << ',' << static_cast<int>(alarms.values[i]) << ','
        << static_cast<int>(data.test.labels()[i]) << ',' << (i < alarms.warmup ? 1 : 0) << '\n';
  }
  result.artifacts.push_back(alarms_path);
  for (auto& path : detector->export_series(target, out_dir)) result.artifacts.push_back(path);
  return result;
}

void write_report_csv(const ResiliencyReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "detector,plan_id,technique,n_spoofed_columns,accuracy,precision,recall,f1,fpr,"
         "baseline_recall,recall_delta,fpr_delta,flags\n";
  for (const auto& row : report.rows) out << row_to_csv(row) << '\n';
}

std::string render_report_markdown(const ResiliencyReport& report) {
  std::ostringstream out;
  out << "# Resiliency report\n\n";
  out << "- config fingerprint: `" << report.config_fingerprint << "`\n";
  out << "- flags: " << (report.global_flags.empty() ? "none" : join_flags(report.global_flags))
      << "\n\n";
  out << "| detector | plan | technique | cols | accuracy | precision | recall | f1 | fpr | "
         "baseline recall | recall delta | fpr delta | flags |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : report.rows) {
    out << "| " << row.detector << " | " << row.plan_id << " | " << row.technique << " | "
        << row.n_spoofed_columns << " | " << metrics::score_to_string(row.scores.accuracy, 4)
        << " | " << metrics::score_to_string(row.scores.precision, 4) << " | "
        << metrics::score_to_string(row.scores.recall, 4) << " | "
        << metrics::score_to_string(row.scores.f1, 4) << " | "
        << metrics::score_to_string(row.scores.fpr, 4) << " | "
        << metrics::score_to_string(row.baseline.recall, 4) << " | "
        << metrics::score_to_string(row.recall_delta, 4) << " | "
        << metrics::score_to_string(row.fpr_delta, 4) << " | " << join_flags(row.flags) << " |\n";
  }
  return out.str();
}

}  // namespace icsbench::bench
