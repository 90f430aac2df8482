#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "icsbench/metrics.hpp"
#include "icsbench/procsim.hpp"
#include "icsbench/series_frame.hpp"
#include "icsbench/spoofer.hpp"

namespace icsbench::bench {

struct DataConfig {
  enum class Source { kProcsim, kCsv };
  Source source = Source::kProcsim;

  // procsim
  std::string preset = "single_tank";
  std::optional<std::string> plant_json;  // overrides the preset
  std::size_t train_steps = 6000;
  std::size_t test_steps = 3000;
  std::size_t attack_train_steps = 0;
  double band_tolerance = 0.1;
  std::vector<procsim::ActuatorAttack> test_attacks;
  std::vector<procsim::ActuatorAttack> attack_train_attacks;

  // csv
  std::string train_path;
  std::string test_path;
  std::string attack_train_path;
  CsvSchema schema;
};

struct DetectorConfig {
  std::string type;  // pasad | arcusum | invariants | tracesvm
  std::string name;
  std::string params_json;  // type-specific knobs
};

struct BenchConfig {
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  DataConfig data;
  std::vector<DetectorConfig> detectors;
  std::vector<spoofer::SpoofPlan> plans;

  static BenchConfig from_json_string(const std::string& text);
  static BenchConfig load(const std::string& path);
};

struct ReportRow {
  std::string detector;
  std::string plan_id;
  std::string technique;
  std::size_t n_spoofed_columns = 0;
  metrics::ScoreSet scores;
  metrics::ScoreSet baseline;
  std::optional<double> recall_delta;
  std::optional<double> fpr_delta;
  std::vector<std::string> flags;
  double runtime_seconds = 0.0;
  bool failed = false;
};

struct ResiliencyReport {
  std::vector<ReportRow> rows;
  std::string config_fingerprint;
  std::vector<std::string> global_flags;
  bool has_failures = false;
};

/// Full resiliency loop: materialize data, train every configured
/// detector on the eavesdropped capture, score it on the unspoofed test
/// capture, then once per spoof plan. Deterministic for a fixed config.
ResiliencyReport run(const BenchConfig& config);

/// Constrained-attack sweep: one plan per count, spoofing the first k
/// columns of `column_order`.
ResiliencyReport sweep_constrained(const BenchConfig& config, spoofer::Technique technique,
                                   const std::vector<std::string>& column_order,
                                   const std::vector<std::size_t>& counts);

/// Fixed column set:
/// detector,plan_id,technique,n_spoofed_columns,accuracy,precision,recall,
/// f1,fpr,baseline_recall,recall_delta,fpr_delta,flags
void write_report_csv(const ResiliencyReport& report, const std::string& path);
std::string render_report_markdown(const ResiliencyReport& report);

/// Data materialization is shared with the CLI simulate/train subcommands.
struct MaterializedData {
  SeriesFrame train;
  SeriesFrame test;
  std::optional<SeriesFrame> attack_train;
  std::vector<std::string> flags;
};
MaterializedData materialize_data(const DataConfig& data, std::uint64_t seed);

/// Trains one configured detector and writes its model/rule artifacts
/// into out_dir; returns the written paths.
std::vector<std::string> train_artifacts(const BenchConfig& config, const std::string& detector_name,
                                         const std::string& out_dir);

struct EvaluateResult {
  metrics::ScoreSet scores;
  std::vector<std::string> artifacts;
};

/// Trains one detector, evaluates it on the test capture (spoofed by
/// plan_id when non-empty) and writes the alarm/score series CSVs.
EvaluateResult evaluate_detector(const BenchConfig& config, const std::string& detector_name,
                                 const std::string& plan_id, const std::string& out_dir);

}  // namespace icsbench::bench
