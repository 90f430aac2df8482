#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "icsbench/bench.hpp"
#include "icsbench/metrics.hpp"
#include "icsbench/series_frame.hpp"
#include "icsbench/spoofer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

void print_scores(const icsbench::metrics::ScoreSet& s) {
  using icsbench::metrics::score_to_string;
  std::cout << "accuracy=" << score_to_string(s.accuracy) << " precision=" << score_to_string(s.precision)
            << " recall=" << score_to_string(s.recall) << " f1=" << score_to_string(s.f1)
            << " fpr=" << score_to_string(s.fpr) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor-spoofing resiliency workbench for model-free ICS anomaly detectors"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "bench config JSON")->required();
  app.add_option("--out", out_dir, "output directory");

  auto* cmd_simulate = app.add_subcommand("simulate", "generate the configured captures as CSV");

  std::string detector_name;
  auto* cmd_train = app.add_subcommand("train", "train one detector and save its artifacts");
  cmd_train->add_option("--detector", detector_name, "detector name from the config")->required();

  std::string plan_id;
  auto* cmd_spoof = app.add_subcommand("spoof", "apply one spoof plan to the test capture");
  cmd_spoof->add_option("--plan", plan_id, "plan id from the config")->required();

  auto* cmd_evaluate = app.add_subcommand("evaluate", "train + score one detector");
  cmd_evaluate->add_option("--detector", detector_name, "detector name from the config")->required();
  cmd_evaluate->add_option("--plan", plan_id, "spoof plan id (omit for the unspoofed baseline)");

  auto* cmd_report = app.add_subcommand("report", "run the full resiliency loop");

  std::string sweep_technique = "replay";
  std::vector<std::size_t> sweep_counts;
  std::vector<std::string> sweep_columns;
  auto* cmd_sweep = app.add_subcommand("sweep", "constrained-attack sweep over column counts");
  cmd_sweep->add_option("--technique", sweep_technique, "constant|gaussian|gaussian_v2|replay");
  cmd_sweep->add_option("--counts", sweep_counts, "spoofed column counts")->required();
  cmd_sweep->add_option("--columns", sweep_columns, "column order (default: dataset order)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const auto config = icsbench::bench::BenchConfig::load(config_path);
    ensure_dir(out_dir);

    if (*cmd_simulate) {
      const auto data = icsbench::bench::materialize_data(config.data, config.seed);
      icsbench::write_csv(data.train, out_dir + "/train.csv");
      icsbench::write_csv(data.test, out_dir + "/test.csv");
      std::cout << "wrote " << out_dir << "/train.csv and " << out_dir << "/test.csv\n";
      if (data.attack_train) {
        icsbench::write_csv(*data.attack_train, out_dir + "/attack_train.csv");
        std::cout << "wrote " << out_dir << "/attack_train.csv\n";
      }
      for (const auto& flag : data.flags) std::cout << "flag: " << flag << "\n";
      return kExitOk;
    }

    if (*cmd_train) {
      for (const auto& path : icsbench::bench::train_artifacts(config, detector_name, out_dir)) {
        std::cout << "wrote " << path << "\n";
      }
      return kExitOk;
    }

    if (*cmd_spoof) {
      const auto data = icsbench::bench::materialize_data(config.data, config.seed);
      const icsbench::spoofer::SpoofPlan* plan = nullptr;
      for (const auto& p : config.plans) {
        if (p.id == plan_id) plan = &p;
      }
      if (!plan) throw icsbench::ValidationError("no plan named '" + plan_id + "' in the config");
      auto result =
          icsbench::spoofer::apply(*plan, data.test, icsbench::compute_stats(data.train), data.train);
      const std::string path = out_dir + "/test_" + plan_id + ".csv";
      icsbench::write_csv(result.frame, path);
      std::cout << "wrote " << path << "\n";
      for (const auto& w : result.warnings) std::cout << "warning: " << w << "\n";
      return kExitOk;
    }

    if (*cmd_evaluate) {
      const auto result = icsbench::bench::evaluate_detector(config, detector_name, plan_id, out_dir);
      print_scores(result.scores);
      for (const auto& path : result.artifacts) std::cout << "wrote " << path << "\n";
      return kExitOk;
    }

    if (*cmd_report) {
      const auto report = icsbench::bench::run(config);
      icsbench::bench::write_report_csv(report, out_dir + "/report.csv");
      std::ofstream md(out_dir + "/report.md");
      md << icsbench::bench::render_report_markdown(report);
      std::cout << "wrote " << out_dir << "/report.csv and " << out_dir << "/report.md\n";
      if (report.has_failures) {
        std::cerr << "some (detector, plan) cells failed; see the flags column\n";
        return kExitRuntime;
      }
      return kExitOk;
    }

    if (*cmd_sweep) {
      std::vector<std::string> order = sweep_columns;
      if (order.empty()) {
        const auto data = icsbench::bench::materialize_data(config.data, config.seed);
        for (const auto& c : data.test.columns()) order.push_back(c.name);
      }
      const auto report = icsbench::bench::sweep_constrained(
          config, icsbench::spoofer::technique_from_name(sweep_technique), order, sweep_counts);
      icsbench::bench::write_report_csv(report, out_dir + "/sweep.csv");
      std::cout << "wrote " << out_dir << "/sweep.csv\n";
      return report.has_failures ? kExitRuntime : kExitOk;
    }
  } catch (const icsbench::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const icsbench::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
