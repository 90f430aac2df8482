#include <doctest.h>

#include <filesystem>

#include "icsbench/invariants.hpp"
#include "icsbench/procsim.hpp"

using namespace icsbench;
using namespace icsbench::invariants;

namespace {

/// Small deterministic capture: one actuator toggling, one sensor whose
/// update depends on the actuator, one independent noisy-ish sensor.
SeriesFrame toy_capture(std::size_t rows) {
  std::vector<ColumnMeta> columns = {{"S1", ColumnKind::kSensorContinuous},
                                     {"S2", ColumnKind::kSensorContinuous},
                                     {"P", ColumnKind::kActuatorDiscrete}};
  std::vector<double> values;
  double s1 = 0.0;
  for (std::size_t t = 0; t < rows; ++t) {
    const double p = (t / 25) % 2 ? 1.0 : 0.0;
    s1 += p ? 0.02 : -0.02;
    const double s2 = 0.5 + 0.3 * std::sin(0.07 * static_cast<double>(t));
    values.push_back(s1);
    values.push_back(s2);
    values.push_back(p);
  }
  return SeriesFrame::create(std::move(columns), std::move(values));
}

InvariantConfig fast_config() {
  InvariantConfig config;
  config.max_components = 3;
  config.min_event_occurrences = 10;
  config.seed = 42;
  return config;
}

}  // namespace

TEST_SUITE("invariants") {

TEST_CASE("training builds predicates of every kind") {
  const auto frame = toy_capture(600);
  const auto model = train(frame, fast_config());

  bool has_cat = false, has_dist = false, has_novel = false, has_event = false;
  for (const auto& p : model.catalog.predicates()) {
    switch (p.kind) {
      case PredicateKind::kCategorical: has_cat = true; break;
      case PredicateKind::kDistribution: has_dist = true; break;
      case PredicateKind::kNovelUpdate: has_novel = true; break;
      case PredicateKind::kEvent: has_event = true; break;
    }
  }
  CHECK(has_cat);
  CHECK(has_dist);
  CHECK(has_novel);
  CHECK(has_event);
  CHECK(model.alphabets.at("P") == std::set<double>{0.0, 1.0});
  // EM monotonicity recorded for every sensor fit
  for (const auto& info : model.fit_infos) {
    for (std::size_t i = 1; i < info.loglik_trace.size(); ++i) {
      REQUIRE(info.loglik_trace[i] >=
              info.loglik_trace[i - 1] - 1e-9 * (1.0 + std::abs(info.loglik_trace[i - 1])));
    }
  }
}

TEST_CASE("encoding: seen actuator values produce items, unseen none") {
  const auto frame = toy_capture(600);
  const auto model = train(frame, fast_config());

  auto test = toy_capture(80);
  const auto base = encode_transactions(model, test);
  const auto p_item = model.catalog.categorical_id("P", test.at(40, 2));
  REQUIRE(p_item.has_value());
  CHECK(std::binary_search(base[40].begin(), base[40].end(), *p_item));

  // force an unseen state
  test.cell(40, 2) = 7.0;
  const auto txns = encode_transactions(model, test);
  for (const auto& p : model.catalog.predicates()) {
    if (p.kind == PredicateKind::kCategorical && p.column == "P") {
      CHECK(!std::binary_search(txns[40].begin(), txns[40].end(), p.id));
    }
  }
}

TEST_CASE("encoding: in-range update maps to its component, outlier to novel") {
  const auto frame = toy_capture(600);
  const auto model = train(frame, fast_config());

  auto test = toy_capture(80);
  auto txns = encode_transactions(model, test);
  const int novel_s1 = model.catalog.novel_id("S1");
  for (const auto& txn : txns) CHECK(!std::binary_search(txn.begin(), txn.end(), novel_s1));

  // a huge jump on S1 is a novel update at that step
  test.cell(50, 0) = test.at(49, 0) + 100.0;
  txns = encode_transactions(model, test);
  CHECK(std::binary_search(txns[50].begin(), txns[50].end(), novel_s1));
}

TEST_CASE("step zero carries no update items") {
  const auto frame = toy_capture(600);
  const auto model = train(frame, fast_config());
  const auto txns = encode_transactions(model, frame.slice(0, 50));
  for (int id : txns[0]) {
    const auto kind = model.catalog.kind_of(id);
    CHECK(kind == PredicateKind::kCategorical);
  }
}

TEST_CASE("detect flags rule violations and novel updates") {
  const auto frame = toy_capture(600);
  const auto model = train(frame, fast_config());

  const auto clean = encode_transactions(model, frame.slice(100, 300));
  const auto clean_alarms = detect(model, clean);
  std::size_t clean_count = 0;
  for (auto v : clean_alarms.values) clean_count += v;
  // training-like data should be essentially quiet
  CHECK(clean_count <= clean.size() / 20);

  auto test = toy_capture(80);
  test.cell(50, 0) = test.at(49, 0) + 100.0;
  DetectionSources sources;
  const auto alarms = detect(model, encode_transactions(model, test), &sources);
  CHECK(alarms.values[50] == 1);
  CHECK(sources.novel[50] == 1);
}

TEST_CASE("empty transactions never alarm (arrested-system reading)") {
  const auto frame = toy_capture(600);
  auto model = train(frame, fast_config());
  std::vector<std::vector<int>> txns(10);
  const auto alarms = detect(model, txns);
  for (auto v : alarms.values) CHECK(v == 0);
}

TEST_CASE("event lasso is omitted below the occurrence floor with a warning") {
  const auto frame = toy_capture(600);
  auto config = fast_config();
  config.min_event_occurrences = 100000;
  const auto model = train(frame, config);
  CHECK(model.event_models.empty());
  CHECK(!model.warnings.empty());
}

TEST_CASE("fit_event_lasso rejects rare events") {
  const auto frame = toy_capture(600);
  const auto norm = normalize_minmax(frame, fit_minmax(frame));
  EventSpec spec{"P", 0.0, 1.0, "S1"};
  CHECK_THROWS_AS(fit_event_lasso(norm, spec, 0.1, 0.05, 100000), ValidationError);
  const auto model = fit_event_lasso(norm, spec, 0.1, 0.05, 5);
  CHECK(model.predictors == std::vector<std::string>{"S2"});
}

TEST_CASE("rule exports are written") {
  const auto frame = toy_capture(600);
  const auto model = train(frame, fast_config());
  const auto dir = std::filesystem::temp_directory_path();
  write_rules_text(model, (dir / "rules.txt").string());
  write_rules_csv(model, (dir / "rules.csv").string());
  CHECK(std::filesystem::file_size(dir / "rules.txt") > 0);
  CHECK(std::filesystem::file_size(dir / "rules.csv") > 0);
}

}  // TEST_SUITE
