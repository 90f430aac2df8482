// Implementations of the eight acceptance criteria. Each returns an
// Outcome whose notes carry the measured numbers so a failed run can be
// diagnosed from the log alone.

#include "acceptance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "icsbench/arcusum.hpp"
#include "icsbench/bench.hpp"
#include "icsbench/invariants.hpp"
#include "icsbench/metrics.hpp"
#include "icsbench/pasad.hpp"
#include "icsbench/procsim.hpp"
#include "icsbench/rng.hpp"
#include "icsbench/series_frame.hpp"
#include "icsbench/spoofer.hpp"
#include "icsbench/tracesvm.hpp"

namespace acceptance {

namespace {

using namespace icsbench;

void check(Outcome& outcome, bool condition, const std::string& label) {
  if (!condition) {
    outcome.pass = false;
    outcome.notes.push_back("FAILED: " + label);
  }
}

std::string fmt(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double recall_of(const AlarmSeries& alarms, const std::vector<std::uint8_t>& labels) {
  const auto counts = metrics::confusion(alarms.values, labels, alarms.exclude_mask());
  const auto scores = metrics::scores(counts);
  return scores.recall.value_or(0.0);
}

double fpr_of(const AlarmSeries& alarms, const std::vector<std::uint8_t>& labels) {
  const auto counts = metrics::confusion(alarms.values, labels, alarms.exclude_mask());
  const auto scores = metrics::scores(counts);
  return scores.fpr.value_or(0.0);
}

// Shared single-tank evaluation scenario (criteria 4 and 5): 20000
// eavesdropped steps, 10000 test steps, five actuator attacks mixing
// pump-off drains and over-driven pumping.
const std::vector<procsim::ActuatorAttack>& single_tank_attacks() {
  static const std::vector<procsim::ActuatorAttack> attacks = {
      {900, 1200, 0, 0.0},  {2600, 2950, 0, 1.5}, {4500, 4800, 0, 0.0},
      {6300, 6650, 0, 1.2}, {8200, 8500, 0, 1.8},
  };
  return attacks;
}

struct Scenario {
  SeriesFrame train;
  SeriesFrame test;
  std::map<std::string, ColumnStats> tuning;
};

Scenario single_tank_scenario() {
  const auto plant = procsim::PlantConfig::single_tank();
  Scenario s;
  s.train = procsim::simulate(plant, 20000, {}, rng::derive_seed(41, "train"));
  auto raw = procsim::simulate(plant, 10000, single_tank_attacks(), rng::derive_seed(41, "test"));
  s.test = procsim::label_recovery(raw, plant, single_tank_attacks(), 0.1).frame;
  s.tuning = compute_stats(s.train);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// 1. Spoofer contract suite: exact assertions on 100 randomized cases.

Outcome criterion_1_spoofer_contract() {
  Outcome outcome;
  std::mt19937_64 rng(0xc0ffee);
  std::uniform_int_distribution<std::size_t> rows_dist(60, 240);
  std::uniform_int_distribution<std::size_t> cols_dist(2, 6);
  std::uniform_real_distribution<double> value_dist(-50.0, 50.0);
  std::uniform_int_distribution<int> state_dist(0, 3);
  std::uniform_int_distribution<int> coin(0, 1);

  std::size_t checked_cells = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = rows_dist(rng);
    const std::size_t cols = cols_dist(rng);
    std::vector<ColumnMeta> metas;
    for (std::size_t c = 0; c < cols; ++c) {
      metas.push_back({"C" + std::to_string(c),
                       c % 2 ? ColumnKind::kActuatorDiscrete : ColumnKind::kSensorContinuous});
    }
    auto fill = [&](std::size_t n) {
      std::vector<double> values;
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          values.push_back(metas[c].kind == ColumnKind::kActuatorDiscrete
                               ? static_cast<double>(state_dist(rng))
                               : value_dist(rng));
        }
      }
      return values;
    };
    std::vector<std::uint8_t> labels(rows, 0);
    // two or three anomalous runs
    for (int run = 0; run < 2 + coin(rng); ++run) {
      const std::size_t start = rows / 5 + (rows / 3) * static_cast<std::size_t>(run);
      for (std::size_t k = start; k < std::min(rows, start + 8 + static_cast<std::size_t>(state_dist(rng)) * 5); ++k) {
        labels[k] = 1;
      }
    }
    const auto test = SeriesFrame::create(metas, fill(rows), labels);
    const auto eaves = SeriesFrame::create(metas, fill(rows + 40));
    const auto tuning = compute_stats(eaves);

    spoofer::SpoofPlan plan;
    plan.seed = rng();
    const int technique = trial % 4;
    plan.technique = static_cast<spoofer::Technique>(technique);
    plan.stat = coin(rng) ? spoofer::ConstantStat::kMean : spoofer::ConstantStat::kMedian;
    if (coin(rng)) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (coin(rng)) plan.columns.push_back(metas[c].name);
      }
      if (plan.columns.empty()) plan.columns.push_back(metas[0].name);
    }

    const auto result = spoofer::apply(plan, test, tuning, eaves);
    const auto& out = result.frame;
    const auto intervals = spoofer::find_intervals(test.labels());

    std::vector<bool> in_interval(rows, false);
    for (const auto& iv : intervals) {
      for (std::size_t k = iv.start; k <= iv.end; ++k) in_interval[k] = true;
    }
    std::set<std::string> spoofed(plan.columns.begin(), plan.columns.end());
    if (plan.columns.empty()) {
      for (const auto& m : metas) spoofed.insert(m.name);
    }

    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const bool column_in_plan = spoofed.count(metas[c].name) > 0;
        if (!in_interval[r] || !column_in_plan) {
          // outside-interval bit-identity and column closure
          if (out.at(r, c) != test.at(r, c)) {
            outcome.pass = false;
            outcome.notes.push_back(fmt("trial %d: untouched cell (%zu,%zu) changed", trial, r, c));
            return outcome;
          }
          ++checked_cells;
        }
      }
    }
    check(outcome, out.labels() == test.labels(), fmt("trial %d: labels changed", trial));

    for (const auto& iv : intervals) {
      for (const auto& name : spoofed) {
        const std::size_t c = out.column_index(name);
        const bool actuator = out.column(c).kind == ColumnKind::kActuatorDiscrete;
        switch (plan.technique) {
          case spoofer::Technique::kConstant: {
            for (std::size_t k = iv.start + 1; k <= iv.end; ++k) {
              check(outcome, out.at(k, c) - out.at(k - 1, c) == 0.0,
                    fmt("trial %d: constant first difference nonzero", trial));
            }
            break;
          }
          case spoofer::Technique::kReplay: {
            const std::size_t len = iv.end - iv.start + 1;
            const std::size_t positions = eaves.rows() - len + 1;
            const std::size_t start = iv.start % positions;
            const std::size_t src = eaves.column_index(name);
            for (std::size_t k = iv.start; k <= iv.end; ++k) {
              check(outcome, out.at(k, c) == eaves.at(start + (k - iv.start), src),
                    fmt("trial %d: replay row mismatch", trial));
            }
            break;
          }
          case spoofer::Technique::kGaussianV2: {
            if (actuator) {
              const auto& alphabet = tuning.at(name).observed_alphabet;
              for (std::size_t k = iv.start; k <= iv.end; ++k) {
                check(outcome, alphabet.count(out.at(k, c)) == 0,
                      fmt("trial %d: v2 actuator value inside the alphabet", trial));
              }
            }
            break;
          }
          case spoofer::Technique::kGaussian:
            break;
        }
      }
    }

    // determinism
    const auto again = spoofer::apply(plan, test, tuning, eaves);
    check(outcome, again.frame.values() == out.values(), fmt("trial %d: nondeterministic", trial));
    if (!outcome.pass) return outcome;
  }
  outcome.notes.push_back(fmt("100 cases, %zu untouched cells verified", checked_cells));
  return outcome;
}

// ---------------------------------------------------------------------------
// 2. Metrics oracle: naive per-step reference on 1000 random pairs plus the
// published NaN row shape (zero recall with defined precision 0, F1 NaN).

Outcome criterion_2_metrics_oracle() {
  Outcome outcome;
  std::mt19937_64 rng(0xfeed);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<std::size_t> length(1, 600);
  std::uniform_real_distribution<double> skew(0.05, 0.95);

  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = length(rng);
    const double p_label = skew(rng);
    const double p_alarm = skew(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::uint8_t> alarms(n), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = unit(rng) < p_label ? 1 : 0;
      alarms[i] = unit(rng) < p_alarm ? 1 : 0;
    }

    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] && alarms[i]) ++tp;
      if (labels[i] && !alarms[i]) ++fn;
      if (!labels[i] && alarms[i]) ++fp;
      if (!labels[i] && !alarms[i]) ++tn;
    }
    const auto counts = metrics::confusion(alarms, labels);
    check(outcome, counts.tp == tp && counts.fp == fp && counts.tn == tn && counts.fn == fn,
          "confusion counts differ from the per-step loop");

    const auto s = metrics::scores(counts);
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
    check(outcome, close(*s.accuracy, double(tp + tn) / double(n)), "accuracy mismatch");
    if (tp + fp > 0) {
      check(outcome, close(*s.precision, double(tp) / double(tp + fp)), "precision mismatch");
    } else {
      check(outcome, !s.precision.has_value(), "precision should be undefined");
    }
    if (tp + fn > 0) {
      check(outcome, close(*s.recall, double(tp) / double(tp + fn)), "recall mismatch");
    } else {
      check(outcome, !s.recall.has_value(), "recall should be undefined");
    }
    if (tn + fp > 0) {
      check(outcome, close(*s.fpr, double(fp) / double(tn + fp)), "fpr mismatch");
    } else {
      check(outcome, !s.fpr.has_value(), "fpr should be undefined");
    }
    if (s.precision && s.recall && *s.precision + *s.recall > 0.0) {
      check(outcome,
            close(*s.f1, 2.0 * *s.precision * *s.recall / (*s.precision + *s.recall)),
            "f1 mismatch");
    } else {
      check(outcome, !s.f1.has_value(), "f1 should be undefined");
    }
    if (!outcome.pass) return outcome;
  }

  // The all-missed spoofing row: recall 0, precision 0 (alarms exist, all
  // false), F1 undefined and rendered as NaN.
  metrics::ConfusionCounts missed;
  missed.tp = 0;
  missed.fp = 41;
  missed.tn = 8851;
  missed.fn = 1108;
  const auto s = metrics::scores(missed);
  check(outcome, *s.recall == 0.0, "missed-everything recall must be 0");
  check(outcome, *s.precision == 0.0, "missed-everything precision must be 0");
  check(outcome, !s.f1.has_value(), "missed-everything F1 must be undefined");
  check(outcome, metrics::score_to_string(s.f1) == "NaN", "undefined scores must render as NaN");
  check(outcome, *s.accuracy > 0.85, "accuracy stays near the negative-class share");
  outcome.notes.push_back("1000 random pairs matched the reference to 1e-12");
  return outcome;
}

// ---------------------------------------------------------------------------
// 3. Subspace detector numerics: dense-oracle principal angles and the
// closed-form constant and sinusoid cases.

Outcome criterion_3_pasad_numerics() {
  Outcome outcome;
  std::mt19937_64 rng(0xabcd);
  std::normal_distribution<double> g(0.0, 1.0);

  double worst_angle = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 220 + 15 * static_cast<std::size_t>(trial);
    const std::size_t lag = 30 + 2 * static_cast<std::size_t>(trial);  // <= 50
    const std::size_t r = 2 + 2 * (trial % 2);  // cut between sinusoid pairs
    const double period = 13.0 + 3.0 * trial;
    const double phase = 0.3 * g(rng);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i);
      s[i] = std::sin(2.0 * std::numbers::pi * t / period + phase) +
             0.5 * std::sin(2.0 * std::numbers::pi * t / (2.43 * period)) +
             0.25 * std::cos(2.0 * std::numbers::pi * t / (4.7 * period));
    }
    const auto model = pasad::train(s, n, lag, r);

    // Dense oracle over the explicit trajectory matrix.
    const std::size_t k = n - lag + 1;
    Eigen::MatrixXd x(lag, k);
    for (std::size_t i = 0; i < lag; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s[i + j];
      }
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU);
    const Eigen::MatrixXd u_oracle = svd.matrixU().leftCols(static_cast<Eigen::Index>(r));
    Eigen::BDCSVD<Eigen::MatrixXd> overlap(u_oracle.transpose() * model.basis);
    for (Eigen::Index i = 0; i < overlap.singularValues().size(); ++i) {
      worst_angle = std::max(worst_angle, std::acos(std::min(1.0, overlap.singularValues()(i))));
    }
  }
  check(outcome, worst_angle <= 1e-8, fmt("principal angle %.3e beyond 1e-8", worst_angle));
  outcome.notes.push_back(fmt("worst principal angle vs dense oracle: %.3e", worst_angle));

  // Constant series closed form.
  {
    const std::vector<double> s(400, 5.0);
    const auto model = pasad::train(s, 400, 40, 1);
    double basis_error = 0.0;
    for (std::size_t i = 0; i < 40; ++i) {
      basis_error = std::max(basis_error,
                             std::abs(model.basis(static_cast<Eigen::Index>(i), 0) - 1.0 / std::sqrt(40.0)));
    }
    check(outcome, basis_error <= 1e-9, "constant-series basis is not the all-ones direction");

    const auto d_same = pasad::score(model, std::vector<double>(100, 5.0));
    for (std::size_t j = 39; j < 100; ++j) {
      check(outcome, d_same[j] <= 1e-16, "constant continuation departure must vanish");
    }
    const double delta = 0.6;
    const auto d_shift = pasad::score(model, std::vector<double>(100, 5.6));
    for (std::size_t j = 39; j < 100; ++j) {
      check(outcome, std::abs(d_shift[j] - delta * delta * 40.0) <= 1e-6 * delta * delta * 40.0,
            "shifted-constant departure misses the closed form");
    }
  }

  // Sinusoid spans a two-dimensional lagged subspace.
  {
    std::vector<double> s(600);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 29.0);
    }
    const auto model = pasad::train(s, 600, 48, 2);
    Eigen::MatrixXd x(48, 600 - 48 + 1);
    for (std::size_t i = 0; i < 48; ++i) {
      for (std::size_t j = 0; j < 600 - 48 + 1; ++j) {
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s[i + j];
      }
    }
    const Eigen::MatrixXd residual = x - model.basis * (model.basis.transpose() * x);
    check(outcome, residual.norm() <= 1e-6 * x.norm(), "sinusoid is not rank-2 in the lagged space");
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// 4. Subspace detector evasion on the single-tank scenario.

Outcome criterion_4_pasad_evasion() {
  Outcome outcome;
  const auto scenario = single_tank_scenario();
  const auto level = scenario.train.column_values("TANK_LEVEL");
  auto model = pasad::train(level, 20000, 200, 6);

  // Threshold frozen from the committed seeded run: 2.5x the largest
  // training-window departure (1.46) rounds to 3.7.
  const double theta = 3.7;

  const auto test_level = scenario.test.column_values("TANK_LEVEL");
  const auto baseline = pasad::detect(model, test_level, theta);
  const double baseline_recall = recall_of(baseline, scenario.test.labels());
  const double baseline_fpr = fpr_of(baseline, scenario.test.labels());
  outcome.notes.push_back(fmt("baseline recall %.4f fpr %.4f", baseline_recall, baseline_fpr));
  check(outcome, baseline_recall >= 0.5, "baseline recall below 0.5");

  const char* techniques[] = {"replay", "constant", "gaussian"};
  for (const char* name : techniques) {
    spoofer::SpoofPlan plan;
    plan.id = name;
    plan.technique = spoofer::technique_from_name(name);
    plan.seed = rng::derive_seed(41, std::string("plan/") + name);
    const auto spoofed = spoofer::apply(plan, scenario.test, scenario.tuning, scenario.train);
    const auto alarms = pasad::detect(model, spoofed.frame.column_values("TANK_LEVEL"), theta);
    const double recall = recall_of(alarms, scenario.test.labels());
    const double fpr = fpr_of(alarms, scenario.test.labels());
    outcome.notes.push_back(fmt("%s recall %.4f fpr %.4f", name, recall, fpr));
    check(outcome, recall <= 0.2 * baseline_recall,
          fmt("%s recall %.4f above 0.2 x baseline", name, recall));
    check(outcome, fpr - baseline_fpr <= 0.02, fmt("%s fpr delta above +0.02", name));
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// 5. AR+CUSUM: estimation checks, the closed-form shift bound, and the
// spoofing responses on the single-tank scenario.

Outcome criterion_5_arcusum() {
  Outcome outcome;

  // AR(1) recovery within three standard errors.
  {
    rng::GaussianStream noise(555);
    const double a1 = 0.8;
    std::vector<double> s(5000);
    s[0] = 0.0;
    for (std::size_t k = 1; k < s.size(); ++k) s[k] = a1 * s[k - 1] + noise.next(0.0, 0.01);
    const auto model = arcusum::fit_ar(s, 1);
    const double se = std::sqrt((1.0 - a1 * a1) / static_cast<double>(s.size()));
    outcome.notes.push_back(fmt("AR(1) estimate %.4f (3 SE = %.4f)", model.coefficients(0), 3 * se));
    check(outcome, std::abs(model.coefficients(0) - a1) <= 3.0 * se, "AR(1) estimate off");
  }

  // Sustained 5-sigma residual shift: first alarm within ceil(5.5/4.5)+1
  // steps of onset.
  {
    std::vector<double> r(40, 0.0);
    for (std::size_t k = 20; k < r.size(); ++k) r[k] = 5.0;
    const auto trace = arcusum::cusum_detect(r, arcusum::CusumParams{5.5, 1.0}, 1.0, 0.0);
    std::size_t first = 0;
    for (std::size_t k = 20; k < r.size(); ++k) {
      if (trace.alarms.values[k]) {
        first = k;
        break;
      }
    }
    outcome.notes.push_back(fmt("5-sigma shift alarmed after %zu steps", first - 20 + 1));
    check(outcome, first >= 20 && first - 20 + 1 <= 3, "5-sigma shift alarm later than 3 steps");
  }

  const auto scenario = single_tank_scenario();
  const std::size_t order = 20;
  const auto model = arcusum::fit_ar(scenario.train.column_values("OUTFLOW_PRESSURE"), order);
  const arcusum::CusumParams params{5.5, 1.0};

  auto evaluate = [&](const SeriesFrame& frame) {
    const auto res = arcusum::residuals(model, frame.column_values("OUTFLOW_PRESSURE"));
    return arcusum::cusum_detect(res, params, model.residual_std, model.residual_mean, order);
  };

  const auto baseline = evaluate(scenario.test);
  const double baseline_recall = recall_of(baseline.alarms, scenario.test.labels());
  outcome.notes.push_back(fmt("baseline recall %.4f fpr %.4f sigma_r %.5f",
                              baseline_recall, fpr_of(baseline.alarms, scenario.test.labels()),
                              model.residual_std));

  auto spoof = [&](const char* technique, double sigma_scale) {
    spoofer::SpoofPlan plan;
    plan.id = technique;
    plan.technique = spoofer::technique_from_name(technique);
    plan.sigma_scale = sigma_scale;
    plan.seed = rng::derive_seed(51, std::string("plan/") + technique + std::to_string(sigma_scale));
    return spoofer::apply(plan, scenario.test, scenario.tuning, scenario.train).frame;
  };

  // Constant spoofing: both statistics decay to (exact) zero within 5p
  // steps of each interval start and stay there; recall collapses to 0.
  {
    const auto spoofed = spoof("constant", 1.0);
    const auto trace = evaluate(spoofed);
    const double recall = recall_of(trace.alarms, scenario.test.labels());
    outcome.notes.push_back(fmt("constant recall %.4f", recall));
    check(outcome, recall == 0.0, "constant spoofing recall must be exactly 0");
    for (const auto& iv : spoofer::find_intervals(scenario.test.labels())) {
      const std::size_t settle = iv.start + 5 * order;
      if (settle > iv.end) continue;
      for (std::size_t k = settle; k <= iv.end; ++k) {
        if (trace.upper[k] > 1e-6 || trace.lower[k] > 1e-6) {
          check(outcome, false,
                fmt("cusum statistic not <= 1e-6 at step %zu (interval start %zu)", k, iv.start));
          break;
        }
      }
    }
  }

  // Gaussian at full sigma stays detectable; at half sigma it hides.
  {
    const auto full = evaluate(spoof("gaussian", 1.0));
    const double full_recall = recall_of(full.alarms, scenario.test.labels());
    outcome.notes.push_back(fmt("gaussian sigma 1.0 recall %.4f", full_recall));
    check(outcome, full_recall >= baseline_recall, "gaussian sigma 1.0 recall below baseline");

    const auto half = evaluate(spoof("gaussian", 0.5));
    const double half_recall = recall_of(half.alarms, scenario.test.labels());
    outcome.notes.push_back(fmt("gaussian sigma 0.5 recall %.4f", half_recall));
    check(outcome, half_recall <= 0.2 * baseline_recall,
          "gaussian sigma 0.5 recall above 0.2 x baseline");
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// 6. Invariant detector: miner oracle, fit diagnostics, and the spoofing
// responses on the three-tank scenario.

namespace {

/// Exhaustive miner reference (duplicated here so the acceptance check
/// stays independent of the unit-test code).
std::vector<invariants::Rule> brute_force_rules(const std::vector<std::vector<int>>& txns,
                                                const std::vector<double>& mis, double gamma) {
  const int m = static_cast<int>(mis.size());
  std::vector<std::uint32_t> bits;
  for (const auto& t : txns) {
    std::uint32_t b = 0;
    for (int item : t) b |= 1u << item;
    bits.push_back(b);
  }
  auto support = [&](std::uint32_t set) {
    std::uint64_t c = 0;
    for (auto b : bits) {
      if ((b & set) == set) ++c;
    }
    return c;
  };
  std::vector<invariants::Rule> candidates;
  for (std::uint32_t set = 1; set < (1u << m); ++set) {
    if (std::popcount(set) < 2) continue;
    double min_mis = 1e300;
    for (int i = 0; i < m; ++i) {
      if (set & (1u << i)) min_mis = std::min(min_mis, mis[static_cast<std::size_t>(i)]);
    }
    const auto sup = support(set);
    if (static_cast<double>(sup) < min_mis) continue;
    for (int c = 0; c < m; ++c) {
      if (!(set & (1u << c))) continue;
      const auto ant_sup = support(set & ~(1u << c));
      if (!ant_sup) continue;
      const double conf = double(sup) / double(ant_sup);
      if (conf < gamma) continue;
      invariants::Rule rule;
      for (int i = 0; i < m; ++i) {
        if (i != c && (set & (1u << i))) rule.antecedent.push_back(i);
      }
      rule.consequent = c;
      rule.support = sup;
      rule.confidence = conf;
      candidates.push_back(std::move(rule));
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.consequent != b.consequent) return a.consequent < b.consequent;
    if (a.antecedent.size() != b.antecedent.size()) return a.antecedent.size() < b.antecedent.size();
    return a.antecedent < b.antecedent;
  });
  std::vector<invariants::Rule> kept;
  for (const auto& rule : candidates) {
    bool subsumed = false;
    for (const auto& prior : kept) {
      if (prior.consequent != rule.consequent || prior.antecedent.size() >= rule.antecedent.size()) continue;
      if (prior.confidence < rule.confidence) continue;
      if (std::includes(rule.antecedent.begin(), rule.antecedent.end(), prior.antecedent.begin(),
                        prior.antecedent.end())) {
        subsumed = true;
        break;
      }
    }
    if (!subsumed) kept.push_back(rule);
  }
  return kept;
}

}  // namespace

Outcome criterion_6_invariants() {
  Outcome outcome;

  // Miner vs brute force on 50 random databases.
  {
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<int> m_dist(3, 10);
    std::uniform_int_distribution<std::size_t> n_dist(10, 200);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const int m = m_dist(rng);
      const std::size_t n = n_dist(rng);
      std::vector<std::vector<int>> txns(n);
      for (auto& t : txns) {
        for (int i = 0; i < m; ++i) {
          if (unit(rng) < 0.4) t.push_back(i);
        }
      }
      std::vector<double> mis(static_cast<std::size_t>(m));
      for (auto& v : mis) v = 1.0 + std::floor(unit(rng) * 0.2 * static_cast<double>(n));
      const double gamma = trial % 2 ? 1.0 : 0.6 + 0.4 * unit(rng);
      const auto mined = invariants::mine_rules(txns, mis, gamma);
      const auto expected = brute_force_rules(txns, mis, gamma);
      bool equal = mined.size() == expected.size();
      auto sorted = mined;
      std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.consequent != b.consequent) return a.consequent < b.consequent;
        return a.antecedent < b.antecedent;
      });
      auto esorted = expected;
      std::sort(esorted.begin(), esorted.end(), [](const auto& a, const auto& b) {
        if (a.consequent != b.consequent) return a.consequent < b.consequent;
        return a.antecedent < b.antecedent;
      });
      for (std::size_t i = 0; equal && i < sorted.size(); ++i) {
        equal = sorted[i].antecedent == esorted[i].antecedent &&
                sorted[i].consequent == esorted[i].consequent &&
                sorted[i].support == esorted[i].support &&
                std::abs(sorted[i].confidence - esorted[i].confidence) <= 1e-12;
      }
      check(outcome, equal, fmt("miner differs from brute force on database %d", trial));
      if (!outcome.pass) return outcome;
    }
    outcome.notes.push_back("miner matched brute force on 50 databases");
  }

  // Three-tank scenario with over-driven pump attacks.
  const auto plant = procsim::PlantConfig::three_tank_cascade();
  const std::vector<procsim::ActuatorAttack> attacks = {
      {1100, 1160, 0, 5.0}, {2800, 2860, 0, 4.2}, {4600, 4660, 0, 5.5},
      {6900, 6960, 0, 4.8}, {8600, 8660, 0, 5.2},
  };
  const auto train = procsim::simulate(plant, 20000, {}, rng::derive_seed(61, "train"));
  auto raw = procsim::simulate(plant, 10000, attacks, rng::derive_seed(61, "test"));
  const auto test = procsim::label_recovery(raw, plant, attacks, 0.1).frame;
  const auto tuning = compute_stats(train);

  invariants::InvariantConfig config;
  config.seed = rng::derive_seed(61, "detector");
  const auto model = invariants::train(train, config);
  outcome.notes.push_back(fmt("%zu rules mined, %d predicates, %zu event models",
                              model.rules.size(), model.catalog.size(), model.event_models.size()));

  // EM monotonicity on every fit of this model.
  for (const auto& info : model.fit_infos) {
    for (std::size_t i = 1; i < info.loglik_trace.size(); ++i) {
      check(outcome,
            info.loglik_trace[i] >=
                info.loglik_trace[i - 1] - 1e-9 * (1.0 + std::abs(info.loglik_trace[i - 1])),
            "EM log-likelihood decreased");
    }
  }

  // Lasso KKT residuals on every event model, recomputed from the data.
  {
    const auto normalized = normalize_minmax(train, model.norm);
    for (const auto& lasso : model.event_models) {
      const auto steps = invariants::event_steps(normalized, lasso.event);
      Eigen::MatrixXd x(steps.size(), lasso.predictors.size());
      Eigen::VectorXd y(steps.size());
      for (std::size_t i = 0; i < steps.size(); ++i) {
        y(static_cast<Eigen::Index>(i)) = normalized.at(steps[i], normalized.column_index(lasso.event.target_sensor));
        for (std::size_t j = 0; j < lasso.predictors.size(); ++j) {
          x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              normalized.at(steps[i], normalized.column_index(lasso.predictors[j]));
        }
      }
      const Eigen::VectorXd residual =
          y - x * lasso.coefficients - Eigen::VectorXd::Constant(y.size(), lasso.intercept);
      const Eigen::VectorXd gradient = x.transpose() * residual / static_cast<double>(x.rows());
      for (Eigen::Index j = 0; j < gradient.size(); ++j) {
        if (lasso.coefficients(j) == 0.0) {
          check(outcome, std::abs(gradient(j)) <= lasso.alpha + 1e-6, "lasso KKT bound (zero coef)");
        } else {
          check(outcome,
                std::abs(gradient(j) - lasso.alpha * (lasso.coefficients(j) > 0 ? 1.0 : -1.0)) <= 1e-6,
                "lasso KKT bound (active coef)");
        }
      }
    }
  }

  auto recall_for = [&](const SeriesFrame& frame, invariants::DetectionSources* sources) {
    const auto alarms = invariants::detect(model, invariants::encode_transactions(model, frame), sources);
    return recall_of(alarms, test.labels());
  };

  const double baseline = recall_for(test, nullptr);
  outcome.notes.push_back(fmt("baseline recall %.4f", baseline));
  check(outcome, baseline > 0.0, "invariant baseline recall is zero");

  auto spoof = [&](spoofer::SpoofPlan plan) {
    plan.seed = rng::derive_seed(61, "plan/" + plan.id);
    return spoofer::apply(plan, test, tuning, train).frame;
  };

  // Unknown-state spoofing must not break any mined rule: no alarms from
  // categorical or event consequents.
  {
    spoofer::SpoofPlan plan;
    plan.id = "gnv2";
    plan.technique = spoofer::Technique::kGaussianV2;
    plan.actuator_mode = spoofer::ActuatorMode::kUnknownState;
    invariants::DetectionSources sources;
    const double recall = recall_for(spoof(plan), &sources);
    std::size_t categorical = 0, event = 0, novel = 0;
    for (std::size_t t = 0; t < sources.rule_categorical.size(); ++t) {
      categorical += sources.rule_categorical[t];
      event += sources.rule_event[t];
      novel += sources.novel[t];
    }
    outcome.notes.push_back(
        fmt("gaussian_v2 recall %.4f; alarms by source: categorical %zu event %zu novel %zu",
            recall, categorical, event, novel));
    check(outcome, categorical == 0, "unknown-state spoofing raised categorical alarms");
    check(outcome, event == 0, "unknown-state spoofing raised event alarms");
  }

  // Constant spoofing freezes updates into known components.
  {
    spoofer::SpoofPlan plan;
    plan.id = "constant";
    plan.technique = spoofer::Technique::kConstant;
    const double recall = recall_for(spoof(plan), nullptr);
    outcome.notes.push_back(fmt("constant recall %.4f (bound %.4f)", recall, 0.1 * baseline));
    check(outcome, recall <= 0.1 * baseline, "constant spoofing recall above 0.1 x baseline");
  }

  // Constrained replay over the attacked subsystem's columns.
  {
    spoofer::SpoofPlan plan;
    plan.id = "replay_c3";
    plan.technique = spoofer::Technique::kReplay;
    plan.columns = {"T1_LEVEL", "T1_PRESSURE", "PUMP1"};
    const double recall = recall_for(spoof(plan), nullptr);
    outcome.notes.push_back(fmt("constrained replay recall %.4f (bound %.4f)", recall, 0.3 * baseline));
    check(outcome, recall <= 0.3 * baseline, "constrained replay recall above 0.3 x baseline");
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// 7. Trace classifier: solver sanity plus the ablation matrix on the
// three-tank scenario.

Outcome criterion_7_tracesvm() {
  Outcome outcome;

  // XOR with an rbf kernel and linearly separable blobs.
  {
    Eigen::MatrixXd x(4, 2);
    x << 0, 0, 1, 1, 0, 1, 1, 0;
    const std::vector<std::uint8_t> y = {1, 1, 0, 0};
    tracesvm::Kernel kernel;
    kernel.gamma = 10.0;
    const auto model = tracesvm::train_svm(x, y, 10.0, kernel);
    const auto p = tracesvm::predict(model, x);
    check(outcome, p == y, "xor training accuracy below 1.0");
  }
  {
    std::mt19937_64 rng(0xb10b);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd x(120, 2);
    std::vector<std::uint8_t> y(120);
    for (int i = 0; i < 60; ++i) {
      x(i, 0) = g(rng);
      x(i, 1) = g(rng);
      y[static_cast<std::size_t>(i)] = 0;
      x(60 + i, 0) = 10.0 + g(rng);
      x(60 + i, 1) = 10.0 + g(rng);
      y[static_cast<std::size_t>(60 + i)] = 1;
    }
    tracesvm::Kernel kernel;
    kernel.type = tracesvm::Kernel::Type::kLinear;
    const auto model = tracesvm::train_svm(x, y, 1.0, kernel);
    const auto p = tracesvm::predict(model, x);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i) hits += p[i] == y[i];
    check(outcome, hits == y.size(), "separable blobs not perfectly classified");
  }

  // Bench config with the five model variants and four techniques.
  std::ostringstream config_json;
  config_json << R"({
    "seed": 71,
    "data": {
      "source": "procsim",
      "preset": "three_tank_cascade",
      "train_steps": 12000,
      "test_steps": 10000,
      "attack_train_steps": 10000,
      "band_tolerance": 0.1,
      "test_attacks": [
        {"start": 800,  "end": 1100, "actuator": 0, "value": 0.0},
        {"start": 2500, "end": 2800, "actuator": 0, "value": 2.5},
        {"start": 4300, "end": 4600, "actuator": 0, "value": 0.0},
        {"start": 6200, "end": 6500, "actuator": 0, "value": 3.0},
        {"start": 8100, "end": 8400, "actuator": 0, "value": 2.0}
      ],
      "attack_train_attacks": [
        {"start": 700,  "end": 1000, "actuator": 0, "value": 2.2},
        {"start": 2300, "end": 2600, "actuator": 0, "value": 0.0},
        {"start": 4100, "end": 4400, "actuator": 0, "value": 2.8},
        {"start": 6000, "end": 6300, "actuator": 0, "value": 0.0},
        {"start": 7900, "end": 8200, "actuator": 0, "value": 1.6}
      ]
    },
    "detectors": [
      {"type": "tracesvm", "name": "svm_st", "mode": "spatiotemporal", "delay": 100,
       "sensors": ["T1_LEVEL", "T1_PRESSURE", "T3_LEVEL"], "C": 10.0, "train_stride": 8},
      {"type": "tracesvm", "name": "svm_spatial", "mode": "spatial_only", "delay": 100,
       "sensors": ["T1_LEVEL", "T1_PRESSURE", "T3_LEVEL"], "C": 10.0, "train_stride": 8},
      {"type": "tracesvm", "name": "svm_temporal_uni", "mode": "temporal_univariate", "delay": 100,
       "sensors": ["T1_LEVEL"], "C": 10.0, "train_stride": 8},
      {"type": "tracesvm", "name": "svm_uni", "mode": "univariate", "delay": 100,
       "sensors": ["T1_LEVEL"], "C": 10.0, "train_stride": 8},
      {"type": "tracesvm", "name": "svm_oneclass", "mode": "spatiotemporal", "delay": 100,
       "sensors": ["T1_LEVEL", "T1_PRESSURE", "T3_LEVEL"], "variant": "one_class", "nu": 0.03,
       "train_stride": 8}
    ],
    "plans": [
      {"id": "constant_mean", "technique": "constant", "stat": "mean"},
      {"id": "constant_median", "technique": "constant", "stat": "median"},
      {"id": "gaussian", "technique": "gaussian"},
      {"id": "replay", "technique": "replay"}
    ]
  })";
  const auto config = bench::BenchConfig::from_json_string(config_json.str());
  const auto report = bench::run(config);
  check(outcome, !report.has_failures, "bench run reported failures");

  auto recall = [&](const std::string& detector, const std::string& plan) {
    for (const auto& row : report.rows) {
      if (row.detector == detector && row.plan_id == plan) return row.scores.recall.value_or(0.0);
    }
    return -1.0;
  };
  auto note_detector = [&](const std::string& name) {
    outcome.notes.push_back(fmt("%s: baseline %.3f mean %.3f median %.3f gaussian %.3f replay %.3f",
                                name.c_str(), recall(name, "baseline"), recall(name, "constant_mean"),
                                recall(name, "constant_median"), recall(name, "gaussian"),
                                recall(name, "replay")));
  };
  for (const char* d : {"svm_st", "svm_spatial", "svm_temporal_uni", "svm_uni", "svm_oneclass"}) {
    note_detector(d);
  }

  const double b_st = recall("svm_st", "baseline");
  check(outcome, recall("svm_st", "constant_mean") >= 0.9 * b_st, "spatiotemporal lost constant-mean");
  check(outcome, recall("svm_st", "constant_median") >= 0.9 * b_st, "spatiotemporal lost constant-median");
  check(outcome, recall("svm_st", "gaussian") >= 0.9 * b_st, "spatiotemporal lost gaussian");
  check(outcome, recall("svm_st", "replay") <= 0.1 * b_st, "replay failed to evade the spatiotemporal model");

  const double b_spatial = recall("svm_spatial", "baseline");
  check(outcome, recall("svm_spatial", "constant_median") <= 0.1 * b_spatial,
        "constant-median failed to evade the spatial-only ablation");

  for (const char* d : {"svm_temporal_uni", "svm_uni"}) {
    const double b = recall(d, "baseline");
    for (const char* p : {"constant_mean", "constant_median", "gaussian", "replay"}) {
      check(outcome, recall(d, p) <= 0.1 * b, fmt("%s: %s recall above 0.1 x baseline", d, p));
    }
  }

  const double b_oc = recall("svm_oneclass", "baseline");
  check(outcome, recall("svm_oneclass", "constant_mean") >= 0.9 * b_oc, "one-class lost constant-mean");
  check(outcome, recall("svm_oneclass", "constant_median") >= 0.9 * b_oc, "one-class lost constant-median");
  check(outcome, recall("svm_oneclass", "gaussian") >= 0.9 * b_oc, "one-class lost gaussian");
  return outcome;
}

// ---------------------------------------------------------------------------
// 8. End-to-end determinism and the committed golden report.

Outcome criterion_8_determinism() {
  Outcome outcome;
  const std::string source_dir = ICSBENCH_SOURCE_DIR;
  const auto config = bench::BenchConfig::load(source_dir + "/configs/default.json");

  const auto tmp = std::filesystem::temp_directory_path();
  const auto report_a = bench::run(config);
  const auto report_b = bench::run(config);
  bench::write_report_csv(report_a, (tmp / "golden_a.csv").string());
  bench::write_report_csv(report_b, (tmp / "golden_b.csv").string());

  auto read = [](const std::string& path) {
    std::ifstream in(path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  const auto a = read((tmp / "golden_a.csv").string());
  const auto b = read((tmp / "golden_b.csv").string());
  check(outcome, !a.empty(), "empty report");
  check(outcome, a == b, "two runs of the same config differ");
  check(outcome, bench::render_report_markdown(report_a) == bench::render_report_markdown(report_b),
        "markdown reports differ");
  check(outcome, !report_a.has_failures, "default config reported failures");

  const auto golden = read(source_dir + "/tests/golden/default_report.csv");
  check(outcome, !golden.empty(), "golden report missing");
  check(outcome, a == golden, "report does not reproduce the committed golden file");
  outcome.notes.push_back(fmt("report rows: %zu", report_a.rows.size()));
  return outcome;
}

}  // namespace acceptance
