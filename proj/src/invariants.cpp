#include "icsbench/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "icsbench/rng.hpp"

namespace icsbench::invariants {

std::string Predicate::label() const {
  std::ostringstream out;
  switch (kind) {
    case PredicateKind::kCategorical: {
      out << column << "=";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", actuator_value);
      out << buf;
      break;
    }
    case PredicateKind::kDistribution:
      out << column << "~c" << component;
      break;
    case PredicateKind::kNovelUpdate:
      out << column << "~novel";
      break;
    case PredicateKind::kEvent:
      out << "event" << event_index << "[" << column << "]";
      break;
  }
  return out.str();
}

int PredicateCatalog::add(Predicate p) {
  p.id = static_cast<int>(items_.size());
  items_.push_back(p);
  return p.id;
}

int PredicateCatalog::add_categorical(const std::string& column, double value) {
  Predicate p;
  p.kind = PredicateKind::kCategorical;
  p.column = column;
  p.actuator_value = value;
  const int id = add(p);
  categorical_[{column, value}] = id;
  return id;
}

int PredicateCatalog::add_distribution(const std::string& column, int component) {
  Predicate p;
  p.kind = PredicateKind::kDistribution;
  p.column = column;
  p.component = component;
  const int id = add(p);
  distribution_[{column, component}] = id;
  return id;
}

int PredicateCatalog::add_novel(const std::string& column) {
  Predicate p;
  p.kind = PredicateKind::kNovelUpdate;
  p.column = column;
  const int id = add(p);
  novel_[column] = id;
  return id;
}

int PredicateCatalog::add_event(int event_index) {
  Predicate p;
  p.kind = PredicateKind::kEvent;
  p.event_index = event_index;
  const int id = add(p);
  event_[event_index] = id;
  return id;
}

std::optional<int> PredicateCatalog::categorical_id(const std::string& column, double value) const {
  auto it = categorical_.find({column, value});
  if (it == categorical_.end()) return std::nullopt;
  return it->second;
}

int PredicateCatalog::distribution_id(const std::string& column, int component) const {
  return distribution_.at({column, component});
}

int PredicateCatalog::novel_id(const std::string& column) const { return novel_.at(column); }

int PredicateCatalog::event_id(int event_index) const { return event_.at(event_index); }

namespace {

std::vector<std::string> sensor_columns(const SeriesFrame& frame) {
  std::vector<std::string> out;
  for (const auto& c : frame.columns()) {
    if (c.kind == ColumnKind::kSensorContinuous) out.push_back(c.name);
  }
  return out;
}

std::vector<std::string> actuator_columns(const SeriesFrame& frame) {
  std::vector<std::string> out;
  for (const auto& c : frame.columns()) {
    if (c.kind == ColumnKind::kActuatorDiscrete) out.push_back(c.name);
  }
  return out;
}

}  // namespace

std::vector<std::size_t> event_steps(const SeriesFrame& frame, const EventSpec& event) {
  const std::size_t col = frame.column_index(event.actuator);
  std::vector<std::size_t> steps;
  for (std::size_t t = 1; t < frame.rows(); ++t) {
    if (frame.at(t - 1, col) == event.from_value && frame.at(t, col) == event.to_value) {
      steps.push_back(t);
    }
  }
  return steps;
}

LassoModel fit_event_lasso(const SeriesFrame& normalized, const EventSpec& event, double alpha,
                           double epsilon, std::size_t min_occurrences) {
  const auto steps = event_steps(normalized, event);
  if (steps.size() < min_occurrences) {
    throw ValidationError("event occurs only " + std::to_string(steps.size()) + " times");
  }
  const auto sensors = sensor_columns(normalized);
  std::vector<std::string> predictors;
  for (const auto& s : sensors) {
    if (s != event.target_sensor) predictors.push_back(s);
  }
  if (predictors.empty()) throw ValidationError("event lasso needs at least one predictor sensor");

  Eigen::MatrixXd x(steps.size(), predictors.size());
  Eigen::VectorXd y(steps.size());
  const std::size_t target_col = normalized.column_index(event.target_sensor);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = normalized.at(steps[i], target_col);
    for (std::size_t j = 0; j < predictors.size(); ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          normalized.at(steps[i], normalized.column_index(predictors[j]));
    }
  }

  const LassoFit fit = fit_lasso(x, y, alpha);
  LassoModel model;
  model.event = event;
  model.predictors = predictors;
  model.coefficients = fit.coefficients;
  model.intercept = fit.intercept;
  model.alpha = alpha;
  model.epsilon = epsilon;
  return model;
}

InvariantModel train(const SeriesFrame& training, const InvariantConfig& config) {
  if (training.rows() < 2) throw ValidationError("training capture too short");

  InvariantModel model;
  model.config = config;
  model.norm = fit_minmax(training);
  const SeriesFrame normalized = normalize_minmax(training, model.norm);

  const auto sensors = sensor_columns(normalized);
  const auto actuators = actuator_columns(normalized);

  // Categorical predicates from the observed actuator alphabets.
  for (const auto& name : actuators) {
    const auto values = normalized.column_values(name);
    std::set<double> alphabet(values.begin(), values.end());
    for (double v : alphabet) model.catalog.add_categorical(name, v);
    model.alphabets.emplace(name, std::move(alphabet));
  }

  // Distribution predicates: per-sensor GMM over one-step updates.
  for (const auto& name : sensors) {
    const auto values = normalized.column_values(name);
    std::vector<double> updates(values.size() - 1);
    for (std::size_t t = 1; t < values.size(); ++t) updates[t - 1] = values[t] - values[t - 1];
    GmmFitInfo info;
    GmmModel gmm = fit_update_gmm(updates, config.max_components,
                                  rng::derive_seed(config.seed, "gmm/" + name), &info);
    for (std::size_t c = 0; c < gmm.components.size(); ++c) {
      model.catalog.add_distribution(name, static_cast<int>(c));
    }
    model.catalog.add_novel(name);
    model.gmms.emplace(name, std::move(gmm));
    model.fit_infos.push_back(std::move(info));
  }

  // Event predicates: frequent actuator transitions, one regression per
  // (transition, target sensor).
  for (const auto& act : actuators) {
    const auto values = normalized.column_values(act);
    std::map<std::pair<double, double>, std::size_t> transition_counts;
    for (std::size_t t = 1; t < values.size(); ++t) {
      if (values[t] != values[t - 1]) ++transition_counts[{values[t - 1], values[t]}];
    }
    for (const auto& [transition, count] : transition_counts) {
      if (count < config.min_event_occurrences) {
        std::ostringstream warning;
        warning << "event " << act << ":" << transition.first << "->" << transition.second
                << " omitted (" << count << " occurrences)";
        model.warnings.push_back(warning.str());
        continue;
      }
      for (const auto& target : sensors) {
        EventSpec spec{act, transition.first, transition.second, target};
        LassoModel lasso =
            fit_event_lasso(normalized, spec, config.alpha, config.epsilon, config.min_event_occurrences);
        const int index = static_cast<int>(model.event_models.size());
        model.event_models.push_back(std::move(lasso));
        model.catalog.add_event(index);
      }
    }
  }

  const auto transactions = encode_transactions(model, training);
  const auto mis = compute_mis(transactions, model.catalog.size(), config.mis);
  model.rules = mine_rules(transactions, mis, config.gamma);
  return model;
}

std::vector<std::vector<int>> encode_transactions(const InvariantModel& model, const SeriesFrame& frame) {
  const SeriesFrame normalized = normalize_minmax(frame, model.norm);
  const auto sensors = sensor_columns(normalized);
  const auto actuators = actuator_columns(normalized);
  for (const auto& name : sensors) {
    if (model.gmms.find(name) == model.gmms.end()) {
      throw ValidationError("frame sensor '" + name + "' unknown to the invariant model");
    }
  }
  for (const auto& name : actuators) {
    if (model.alphabets.find(name) == model.alphabets.end()) {
      throw ValidationError("frame actuator '" + name + "' unknown to the invariant model");
    }
  }

  std::vector<std::size_t> sensor_idx;
  for (const auto& s : sensors) sensor_idx.push_back(normalized.column_index(s));

  std::vector<std::vector<int>> transactions(normalized.rows());
  for (std::size_t t = 0; t < normalized.rows(); ++t) {
    auto& txn = transactions[t];

    for (const auto& act : actuators) {
      const double v = normalized.at(t, normalized.column_index(act));
      if (auto id = model.catalog.categorical_id(act, v)) txn.push_back(*id);
    }

    if (t > 0) {
      for (std::size_t s = 0; s < sensors.size(); ++s) {
        const double update = normalized.at(t, sensor_idx[s]) - normalized.at(t - 1, sensor_idx[s]);
        const GmmModel& gmm = model.gmms.at(sensors[s]);
        if (gmm.log_density(update) >= gmm.novelty_cutoff) {
          txn.push_back(model.catalog.distribution_id(sensors[s], gmm.argmax_component(update)));
        } else {
          txn.push_back(model.catalog.novel_id(sensors[s]));
        }
      }

      for (std::size_t e = 0; e < model.event_models.size(); ++e) {
        const LassoModel& lasso = model.event_models[e];
        const std::size_t act_col = normalized.column_index(lasso.event.actuator);
        if (normalized.at(t - 1, act_col) != lasso.event.from_value ||
            normalized.at(t, act_col) != lasso.event.to_value) {
          continue;
        }
        Eigen::VectorXd predictors(static_cast<Eigen::Index>(lasso.predictors.size()));
        for (std::size_t j = 0; j < lasso.predictors.size(); ++j) {
          predictors(static_cast<Eigen::Index>(j)) = normalized.at(t, normalized.column_index(lasso.predictors[j]));
        }
        const double residual =
            std::abs(normalized.at(t, normalized.column_index(lasso.event.target_sensor)) -
                     lasso.predict(predictors));
        if (residual < lasso.epsilon) txn.push_back(model.catalog.event_id(static_cast<int>(e)));
      }
    }

    std::sort(txn.begin(), txn.end());
  }
  return transactions;
}

AlarmSeries detect(const InvariantModel& model, const std::vector<std::vector<int>>& transactions,
                   DetectionSources* sources) {
  AlarmSeries alarms;
  alarms.values.assign(transactions.size(), 0);
  if (sources) {
    sources->novel.assign(transactions.size(), 0);
    sources->rule_categorical.assign(transactions.size(), 0);
    sources->rule_distribution.assign(transactions.size(), 0);
    sources->rule_event.assign(transactions.size(), 0);
  }

  std::vector<int> novel_ids;
  for (const auto& p : model.catalog.predicates()) {
    if (p.kind == PredicateKind::kNovelUpdate) novel_ids.push_back(p.id);
  }

  for (std::size_t t = 0; t < transactions.size(); ++t) {
    const auto& txn = transactions[t];
    bool alarm = false;

    for (int id : novel_ids) {
      if (std::binary_search(txn.begin(), txn.end(), id)) {
        alarm = true;
        if (sources) sources->novel[t] = 1;
      }
    }

    for (const auto& rule : model.rules) {
      if (std::binary_search(txn.begin(), txn.end(), rule.consequent)) continue;
      if (!std::includes(txn.begin(), txn.end(), rule.antecedent.begin(), rule.antecedent.end())) continue;
      alarm = true;
      if (!sources) break;
      switch (model.catalog.kind_of(rule.consequent)) {
        case PredicateKind::kCategorical: sources->rule_categorical[t] = 1; break;
        case PredicateKind::kDistribution: sources->rule_distribution[t] = 1; break;
        case PredicateKind::kEvent: sources->rule_event[t] = 1; break;
        case PredicateKind::kNovelUpdate: sources->rule_distribution[t] = 1; break;
      }
    }
    alarms.values[t] = alarm ? 1 : 0;
  }
  return alarms;
}

void write_rules_text(const InvariantModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  for (const auto& rule : model.rules) {
    out << "{";
    for (std::size_t i = 0; i < rule.antecedent.size(); ++i) {
      if (i) out << ", ";
      out << model.catalog.predicates()[static_cast<std::size_t>(rule.antecedent[i])].label();
    }
    out << "} -> " << model.catalog.predicates()[static_cast<std::size_t>(rule.consequent)].label();
    char buf[64];
    std::snprintf(buf, sizeof buf, "  support=%llu confidence=%.6f",
                  static_cast<unsigned long long>(rule.support), rule.confidence);
    out << buf << "\n";
  }
}

void write_rules_csv(const InvariantModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "antecedent,consequent,support,confidence\n";
  for (const auto& rule : model.rules) {
    for (std::size_t i = 0; i < rule.antecedent.size(); ++i) {
      if (i) out << '|';
      out << model.catalog.predicates()[static_cast<std::size_t>(rule.antecedent[i])].label();
    }
    out << ',' << model.catalog.predicates()[static_cast<std::size_t>(rule.consequent)].label();
    char buf[64];
    std::snprintf(buf, sizeof buf, ",%llu,%.6f\n", static_cast<unsigned long long>(rule.support),
                  rule.confidence);
    out << buf;
  }
}

}  // namespace icsbench::invariants
