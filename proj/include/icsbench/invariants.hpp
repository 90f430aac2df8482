#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "icsbench/gmm.hpp"
#include "icsbench/lasso.hpp"
#include "icsbench/metrics.hpp"
#include "icsbench/mining.hpp"
#include "icsbench/series_frame.hpp"

namespace icsbench::invariants {

enum class PredicateKind { kCategorical, kDistribution, kNovelUpdate, kEvent };

struct Predicate {
  int id = 0;
  PredicateKind kind = PredicateKind::kCategorical;
  std::string column;
  double actuator_value = 0.0;  // categorical
  int component = 0;            // distribution
  int event_index = 0;          // event

  std::string label() const;
};

/// Stable item-id registry shared between training and test encoding.
class PredicateCatalog {
public:
  int add_categorical(const std::string& column, double value);
  int add_distribution(const std::string& column, int component);
  int add_novel(const std::string& column);
  int add_event(int event_index);

  std::optional<int> categorical_id(const std::string& column, double value) const;
  int distribution_id(const std::string& column, int component) const;
  int novel_id(const std::string& column) const;
  int event_id(int event_index) const;

  const std::vector<Predicate>& predicates() const { return items_; }
  int size() const { return static_cast<int>(items_.size()); }
  PredicateKind kind_of(int id) const { return items_[static_cast<std::size_t>(id)].kind; }

private:
  int add(Predicate p);
  std::vector<Predicate> items_;
  std::map<std::pair<std::string, double>, int> categorical_;
  std::map<std::pair<std::string, int>, int> distribution_;
  std::map<std::string, int> novel_;
  std::map<int, int> event_;
};

struct InvariantConfig {
  int max_components = 4;
  double epsilon = 0.05;
  double alpha = 0.1;
  double gamma = 1.0;
  MisParams mis;
  std::size_t min_event_occurrences = 20;
  std::uint64_t seed = 0;
};

struct InvariantModel {
  InvariantConfig config;
  NormalizationMap norm;
  std::map<std::string, GmmModel> gmms;
  std::map<std::string, std::set<double>> alphabets;
  std::vector<LassoModel> event_models;
  PredicateCatalog catalog;
  std::vector<Rule> rules;
  std::vector<std::string> warnings;
  std::vector<GmmFitInfo> fit_infos;
};

/// Steps t >= 1 where the actuator moved from the event's from-value to
/// its to-value.
std::vector<std::size_t> event_steps(const SeriesFrame& frame, const EventSpec& event);

/// Fits one event-driven Lasso: at every occurrence of the transition the
/// target sensor is regressed on all other sensors. Expects a normalized
/// frame. Throws when the event occurs fewer than min_occurrences times.
LassoModel fit_event_lasso(const SeriesFrame& normalized, const EventSpec& event, double alpha,
                           double epsilon, std::size_t min_occurrences = 20);

/// Predicate generation + invariant mining over a benign capture (raw
/// values; normalization is fitted and applied internally).
InvariantModel train(const SeriesFrame& training, const InvariantConfig& config);

/// One sorted item-id set per timestep. Unseen actuator values contribute
/// no item; sensor updates map to their argmax-responsibility component or
/// the per-sensor novel-update item; event predicates emit an item only
/// when the transition fires and the regression residual stays under
/// epsilon. Step 0 has no update items.
std::vector<std::vector<int>> encode_transactions(const InvariantModel& model, const SeriesFrame& frame);

/// Which predicate kinds drove each alarm (consequent kind for violated
/// rules; novel-update presence separately).
struct DetectionSources {
  std::vector<std::uint8_t> novel;
  std::vector<std::uint8_t> rule_categorical;
  std::vector<std::uint8_t> rule_distribution;
  std::vector<std::uint8_t> rule_event;
};

/// Alarms when some rule's antecedent holds but its consequent is absent,
/// or a novel-update item is present.
AlarmSeries detect(const InvariantModel& model, const std::vector<std::vector<int>>& transactions,
                   DetectionSources* sources = nullptr);

void write_rules_text(const InvariantModel& model, const std::string& path);
void write_rules_csv(const InvariantModel& model, const std::string& path);

}  // namespace icsbench::invariants
