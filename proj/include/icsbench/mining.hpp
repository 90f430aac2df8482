#pragma once

#include <cstdint>
#include <vector>

namespace icsbench::invariants {

/// Association rule antecedent -> consequent; support counts transactions
/// containing the full itemset.
struct Rule {
  std::vector<int> antecedent;  // sorted item ids
  int consequent = 0;
  std::uint64_t support = 0;
  double confidence = 0.0;

  bool operator==(const Rule&) const = default;
};

struct MisParams {
  /// Fraction of the transaction count used as the support floor LS.
  double floor_fraction = 0.05;
  /// Per-item factor: mis(i) = max(LS, beta * support(i)).
  double beta = 0.4;
};

/// Per-item minimum supports for the given database.
std::vector<double> compute_mis(const std::vector<std::vector<int>>& transactions, int item_count,
                                const MisParams& params);

/// Frequent-itemset mining under multiple minimum supports: an itemset I is
/// frequent when support(I) >= min over i in I of mis(i). Emits rules
/// (I \ {c}) -> c with confidence >= gamma, then keeps only rules with a
/// minimal antecedent per consequent (a rule is dropped when a kept rule
/// with the same consequent has a strict-subset antecedent and confidence
/// at least as high).
std::vector<Rule> mine_rules(const std::vector<std::vector<int>>& transactions,
                             const std::vector<double>& mis, double gamma = 1.0,
                             std::size_t max_itemsets = 1u << 20);

}  // namespace icsbench::invariants
