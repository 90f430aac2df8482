#include "icsbench/mining.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

namespace icsbench::invariants {

namespace {

/// Transaction-id set as a packed bitset.
struct TidSet {
  std::vector<std::uint64_t> words;

  explicit TidSet(std::size_t bits = 0) : words((bits + 63) / 64, 0) {}

  void set(std::size_t i) { words[i / 64] |= std::uint64_t{1} << (i % 64); }

  std::uint64_t count() const {
    std::uint64_t c = 0;
    for (auto w : words) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
  }

  static TidSet intersect(const TidSet& a, const TidSet& b) {
    TidSet out;
    out.words.resize(a.words.size());
    for (std::size_t i = 0; i < a.words.size(); ++i) out.words[i] = a.words[i] & b.words[i];
    return out;
  }
};

struct FrequentItemset {
  std::vector<int> items;  // sorted by id
  std::uint64_t support = 0;
  TidSet tids;
};

}  // namespace

std::vector<double> compute_mis(const std::vector<std::vector<int>>& transactions, int item_count,
                                const MisParams& params) {
  std::vector<std::uint64_t> support(static_cast<std::size_t>(item_count), 0);
  for (const auto& t : transactions) {
    for (int item : t) {
      if (item < 0 || item >= item_count) throw std::invalid_argument("item id out of range");
      ++support[static_cast<std::size_t>(item)];
    }
  }
  const double floor = params.floor_fraction * static_cast<double>(transactions.size());
  std::vector<double> mis(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    mis[i] = std::max(floor, params.beta * static_cast<double>(support[i]));
  }
  return mis;
}

std::vector<Rule> mine_rules(const std::vector<std::vector<int>>& transactions,
                             const std::vector<double>& mis, double gamma,
                             std::size_t max_itemsets) {
  if (transactions.empty()) throw std::invalid_argument("transaction database is empty");
  for (double m : mis) {
    if (m <= 0.0) throw std::invalid_argument("minimum supports must be positive");
  }
  const int item_count = static_cast<int>(mis.size());

  std::vector<TidSet> item_tids(static_cast<std::size_t>(item_count), TidSet(transactions.size()));
  for (std::size_t t = 0; t < transactions.size(); ++t) {
    for (int item : transactions[t]) {
      if (item < 0 || item >= item_count) throw std::invalid_argument("item id out of range");
      item_tids[static_cast<std::size_t>(item)].set(t);
    }
  }
  std::vector<std::uint64_t> item_support(static_cast<std::size_t>(item_count));
  for (int i = 0; i < item_count; ++i) item_support[static_cast<std::size_t>(i)] = item_tids[static_cast<std::size_t>(i)].count();

  // Items in ascending (mis, id) order. Every itemset is enumerated under
  // the root holding its smallest minimum support, so a fixed per-root
  // threshold restores downward closure within the branch.
  std::vector<int> order(static_cast<std::size_t>(item_count));
  for (int i = 0; i < item_count; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = mis[static_cast<std::size_t>(a)];
    const double mb = mis[static_cast<std::size_t>(b)];
    return ma != mb ? ma < mb : a < b;
  });

  std::vector<FrequentItemset> frequent;
  auto grow = [&](auto&& self, const FrequentItemset& node, std::size_t order_pos, double threshold) -> void {
    for (std::size_t pos = order_pos; pos < order.size(); ++pos) {
      const int item = order[pos];
      if (static_cast<double>(item_support[static_cast<std::size_t>(item)]) < threshold) continue;
      TidSet tids = TidSet::intersect(node.tids, item_tids[static_cast<std::size_t>(item)]);
      const std::uint64_t support = tids.count();
      if (static_cast<double>(support) < threshold) continue;
      FrequentItemset child;
      child.items = node.items;
      child.items.push_back(item);
      std::sort(child.items.begin(), child.items.end());
      child.support = support;
      child.tids = std::move(tids);
      if (frequent.size() >= max_itemsets) {
        throw std::runtime_error("frequent itemset cap exceeded; raise minimum supports");
      }
      frequent.push_back(child);
      self(self, child, pos + 1, threshold);
    }
  };

  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const int root = order[pos];
    const double threshold = mis[static_cast<std::size_t>(root)];
    if (static_cast<double>(item_support[static_cast<std::size_t>(root)]) < threshold) continue;
    FrequentItemset node;
    node.items = {root};
    node.support = item_support[static_cast<std::size_t>(root)];
    node.tids = item_tids[static_cast<std::size_t>(root)];
    frequent.push_back(node);
    grow(grow, node, pos + 1, threshold);
  }

  // Support lookup for antecedents that may not be frequent themselves.
  std::map<std::vector<int>, std::uint64_t> support_of;
  for (const auto& f : frequent) support_of[f.items] = f.support;
  auto subset_support = [&](const std::vector<int>& items) -> std::uint64_t {
    auto it = support_of.find(items);
    if (it != support_of.end()) return it->second;
    TidSet acc = item_tids[static_cast<std::size_t>(items[0])];
    for (std::size_t i = 1; i < items.size(); ++i) {
      acc = TidSet::intersect(acc, item_tids[static_cast<std::size_t>(items[i])]);
    }
    const std::uint64_t s = acc.count();
    support_of[items] = s;
    return s;
  };

  std::vector<Rule> candidates;
  for (const auto& f : frequent) {
    if (f.items.size() < 2) continue;
    for (std::size_t drop = 0; drop < f.items.size(); ++drop) {
      std::vector<int> antecedent;
      antecedent.reserve(f.items.size() - 1);
      for (std::size_t i = 0; i < f.items.size(); ++i) {
        if (i != drop) antecedent.push_back(f.items[i]);
      }
      const std::uint64_t ant_support = subset_support(antecedent);
      if (ant_support == 0) continue;
      const double confidence = static_cast<double>(f.support) / static_cast<double>(ant_support);
      if (confidence >= gamma) {
        candidates.push_back({std::move(antecedent), f.items[drop], f.support, confidence});
      }
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Rule& a, const Rule& b) {
    if (a.consequent != b.consequent) return a.consequent < b.consequent;
    if (a.antecedent.size() != b.antecedent.size()) return a.antecedent.size() < b.antecedent.size();
    return a.antecedent < b.antecedent;
  });

  std::vector<Rule> kept;
  for (const auto& rule : candidates) {
    bool subsumed = false;
    for (const auto& prior : kept) {
      if (prior.consequent != rule.consequent) continue;
      if (prior.antecedent.size() >= rule.antecedent.size()) continue;
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

}  // namespace icsbench::invariants
