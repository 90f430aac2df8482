#include <doctest.h>

#include <algorithm>
#include <bit>
#include <map>
#include <random>

#include "icsbench/mining.hpp"

using namespace icsbench::invariants;

namespace {

/// Exhaustive reference miner: enumerates every itemset over <= 16 items,
/// applies the multiple-minimum-support rule, confidence cut and the
/// minimal-antecedent filter. Kept independent of the production code
/// path on purpose.
std::vector<Rule> brute_force(const std::vector<std::vector<int>>& transactions,
                              const std::vector<double>& mis, double gamma) {
  const int m = static_cast<int>(mis.size());
  REQUIRE(m <= 16);
  std::vector<std::uint32_t> txn_bits;
  for (const auto& t : transactions) {
    std::uint32_t bits = 0;
    for (int item : t) bits |= 1u << item;
    txn_bits.push_back(bits);
  }
  auto support = [&](std::uint32_t set) {
    std::uint64_t c = 0;
    for (auto bits : txn_bits) {
      if ((bits & set) == set) ++c;
    }
    return c;
  };

  std::vector<Rule> candidates;
  for (std::uint32_t set = 1; set < (1u << m); ++set) {
    double min_mis = 1e300;
    for (int i = 0; i < m; ++i) {
      if (set & (1u << i)) min_mis = std::min(min_mis, mis[static_cast<std::size_t>(i)]);
    }
    const std::uint64_t sup = support(set);
    if (static_cast<double>(sup) < min_mis) continue;
    if (std::popcount(set) < 2) continue;
    for (int c = 0; c < m; ++c) {
      if (!(set & (1u << c))) continue;
      const std::uint32_t ant = set & ~(1u << c);
      const std::uint64_t ant_sup = support(ant);
      if (ant_sup == 0) continue;
      const double conf = static_cast<double>(sup) / static_cast<double>(ant_sup);
      if (conf < gamma) continue;
      Rule rule;
      for (int i = 0; i < m; ++i) {
        if (ant & (1u << i)) rule.antecedent.push_back(i);
      }
      rule.consequent = c;
      rule.support = sup;
      rule.confidence = conf;
      candidates.push_back(std::move(rule));
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

bool same_rules(std::vector<Rule> a, std::vector<Rule> b) {
  auto key = [](const Rule& r) { return std::make_tuple(r.consequent, r.antecedent); };
  auto cmp = [&](const Rule& x, const Rule& y) { return key(x) < key(y); };
  std::sort(a.begin(), a.end(), cmp);
  std::sort(b.begin(), b.end(), cmp);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (key(a[i]) != key(b[i])) return false;
    if (a[i].support != b[i].support) return false;
    if (std::abs(a[i].confidence - b[i].confidence) > 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("mining") {

TEST_CASE("hand example: {b}->a survives, {a}->b fails confidence") {
  const std::vector<std::vector<int>> txns = {{0, 1}, {0, 1}, {0}};  // a=0, b=1
  const std::vector<double> mis = {2.0, 2.0};
  const auto rules = mine_rules(txns, mis, 1.0);
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].antecedent == std::vector<int>{1});
  CHECK(rules[0].consequent == 0);
  CHECK(rules[0].support == 2);
  CHECK(rules[0].confidence == 1.0);
}

TEST_CASE("minimum supports above n produce nothing") {
  const std::vector<std::vector<int>> txns = {{0, 1}, {0, 1}};
  const auto rules = mine_rules(txns, {5.0, 5.0}, 1.0);
  CHECK(rules.empty());
}

TEST_CASE("compute_mis applies the floor and the per-item fraction") {
  std::vector<std::vector<int>> txns(100);
  for (std::size_t i = 0; i < 100; ++i) {
    txns[i].push_back(0);            // support 100
    if (i < 10) txns[i].push_back(1);  // support 10
  }
  MisParams params;  // floor 5%, beta 0.4
  const auto mis = compute_mis(txns, 2, params);
  CHECK(mis[0] == doctest::Approx(40.0));  // 0.4 * 100
  CHECK(mis[1] == doctest::Approx(5.0));   // floor
}

TEST_CASE("redundancy filter keeps the minimal antecedent") {
  // Items: 0 always, 1 always, 2 always -> {0}->2 subsumes {0,1}->2.
  const std::vector<std::vector<int>> txns = {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
  const auto rules = mine_rules(txns, {1.0, 1.0, 1.0}, 1.0);
  for (const auto& rule : rules) CHECK(rule.antecedent.size() == 1);
}

TEST_CASE("random databases match the brute-force reference exactly") {
  std::mt19937_64 rng(60601);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> item_count(3, 10);
    std::uniform_int_distribution<std::size_t> txn_count(5, 200);
    std::uniform_real_distribution<double> density(0.15, 0.6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int m = item_count(rng);
    const std::size_t n = txn_count(rng);
    const double p = density(rng);
    std::vector<std::vector<int>> txns(n);
    for (auto& t : txns) {
      for (int i = 0; i < m; ++i) {
        if (unit(rng) < p) t.push_back(i);
      }
    }
    std::vector<double> mis(static_cast<std::size_t>(m));
    for (auto& v : mis) v = 1.0 + std::floor(unit(rng) * 0.25 * static_cast<double>(n));

    std::uniform_real_distribution<double> gamma_dist(0.5, 1.0);
    const double gamma = trial % 3 == 0 ? 1.0 : gamma_dist(rng);
    const auto mined = mine_rules(txns, mis, gamma);
    const auto expected = brute_force(txns, mis, gamma);
    REQUIRE(same_rules(mined, expected));
  }
}

TEST_CASE("detection-style monotonicity: adding non-consequent items keeps a violation") {
  // Direct property of the subset semantics used by detect().
  const std::vector<std::vector<int>> txns = {{0, 1}, {0, 1}, {0}};
  const auto rules = mine_rules(txns, {2.0, 2.0}, 1.0);
  REQUIRE(rules.size() == 1);
  const auto& rule = rules[0];  // {1} -> 0
  std::vector<int> violating = {1, 2, 5};
  auto violated = [&](const std::vector<int>& txn) {
    return std::includes(txn.begin(), txn.end(), rule.antecedent.begin(), rule.antecedent.end()) &&
           !std::binary_search(txn.begin(), txn.end(), rule.consequent);
  };
  REQUIRE(violated(violating));
  for (int extra : {3, 4, 7}) {
    violating.push_back(extra);
    std::sort(violating.begin(), violating.end());
    CHECK(violated(violating));
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS(mine_rules({}, {1.0}, 1.0));
  CHECK_THROWS(mine_rules({{0}}, {0.0}, 1.0));
  CHECK_THROWS(mine_rules({{5}}, {1.0}, 1.0));
}

}  // TEST_SUITE
