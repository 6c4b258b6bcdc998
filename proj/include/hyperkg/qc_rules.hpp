#pragma once

// Forward chaining for the two quasi-chained rules
//   (a) is_a(x, y) & part_of(y, z) -> part_of(x, z)
//   (b) part_of(x, y) & is_a(y, z) -> part_of(x, z)
// and a synthetic generator for datasets whose held-out facts are
// consequents of these rules.

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperkg/kg_data.hpp"

namespace hyperkg {

enum class Rule { A, B };

struct RuleSet {
  bool a = false;
  bool b = false;

  /// "a", "b" or "ab".
  static RuleSet parse(std::string_view spec);
  std::string to_string() const;
};

using Edge = std::pair<EntityId, EntityId>;

struct RuleKB {
  std::set<Edge> is_a;
  std::set<Edge> part_of;

  friend bool operator==(const RuleKB&, const RuleKB&) = default;
};

/// The rule instance that first produced a derived part_of fact.
struct Derivation {
  Rule rule = Rule::A;
  Edge is_a;
  Edge part_of;
};

struct Closure {
  RuleKB kb;
  std::map<Edge, Derivation> derived;  // part_of facts not in the input
};

/// Least fixpoint under the selected rules, evaluated semi-naively (only
/// facts derived in the previous round are joined). is_a is never extended.
Closure close_with_provenance(const RuleKB& kb, RuleSet rules);
RuleKB close(const RuleKB& kb, RuleSet rules);

/// Body atoms of a rule as (relation, first variable, second variable).
struct RuleAtom {
  char relation;  // 'i' for is_a, 'p' for part_of
  int first;
  int second;
};

/// Each body atom shares at most one variable with the atoms before it.
constexpr bool is_quasi_chained(const RuleAtom* body, std::size_t n) {
  for (std::size_t i = 1; i < n; ++i) {
    const int vars[2] = {body[i].first, body[i].second};
    const int n_vars = vars[0] == vars[1] ? 1 : 2;
    int shared = 0;
    for (int k = 0; k < n_vars; ++k) {
      bool seen = false;
      for (std::size_t j = 0; j < i; ++j) {
        seen = seen || body[j].first == vars[k] || body[j].second == vars[k];
      }
      shared += seen ? 1 : 0;
    }
    if (shared > 1) return false;
  }
  return true;
}

// x = 0, y = 1, z = 2
inline constexpr RuleAtom kRuleABody[] = {{'i', 0, 1}, {'p', 1, 2}};
inline constexpr RuleAtom kRuleBBody[] = {{'p', 0, 1}, {'i', 1, 2}};
static_assert(is_quasi_chained(kRuleABody, 2));
static_assert(is_quasi_chained(kRuleBBody, 2));

struct WdConfig {
  std::size_t target_entities = 418;
  std::size_t derived_per_rule = 200;
  std::size_t holdout_per_split = 25;
  RuleSet rules{true, false};
  std::uint64_t seed = 0;

  /// Sized like the rule-(a) dataset: 418 entities, 550/25/25 facts.
  static WdConfig wd(std::uint64_t seed = 0);
  /// Sized like the rules-(a)+(b) dataset: 763 entities, 1120/40/40 facts.
  static WdConfig wd_plus_plus(std::uint64_t seed = 0);
};

struct ProvenanceEntry {
  Triple fact;
  std::string split;           // "valid" or "test"
  Rule rule = Rule::A;         // rule of the last step
  std::vector<Triple> chain;   // premises down to base facts, in derivation order
};

struct GeneratedDataset {
  DatasetBundle bundle;
  std::vector<ProvenanceEntry> provenance;
  std::size_t base_facts = 0;
  std::size_t derived_facts = 0;
  std::map<Rule, std::size_t> derived_by_rule;
};

/// Random is_a forest (branching 2-5, depth 3-5) plus part_of edges to a
/// set of "whole" entities, closed under the configured rules. Train holds
/// every base fact and most consequents; valid and test hold only part_of
/// consequents, each re-derivable from train. Throws ConfigError when the
/// structure cannot supply enough consequents.
GeneratedDataset generate_wd_like(const WdConfig& config);

/// train.txt, valid.txt, test.txt and provenance.json.
void write_generated_dataset(const GeneratedDataset& data, const std::filesystem::path& dir);

/// part_of / is_a relation names used by the generator.
inline constexpr std::string_view kIsA = "is_a";
inline constexpr std::string_view kPartOf = "part_of";

}  // namespace hyperkg
