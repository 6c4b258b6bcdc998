#include <random>

#include "doctest.h"
#include "hyperkg/errors.hpp"
#include "hyperkg/qc_rules.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace hyperkg;

namespace {

/// Exhaustive fixpoint: join every pair of facts until nothing changes.
RuleKB naive_close(RuleKB kb, RuleSet rules) {
  for (bool changed = true; changed;) {
    changed = false;
    const auto part_of = kb.part_of;
    for (const auto& [x, y] : kb.is_a) {
      for (const auto& [p, q] : part_of) {
        if (rules.a && y == p) changed |= kb.part_of.insert({x, q}).second;  // is_a(x,y), part_of(y,q)
        if (rules.b && q == x) changed |= kb.part_of.insert({p, y}).second;  // part_of(p,x), is_a(x,y)
      }
    }
  }
  return kb;
}

RuleKB random_kb(std::mt19937_64& rng, int n, int facts) {
  std::uniform_int_distribution<EntityId> e(0, n - 1);
  RuleKB kb;
  for (int i = 0; i < facts; ++i) {
    kb.is_a.insert({e(rng), e(rng)});
    kb.part_of.insert({e(rng), e(rng)});
  }
  return kb;
}

bool subset(const RuleKB& a, const RuleKB& b) {
  return std::includes(b.is_a.begin(), b.is_a.end(), a.is_a.begin(), a.is_a.end()) &&
         std::includes(b.part_of.begin(), b.part_of.end(), a.part_of.begin(), a.part_of.end());
}

RuleKB kb_of(const std::vector<Triple>& triples, RelationId is_a, RelationId part_of) {
  RuleKB kb;
  for (const auto& t : triples) {
    if (t.relation == is_a) kb.is_a.insert({t.subject, t.object});
    if (t.relation == part_of) kb.part_of.insert({t.subject, t.object});
  }
  return kb;
}

}  // namespace

TEST_CASE("rule set names") {
  CHECK(RuleSet::parse("a").a);
  CHECK_FALSE(RuleSet::parse("a").b);
  CHECK(RuleSet::parse("ab").b);
  CHECK(RuleSet::parse("b").to_string() == "b");
  CHECK_THROWS_AS(RuleSet::parse("c"), ConfigError);
  CHECK_THROWS_AS(RuleSet::parse(""), ConfigError);
}

TEST_CASE("closure examples") {
  // a = 0, b = 1, c = 2, d = 3
  RuleKB kb;
  kb.is_a = {{2, 1}};
  kb.part_of = {{1, 0}};
  const auto c = close_with_provenance(kb, {true, false});
  CHECK(c.kb.part_of == std::set<Edge>{{1, 0}, {2, 0}});
  CHECK(c.kb.is_a == kb.is_a);
  REQUIRE(c.derived.size() == 1);
  const auto& d = c.derived.at({2, 0});
  CHECK(d.rule == Rule::A);
  CHECK(d.is_a == Edge{2, 1});
  CHECK(d.part_of == Edge{1, 0});

  RuleKB no_part;
  no_part.is_a = {{0, 1}, {1, 2}};
  CHECK(close(no_part, {true, true}) == no_part);

  RuleKB chain;
  chain.is_a = {{3, 2}, {2, 1}};
  chain.part_of = {{1, 0}};
  const auto cc = close(chain, {true, false});
  CHECK(cc.part_of == std::set<Edge>{{1, 0}, {2, 0}, {3, 0}});
  CHECK(cc.part_of.size() + cc.is_a.size() == chain.part_of.size() + chain.is_a.size() + 2);

  // Rule b climbs is_a from the whole: part_of(x, y), is_a(y, z) -> part_of(x, z)
  RuleKB up;
  up.part_of = {{0, 1}};
  up.is_a = {{1, 2}, {2, 3}};
  CHECK(close(up, {false, true}).part_of == std::set<Edge>{{0, 1}, {0, 2}, {0, 3}});
  CHECK(close(up, {true, false}).part_of == up.part_of);
}

TEST_CASE("closure agrees with the exhaustive fixpoint") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const RuleKB kb = random_kb(rng, 12, 10);
    for (RuleSet rules : {RuleSet{true, false}, RuleSet{false, true}, RuleSet{true, true}}) {
      const auto c = close_with_provenance(kb, rules);
      CHECK(c.kb == naive_close(kb, rules));
      CHECK(close(c.kb, rules) == c.kb);  // idempotent
      for (const auto& [fact, d] : c.derived) {
        CHECK_FALSE(kb.part_of.contains(fact));
        CHECK(c.kb.is_a.contains(d.is_a));
        CHECK(c.kb.part_of.contains(d.part_of));
      }

      // Monotone: a sub-KB closes into a subset.
      RuleKB sub = kb;
      for (auto it = sub.part_of.begin(); it != sub.part_of.end();) {
        it = (rng() & 1) ? sub.part_of.erase(it) : std::next(it);
      }
      CHECK(subset(close(sub, rules), c.kb));
    }
  }
}

TEST_CASE("rule bodies are quasi-chained") {
  CHECK(is_quasi_chained(kRuleABody, 2));
  CHECK(is_quasi_chained(kRuleBBody, 2));
  constexpr RuleAtom both_shared[] = {{'i', 0, 1}, {'p', 1, 0}};
  CHECK_FALSE(is_quasi_chained(both_shared, 2));
}

TEST_CASE("generated datasets") {
  struct Case {
    WdConfig config;
    double entities;
    double train;
    std::size_t holdout;
  };
  for (const Case& tc : {Case{WdConfig::wd(1), 418, 550, 25}, Case{WdConfig::wd_plus_plus(1), 763, 1120, 40}}) {
    const auto g = generate_wd_like(tc.config);
    const auto& b = g.bundle;
    CHECK(b.n_relations() == 2);
    CHECK(std::abs(b.n_entities() - tc.entities) <= 0.2 * tc.entities);
    CHECK(std::abs(b.train.size() - tc.train) <= 0.2 * tc.train);
    CHECK(b.valid.size() == tc.holdout);
    CHECK(b.test.size() == tc.holdout);

    const RelationId is_a = *b.vocab.relations.find(kIsA);
    const RelationId part_of = *b.vocab.relations.find(kPartOf);
    const RuleKB train_kb = kb_of(b.train, is_a, part_of);
    const RuleKB closed = naive_close(train_kb, tc.config.rules);
    std::set<Triple> train_set(b.train.begin(), b.train.end());
    CHECK(train_set.size() == b.train.size());
    for (const auto* split : {&b.valid, &b.test}) {
      for (const auto& t : *split) {
        CHECK(t.relation == part_of);
        CHECK_FALSE(train_set.contains(t));
        CHECK(closed.part_of.contains({t.subject, t.object}));
      }
    }
    std::set<Triple> held(b.valid.begin(), b.valid.end());
    for (const auto& t : b.test) CHECK_FALSE(held.contains(t));

    REQUIRE(g.provenance.size() == 2 * tc.holdout);
    for (const auto& p : g.provenance) {
      CHECK(p.fact.relation == part_of);
      CHECK_FALSE(p.chain.empty());
    }
    if (tc.config.rules.b) CHECK(g.derived_by_rule.at(Rule::B) > 0);
    CHECK(g.derived_by_rule.at(Rule::A) > 0);
  }
}

TEST_CASE("generator determinism and files") {
  const auto a = generate_wd_like(WdConfig::wd(7));
  const auto b = generate_wd_like(WdConfig::wd(7));
  const auto c = generate_wd_like(WdConfig::wd(8));
  CHECK(a.bundle.train == b.bundle.train);
  CHECK(a.bundle.test == b.bundle.test);
  CHECK_FALSE(a.bundle.train == c.bundle.train);

  testutil::TempDir d1("gen1"), d2("gen2");
  write_generated_dataset(a, d1.path());
  write_generated_dataset(b, d2.path());
  for (const char* f : {"train.txt", "valid.txt", "test.txt", "provenance.json"}) {
    CHECK(testutil::read_file(d1 / f) == testutil::read_file(d2 / f));
  }
  const auto reloaded = load_dataset(d1.path());
  CHECK(reloaded.train.size() == a.bundle.train.size());
  CHECK(reloaded.n_entities() == a.bundle.n_entities());

  const auto js = nlohmann::json::parse(testutil::read_file(d1 / "provenance.json"));
  CHECK(js.at("holdout").size() == 50);
  CHECK(js.at("holdout")[0].contains("chain"));
  CHECK(js.at("n_relations") == 2);

  WdConfig impossible = WdConfig::wd(1);
  impossible.target_entities = 20;
  CHECK_THROWS_AS(generate_wd_like(impossible), ConfigError);
}
