#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "hyperkg/errors.hpp"
#include "hyperkg/kg_data.hpp"
#include "test_util.hpp"

using namespace hyperkg;
using testutil::TempDir;
using testutil::write_file;

namespace {

std::vector<Triple> parse(const std::string& text, Vocabulary& vocab) {
  TempDir dir("parse");
  write_file(dir / "f.txt", text);
  return load_triples(dir / "f.txt", vocab);
}

Triple T(EntityId s, RelationId r, EntityId o) { return Triple{s, r, o}; }

}  // namespace

TEST_CASE("load_triples parsing") {
  Vocabulary v;
  auto t = parse("a\tr\tb\n# comment\n\nb\tr\tc\r\na\tr\tb\n", v);
  REQUIRE(t.size() == 3);
  CHECK(t[0] == T(0, 0, 1));
  CHECK(t[1] == T(1, 0, 2));
  CHECK(t[2] == t[0]);  // duplicates preserved
  CHECK(v.entities.size() == 3);
  CHECK(v.entities.name(2) == "c");
  CHECK(v.relations.size() == 1);

  Vocabulary empty;
  CHECK(parse("", empty).empty());
  CHECK(empty.entities.size() == 0);

  Vocabulary bad;
  try {
    parse("a\tr\tb\na\tr\n", bad);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("a\tr\tb\tc\n", bad), DataError);
  CHECK_THROWS_AS(parse("a r b\n", bad), DataError);

  Vocabulary sealed;
  parse("a\tr\tb\n", sealed);
  sealed.sealed = true;
  CHECK_THROWS_AS(parse("a\tr\tz\n", sealed), DataError);
  CHECK(parse("b\tr\ta\n", sealed).size() == 1);

  CHECK_THROWS_AS(load_triples("/nonexistent/file.txt", v), DataError);
}

TEST_CASE("vocabulary round trip and write_triples") {
  TempDir dir("vocab");
  write_file(dir / "in.txt", "x\tp\ty\ny\tq\tz\nz\tp\tx\n");
  Vocabulary v;
  const auto t = load_triples(dir / "in.txt", v);
  for (std::int32_t id = 0; id < static_cast<std::int32_t>(v.entities.size()); ++id) {
    CHECK(v.entities.find(v.entities.name(id)) == id);
  }
  CHECK_FALSE(v.entities.find("nope").has_value());
  CHECK_THROWS_AS(v.entities.name(99), DataError);

  write_triples(dir / "out.txt", t, v);
  Vocabulary v2;
  CHECK(load_triples(dir / "out.txt", v2) == t);
  CHECK(v2.entities.fingerprint() == v.entities.fingerprint());

  SymbolTable a, b;
  a.intern("x");
  a.intern("y");
  b.intern("y");
  b.intern("x");
  CHECK(a.fingerprint() != b.fingerprint());
}

TEST_CASE("bernoulli statistics") {
  // a=0, b=1, c=2, d=3
  const std::vector<Triple> f{T(0, 0, 1), T(0, 0, 2), T(3, 0, 1)};
  const auto s = compute_bernoulli_stats(f, 1).at(0);
  CHECK(s.tph == 1.5);
  CHECK(s.hpt == 1.5);
  CHECK(s.p_corrupt_subject == 0.5);

  const std::vector<Triple> one_to_one{T(0, 0, 1), T(2, 0, 3), T(4, 0, 5)};
  const auto o = compute_bernoulli_stats(one_to_one, 1).at(0);
  CHECK(o.tph == 1.0);
  CHECK(o.hpt == 1.0);
  CHECK(o.p_corrupt_subject == 0.5);

  std::vector<Triple> fan;
  for (EntityId t = 1; t <= 5; ++t) fan.push_back(T(0, 0, t));
  fan.push_back(T(0, 0, 1));  // duplicate fact does not change distinct counts
  const auto n = compute_bernoulli_stats(fan, 2);
  CHECK(n.at(0).tph == 5.0);
  CHECK(n.at(0).hpt == 1.0);
  CHECK(n.at(0).p_corrupt_subject == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(n.at(0).p_corrupt_subject + (1.0 - n.at(0).p_corrupt_subject) == 1.0);
  CHECK_FALSE(n.has(1));
  CHECK_THROWS_AS(n.at(1), DataError);
}

TEST_CASE("filter index and bundle") {
  TempDir dir("bundle");
  write_file(dir / "train.txt", "a\tr\tb\na\tr\tc\n");
  write_file(dir / "valid.txt", "b\tr\tc\n");
  write_file(dir / "test.txt", "a\tr\tb\nd\ts\ta\n");
  const DatasetBundle b = load_dataset(dir.path());
  CHECK(b.n_entities() == 4);
  CHECK(b.n_relations() == 2);
  CHECK(b.vocab.entities.name(3) == "d");  // first appearance across train, valid, test
  CHECK(b.filter.size() == 4);             // union collapses the repeated fact
  for (const auto* split : {&b.train, &b.valid, &b.test}) {
    for (const auto& t : *split) CHECK(b.filter.contains(t));
  }
  const auto objs = b.filter.objects_of(0, 0);
  CHECK(std::set<EntityId>(objs.begin(), objs.end()) == std::set<EntityId>{1, 2});
  const auto subs = b.filter.subjects_of(0, 2);
  CHECK(std::set<EntityId>(subs.begin(), subs.end()) == std::set<EntityId>{0, 1});
  CHECK(b.filter.objects_of(3, 0).empty());

  TempDir missing("missing");
  write_file(missing / "train.txt", "a\tr\tb\n");
  try {
    load_dataset(missing.path());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("valid.txt") != std::string::npos);
  }
}

TEST_CASE("degree analysis") {
  const auto chain = degree_analysis(std::vector<Triple>{T(0, 0, 1), T(1, 0, 2)});
  CHECK(chain.degrees == std::vector<std::int64_t>{1, 2, 1});

  const auto loop = degree_analysis(std::vector<Triple>{T(0, 0, 0)});
  CHECK(loop.degrees == std::vector<std::int64_t>{2});

  std::mt19937_64 rng(4);
  std::uniform_int_distribution<EntityId> ent(0, 199);
  std::vector<Triple> random;
  for (int i = 0; i < 5000; ++i) random.push_back(T(ent(rng), 0, ent(rng)));
  const auto r = degree_analysis(random, 250);
  std::int64_t total = 0;
  for (auto d : r.degrees) total += d;
  CHECK(total == 2 * 5000);
  CHECK(r.degrees.size() == 250);
  CHECK(r.n_facts == 5000);
  double mass = 0.0;
  for (const auto& bin : r.histogram) {
    CHECK(bin.upper == 2 * bin.lower);  // ratio-2 bins
    mass += bin.pdf * static_cast<double>(bin.upper - bin.lower);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isfinite(r.alpha_hat));
  CHECK(r.alpha_hat > 1.0);

  TempDir dir("degrees");
  write_degree_report(r, dir / "d.csv", dir / "d.json");
  const std::string csv = testutil::read_file(dir / "d.csv");
  CHECK(csv.rfind("degree,pdf\n", 0) == 0);
  const std::string js = testutil::read_file(dir / "d.json");
  for (const char* key : {"alpha_hat", "d_min", "n_entities", "n_facts"}) {
    CHECK(js.find(key) != std::string::npos);
  }
}

TEST_CASE("power-law fit recovers the exponent") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto sample = testutil::sample_power_law(2.5, 100000, seed);
    const double a = fit_power_law_alpha(sample, 1);
    CHECK(a == doctest::Approx(2.5).epsilon(0.02));
    CHECK(std::abs(a - 2.5) <= 0.05);
  }
  // The 1/2-shift closed form is biased low at d_min = 1.
  const auto sample = testutil::sample_power_law(2.5, 100000, 9);
  CHECK(fit_power_law_alpha_shift(sample, 1) < 2.2);
  CHECK_THROWS(fit_power_law_alpha(std::vector<std::int64_t>{}, 1));
}
