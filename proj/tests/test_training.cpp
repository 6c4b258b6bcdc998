#include <cmath>
#include <random>

#include "doctest.h"
#include "hyperkg/errors.hpp"
#include "hyperkg/training.hpp"
#include "test_util.hpp"

using namespace hyperkg;

namespace {

void set(std::span<double> dst, const Vector& v) { std::copy(v.begin(), v.end(), dst.begin()); }

/// Entities e0..e{n-1}, relations r0..r{m-1}; every triple goes to train.
DatasetBundle bundle_of(std::size_t n_entities, std::size_t n_relations, std::vector<Triple> train,
                        std::vector<Triple> valid = {}) {
  Vocabulary v;
  for (std::size_t i = 0; i < n_entities; ++i) v.entities.intern("e" + std::to_string(i));
  for (std::size_t i = 0; i < n_relations; ++i) v.relations.intern("r" + std::to_string(i));
  return make_bundle(std::move(train), std::move(valid), {}, std::move(v));
}

int differing_slots(const Triple& a, const Triple& b) {
  return (a.subject != b.subject) + (a.relation != b.relation) + (a.object != b.object);
}

}  // namespace

TEST_CASE("sample_negatives structure") {
  const auto b = bundle_of(6, 3, {{0, 0, 1}, {2, 1, 3}});
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const auto one = sample_negatives({0, 0, 1}, b, 1, 0, CorruptionMode::Bernoulli, rng);
    REQUIRE(one.size() == 1);
    CHECK(one[0].relation == 0);
    CHECK(differing_slots(one[0], {0, 0, 1}) == 1);

    const auto rel = sample_negatives({0, 0, 1}, b, 2, 3, CorruptionMode::Uniform, rng);
    REQUIRE(rel.size() == 5);
    for (int j = 0; j < 2; ++j) CHECK(rel[j].relation == 0);
    for (int j = 2; j < 5; ++j) {
      CHECK(rel[j].relation != 0);
      CHECK(rel[j].subject == 0);
      CHECK(rel[j].object == 1);
    }
  }
  CHECK_THROWS_AS(sample_negatives({0, 0, 1}, b, 0, 0, CorruptionMode::Uniform, rng), ConfigError);
  const auto single_rel = bundle_of(3, 1, {{0, 0, 1}});
  CHECK_THROWS_AS(sample_negatives({0, 0, 1}, single_rel, 0, 1, CorruptionMode::Uniform, rng),
                  DataError);
}

TEST_CASE("sample_negatives follows the bernoulli side probability") {
  // tph = 5, hpt = 1: p_corrupt_subject = 5/6
  std::vector<Triple> fan;
  for (EntityId t = 1; t <= 5; ++t) fan.push_back({0, 0, t});
  const auto b = bundle_of(8, 1, fan);
  Rng rng(12);
  int subject = 0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const auto n = sample_negatives(fan[0], b, 1, 0, CorruptionMode::Bernoulli, rng);
    subject += n[0].subject != fan[0].subject;
  }
  const double freq = static_cast<double>(subject) / kDraws;
  CHECK(freq >= 0.82);
  CHECK(freq <= 0.85);

  // Uniform mode, or a dataset flagged for uniform corruption, is a fair coin.
  auto flagged = b;
  flagged.uniform_corruption = true;
  for (const DatasetBundle* bundle : {&b, static_cast<const DatasetBundle*>(&flagged)}) {
    const auto mode = bundle == &b ? CorruptionMode::Uniform : CorruptionMode::Bernoulli;
    int s = 0;
    for (int i = 0; i < kDraws; ++i) {
      s += sample_negatives(fan[0], *bundle, 1, 0, mode, rng)[0].subject != 0;
    }
    CHECK(static_cast<double>(s) / kDraws == doctest::Approx(0.5).epsilon(0.02));
  }
}

TEST_CASE("hinge and regularizer values") {
  // One-dimensional store with beta = 0 and r = 0: f = 2 artanh(|s + o|).
  // Entity radius 0.5 caps a single entity; use two halves for the larger scores.
  auto split_store = [](double f_pos, double f_neg) {
    ParameterStore s(4, 1, 1, 0, Variant::EuclideanAdd);
    const double p = std::tanh(f_pos / 2.0) / 2.0;
    const double n = std::tanh(f_neg / 2.0) / 2.0;
    s.entity(0)[0] = p;
    s.entity(1)[0] = p;
    s.entity(2)[0] = -n;
    s.entity(3)[0] = -n;
    return s;
  };

  TrainingBatch batch{{{0, 0, 1}}, {{2, 0, 3}}, 1};
  GradientBuffer g(split_store(0.5, 2.0));
  {
    const auto s = split_store(0.5, 2.0);
    const auto r = compute_loss_and_grads(s, batch, 1.0, 0.0, false, g);
    CHECK(r.hinge == 0.0);
    CHECK(r.active_pairs == 0);
    for (EntityId e = 0; e < 4; ++e) CHECK(g.entity(e)[0] == 0.0);
    CHECK(g.relation(0)[0] == 0.0);
  }
  {
    const auto s = split_store(1.5, 1.0);
    const auto r = compute_loss_and_grads(s, batch, 1.0, 0.0, false, g);
    CHECK(r.hinge == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(r.total == r.hinge);
    CHECK(compute_loss(s, batch, 1.0, 0.0) == doctest::Approx(1.5).epsilon(1e-12));
  }
  {
    // Two vectors: one entity with norm 0.3, one relation with norm 0.6.
    ParameterStore s(1, 1, 2, 1, Variant::EuclideanAdd);
    set(s.entity(0), {0.3, 0.0});
    set(s.relation(0), {0.0, 0.6});
    const TrainingBatch empty{{}, {}, 1};
    GradientBuffer gb(s);
    const auto r = compute_loss_and_grads(s, empty, 1.0, 0.8, true, gb);
    CHECK(r.regularizer == doctest::Approx(1.24).epsilon(1e-14));
    CHECK(gb.entity(0)[0] == doctest::Approx(-2.0 * 0.8 * 0.3));
    CHECK(gb.relation(0)[1] == doctest::Approx(-2.0 * 0.8 * 0.6));
  }
  CHECK_THROWS_AS(compute_loss(split_store(1, 1), TrainingBatch{{{0, 0, 1}}, {}, 1}, 1.0, 0.0),
                  DimensionError);
}

TEST_CASE("rsgd_step") {
  ParameterStore s = init_params(4, 2, 3, 1, Variant::EuclideanAdd, 3);
  const ParameterStore before = s;
  GradientBuffer g(s);
  g.entity(1);  // touched with a zero gradient
  g.relation(0);
  rsgd_step(s, g, 0.5);
  CHECK(s == before);

  ParameterStore origin(1, 1, 3, 1, Variant::EuclideanAdd);
  GradientBuffer go(origin);
  set(go.entity(0), {0.0, 1.0, 0.0});
  rsgd_step(origin, go, 0.01);
  CHECK(origin.entity(0)[0] == 0.0);
  CHECK(origin.entity(0)[1] == doctest::Approx(-0.0025).epsilon(1e-15));
  CHECK(origin.entity(0)[2] == 0.0);

  // Huge steps land strictly inside the balls.
  ParameterStore big = init_params(3, 2, 4, 2, Variant::EuclideanAdd, 4);
  GradientBuffer gb(big);
  set(gb.entity(2), {1e6, -1e6, 3.0, 0.0});
  set(gb.relation(1), {-1e9, 0.0, 0.0, 1.0});
  rsgd_step(big, gb, 10.0);
  CHECK(norm(big.entity(2)) < 0.5);
  CHECK(norm(big.relation(1)) < 1.0);
  CHECK(big.entity(0)[0] == init_params(3, 2, 4, 2, Variant::EuclideanAdd, 4).entity(0)[0]);

  ParameterStore bad = before;
  GradientBuffer gn(bad);
  gn.entity(0)[0] = 1.0;
  gn.relation(1)[2] = NAN;
  CHECK_THROWS_AS(rsgd_step(bad, gn, 0.1), NumericError);
  CHECK(bad == before);  // aborted before any write
}

TEST_CASE("pure regularizer step pushes every vector outward") {
  for (Variant v : {Variant::EuclideanAdd, Variant::MobiusAdd}) {
    // Interior points, so the projection never binds.
    ParameterStore s(20, 4, 6, 3, v);
    std::mt19937_64 rng(5);
    for (EntityId e = 0; e < 20; ++e) set(s.entity(e), testutil::in_ball(6, 0.9 * s.entity_radius(), rng));
    for (RelationId r = 0; r < 4; ++r) set(s.relation(r), testutil::in_ball(6, 0.9, rng));
    const ParameterStore before = s;
    GradientBuffer g(s);
    compute_loss_and_grads(s, TrainingBatch{{}, {}, 1}, 1.0, 0.8, true, g);
    rsgd_step(s, g, 0.01);
    for (EntityId e = 0; e < 20; ++e) CHECK(norm(s.entity(e)) > norm(before.entity(e)));
    for (RelationId r = 0; r < 4; ++r) CHECK(norm(s.relation(r)) > norm(before.relation(r)));

    // Without the sweep only touched vectors move; here none are.
    ParameterStore t = before;
    compute_loss_and_grads(t, TrainingBatch{{}, {}, 1}, 1.0, 0.8, false, g);
    rsgd_step(t, g, 0.01);
    CHECK(t == before);
  }
}

TEST_CASE("analytic gradients match finite differences") {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Variant variant = trial % 2 ? Variant::MobiusAdd : Variant::EuclideanAdd;
    const std::size_t dim = 2 + trial % 5;
    ParameterStore s(5, 2, dim, trial % dim, variant);
    for (EntityId e = 0; e < 5; ++e) set(s.entity(e), testutil::in_ball(dim, 0.9 * s.entity_radius(), rng));
    for (RelationId r = 0; r < 2; ++r) set(s.relation(r), testutil::in_ball(dim, 0.9, rng));
    const TrainingBatch batch{{{0, 0, 1}, {2, 1, 3}}, {{4, 0, 1}, {0, 1, 1}, {2, 0, 3}, {2, 1, 0}}, 2};
    const double gamma = 2.0;
    for (bool sweep : {false, true}) {
      const double lambda = sweep ? 0.3 : 0.0;
      GradientBuffer g(s);
      compute_loss_and_grads(s, batch, gamma, lambda, sweep, g);
      // Without the sweep, untouched vectors get no regulariser gradient, so
      // the finite-difference reference uses lambda only with the sweep.
      const double h = 1e-6;
      double diff = 0.0, an = 0.0, fd = 0.0;
      auto probe = [&](std::span<double> param, std::span<const double> grad) {
        for (std::size_t i = 0; i < param.size(); ++i) {
          const double keep = param[i];
          param[i] = keep + h;
          const double up = compute_loss(s, batch, gamma, lambda);
          param[i] = keep - h;
          const double down = compute_loss(s, batch, gamma, lambda);
          param[i] = keep;
          const double num = (up - down) / (2 * h);
          diff += (num - grad[i]) * (num - grad[i]);
          an += grad[i] * grad[i];
          fd += num * num;
        }
      };
      for (EntityId e = 0; e < 5; ++e) probe(s.entity(e), g.entity(e));
      for (RelationId r = 0; r < 2; ++r) probe(s.relation(r), g.relation(r));
      if (std::sqrt(an) + std::sqrt(fd) < 1e-6) continue;
      CHECK(std::sqrt(diff) / (std::sqrt(an) + std::sqrt(fd)) < 1e-5);
      ++checked;
    }
  }
  CHECK(checked > 60);
}

TEST_CASE("training on a tiny dataset") {
  const std::vector<Triple> facts{{0, 0, 1}, {1, 0, 2}, {2, 1, 3}, {3, 1, 4}, {4, 0, 0}};
  const auto b = bundle_of(5, 2, facts);
  TrainConfig c;
  c.dim = 8;
  c.batches_per_epoch = 1;
  c.max_epochs = 200;
  c.eval_every = 0;
  c.eta = 0.01;
  c.gamma = 1.0;
  c.negs_e = 2;
  c.seed = 4;
  const auto r = train(b, c);
  REQUIRE(r.log.size() == 200);
  CHECK(r.log.back().loss < r.log.front().loss);
  r.last.check_invariants();

  // Same seed and config reproduce the log exactly.
  const auto again = train(b, c);
  for (std::size_t i = 0; i < r.log.size(); ++i) CHECK(again.log[i].loss == r.log[i].loss);
  CHECK(again.last == r.last);
}

TEST_CASE("zero learning rate keeps the loss trace flat") {
  const std::vector<Triple> facts{{0, 0, 1}, {1, 0, 2}, {2, 1, 3}, {3, 1, 4}, {4, 0, 0}};
  const auto b = bundle_of(5, 2, facts, {{0, 0, 2}});
  TrainConfig c;
  c.dim = 6;
  c.eta = 0.0;
  c.negs_e = 0;
  c.negs_r = 1;
  c.batches_per_epoch = 2;
  c.max_epochs = 30;
  c.eval_every = 10;
  c.lambda = 0.5;
  // With two relations and only relation corruption every negative is
  // deterministic, so a frozen store gives a constant loss.
  const auto r = train(b, c);
  for (const auto& e : r.log) CHECK(e.loss == r.log.front().loss);
  CHECK(r.last == init_params(5, 2, 6, 3, Variant::EuclideanAdd, 0));
}

TEST_CASE("train validates inputs and writes artifacts") {
  const auto empty = bundle_of(3, 1, {});
  TrainConfig c;
  c.dim = 4;
  CHECK_THROWS_AS(train(empty, c), DataError);
  c.gamma = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  const auto b = bundle_of(6, 2, {{0, 0, 1}, {1, 0, 2}, {2, 1, 3}, {3, 1, 4}, {4, 0, 5}}, {{0, 0, 2}, {5, 1, 1}});
  TrainConfig ok;
  ok.dim = 4;
  ok.max_epochs = 20;
  ok.eval_every = 5;
  testutil::TempDir dir("train");
  const auto r = train(b, ok, dir.path());
  CHECK(r.best_val_mrr.has_value());
  CHECK(r.best_epoch % 5 == 0);
  for (const char* f : {"train_log.csv", "best.ckpt", "last.ckpt"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  const std::string log = testutil::read_file(dir / "train_log.csv");
  CHECK(log.rfind("epoch,loss,val_mrr,val_hits10\n", 0) == 0);
  CHECK(log.find("\n1,") != std::string::npos);
  CHECK(log.find(",,\n") != std::string::npos);  // empty validation columns
}
