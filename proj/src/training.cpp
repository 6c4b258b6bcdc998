#include "hyperkg/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "hyperkg/errors.hpp"
#include "hyperkg/evaluation.hpp"

namespace hyperkg {

std::string_view to_string(CorruptionMode m) {
  return m == CorruptionMode::Bernoulli ? "bernoulli" : "uniform";
}

CorruptionMode parse_corruption_mode(std::string_view name) {
  if (name == "bernoulli") return CorruptionMode::Bernoulli;
  if (name == "uniform") return CorruptionMode::Uniform;
  throw ConfigError("unknown corruption mode '" + std::string(name) +
                    "' (expected bernoulli or uniform)");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("invalid training config: " + msg); };
  if (!(gamma > 0.0)) fail("gamma must be > 0");
  if (!(lambda >= 0.0)) fail("lambda must be >= 0");
  if (!(eta >= 0.0)) fail("eta must be >= 0");
  if (negs_e < 0 || negs_r < 0) fail("negative counts must be >= 0");
  if (negs_e + negs_r < 1) fail("negs_e + negs_r must be >= 1");
  if (dim < 1) fail("dim must be >= 1");
  if (resolved_beta() >= dim) fail("beta must be in [0, dim)");
  if (max_epochs < 0) fail("max_epochs must be >= 0");
  if (eval_every < 0) fail("eval_every must be >= 0");
  if (batches_per_epoch < 1) fail("batches_per_epoch must be >= 1");
  if (!(eps > 0.0)) fail("eps must be > 0");
}

namespace {

EntityId other_entity(EntityId current, std::size_t n_entities, Rng& rng) {
  std::uniform_int_distribution<EntityId> pick(0, static_cast<EntityId>(n_entities) - 2);
  const EntityId e = pick(rng);
  return e >= current ? e + 1 : e;
}

RelationId other_relation(RelationId current, std::size_t n_relations, Rng& rng) {
  std::uniform_int_distribution<RelationId> pick(0, static_cast<RelationId>(n_relations) - 2);
  const RelationId r = pick(rng);
  return r >= current ? r + 1 : r;
}

double regularizer_sum(const ParameterStore& store) {
  const std::size_t n = store.dim();
  double sum = 0.0;
  auto add = [&](std::span<const double> data) {
    for (std::size_t i = 0; i + n <= data.size(); i += n) sum += 1.0 - norm_sq(data.subspan(i, n));
  };
  add(store.entity_data());
  add(store.relation_data());
  return sum;
}

// Scratch space for one triple's forward/backward pass.
struct Workspace {
  explicit Workspace(std::size_t n)
      : permuted(n),
        term(n),
        grad_term(n),
        grad_relation(n),
        grad_subject(n),
        grad_permuted(n),
        unpermuted(n) {}
  Vector permuted;
  Vector term;
  Vector grad_term;
  Vector grad_relation;
  Vector grad_subject;
  Vector grad_permuted;
  Vector unpermuted;
};

void forward(const ParameterStore& store, const Triple& t, Workspace& ws) {
  const auto s = store.entity(t.subject);
  store.permutation().apply(store.entity(t.object), ws.permuted);
  if (store.variant() == Variant::EuclideanAdd) {
    for (std::size_t i = 0; i < s.size(); ++i) ws.term[i] = s[i] + ws.permuted[i];
  } else {
    mobius_add_into(s, ws.permuted, ws.term);
  }
}

double score(const ParameterStore& store, const Triple& t, Workspace& ws) {
  forward(store, t, ws);
  return poincare_distance_unchecked(ws.term, store.relation(t.relation));
}

// Adds weight * d score(t) / d theta into grads. Returns false (and adds
// nothing) when the term vector coincides with the relation vector.
bool backward(const ParameterStore& store, const Triple& t, double weight, GradientBuffer& grads,
              Workspace& ws) {
  forward(store, t, ws);
  std::fill(ws.grad_term.begin(), ws.grad_term.end(), 0.0);
  std::fill(ws.grad_relation.begin(), ws.grad_relation.end(), 0.0);
  const auto rel = store.relation(t.relation);
  if (!accumulate_distance_grad(ws.term, rel, weight, ws.grad_term, ws.grad_relation)) {
    return false;
  }

  auto g_rel = grads.relation(t.relation);
  for (std::size_t i = 0; i < rel.size(); ++i) g_rel[i] += ws.grad_relation[i];

  const std::span<const double> to_object =
      store.variant() == Variant::EuclideanAdd ? std::span<const double>(ws.grad_term)
                                               : std::span<const double>(ws.grad_permuted);
  if (store.variant() == Variant::EuclideanAdd) {
    auto g_s = grads.entity(t.subject);
    for (std::size_t i = 0; i < g_s.size(); ++i) g_s[i] += ws.grad_term[i];
  } else {
    std::fill(ws.grad_subject.begin(), ws.grad_subject.end(), 0.0);
    std::fill(ws.grad_permuted.begin(), ws.grad_permuted.end(), 0.0);
    mobius_add_vjp(store.entity(t.subject), ws.permuted, ws.grad_term, 1.0, ws.grad_subject,
                   ws.grad_permuted);
    auto g_s = grads.entity(t.subject);
    for (std::size_t i = 0; i < g_s.size(); ++i) g_s[i] += ws.grad_subject[i];
  }
  // The permutation is orthogonal, so the object receives P^T = P^-1 of the
  // gradient with respect to P o.
  store.permutation().apply_inverse(to_object, ws.unpermuted);
  auto g_o = grads.entity(t.object);
  for (std::size_t i = 0; i < g_o.size(); ++i) g_o[i] += ws.unpermuted[i];
  return true;
}

void touch(const Triple& t, GradientBuffer& grads) {
  grads.entity(t.subject);
  grads.entity(t.object);
  grads.relation(t.relation);
}

void check_batch(const ParameterStore& store, const TrainingBatch& batch) {
  if (batch.negatives.size() != batch.positives.size() * batch.negs_per_positive) {
    throw DimensionError("training batch: negatives do not match positives * negs_per_positive");
  }
  (void)store;
}

}  // namespace

std::vector<Triple> sample_negatives(const Triple& positive, const DatasetBundle& bundle,
                                     int negs_e, int negs_r, CorruptionMode mode, Rng& rng) {
  if (negs_e < 0 || negs_r < 0 || negs_e + negs_r < 1) {
    throw ConfigError("sample_negatives: need negs_e + negs_r >= 1");
  }
  if (negs_e > 0 && bundle.n_entities() < 2) {
    throw DataError("entity corruption needs at least 2 entities");
  }
  if (negs_r > 0 && bundle.n_relations() < 2) {
    throw DataError("relation corruption needs at least 2 relations");
  }
  std::vector<Triple> out;
  out.reserve(static_cast<std::size_t>(negs_e + negs_r));
  const double p_subject = mode == CorruptionMode::Bernoulli && !bundle.uniform_corruption
                               ? bundle.bernoulli.at(positive.relation).p_corrupt_subject
                               : 0.5;
  std::bernoulli_distribution corrupt_subject(p_subject);
  for (int i = 0; i < negs_e; ++i) {
    Triple t = positive;
    if (corrupt_subject(rng)) {
      t.subject = other_entity(t.subject, bundle.n_entities(), rng);
    } else {
      t.object = other_entity(t.object, bundle.n_entities(), rng);
    }
    out.push_back(t);
  }
  for (int i = 0; i < negs_r; ++i) {
    Triple t = positive;
    t.relation = other_relation(t.relation, bundle.n_relations(), rng);
    out.push_back(t);
  }
  return out;
}

GradientBuffer::GradientBuffer(const ParameterStore& store)
    : dim_(store.dim()),
      entities_(store.n_entities() * store.dim(), 0.0),
      relations_(store.n_relations() * store.dim(), 0.0),
      entity_touched_(store.n_entities(), 0),
      relation_touched_(store.n_relations(), 0) {}

std::span<double> GradientBuffer::entity(EntityId e) {
  const auto i = static_cast<std::size_t>(e);
  if (!entity_touched_.at(i)) {
    entity_touched_[i] = 1;
    touched_entities_.push_back(e);
  }
  return std::span<double>(entities_).subspan(i * dim_, dim_);
}

std::span<double> GradientBuffer::relation(RelationId r) {
  const auto i = static_cast<std::size_t>(r);
  if (!relation_touched_.at(i)) {
    relation_touched_[i] = 1;
    touched_relations_.push_back(r);
  }
  return std::span<double>(relations_).subspan(i * dim_, dim_);
}

std::span<const double> GradientBuffer::entity(EntityId e) const {
  return std::span<const double>(entities_).subspan(static_cast<std::size_t>(e) * dim_, dim_);
}

std::span<const double> GradientBuffer::relation(RelationId r) const {
  return std::span<const double>(relations_).subspan(static_cast<std::size_t>(r) * dim_, dim_);
}

void GradientBuffer::clear() {
  for (EntityId e : touched_entities_) {
    const auto i = static_cast<std::size_t>(e);
    entity_touched_[i] = 0;
    std::fill_n(entities_.begin() + static_cast<std::ptrdiff_t>(i * dim_), dim_, 0.0);
  }
  for (RelationId r : touched_relations_) {
    const auto i = static_cast<std::size_t>(r);
    relation_touched_[i] = 0;
    std::fill_n(relations_.begin() + static_cast<std::ptrdiff_t>(i * dim_), dim_, 0.0);
  }
  touched_entities_.clear();
  touched_relations_.clear();
}

LossBreakdown compute_loss_and_grads(const ParameterStore& store, const TrainingBatch& batch,
                                     double gamma, double lambda, bool full_reg_sweep,
                                     GradientBuffer& grads) {
  check_batch(store, batch);
  grads.clear();
  Workspace ws(store.dim());
  LossBreakdown out;
  const std::size_t k = batch.negs_per_positive;
  for (std::size_t i = 0; i < batch.positives.size(); ++i) {
    const Triple& pos = batch.positives[i];
    touch(pos, grads);
    const double f_pos = score(store, pos, ws);
    std::size_t active = 0;
    for (std::size_t j = i * k; j < (i + 1) * k; ++j) {
      const Triple& neg = batch.negatives[j];
      touch(neg, grads);
      const double margin = gamma + f_pos - score(store, neg, ws);
      if (margin <= 0.0) continue;
      out.hinge += margin;
      ++out.active_pairs;
      ++active;
      if (!backward(store, neg, -1.0, grads, ws)) ++out.degenerate_pairs;
    }
    if (active > 0 && !backward(store, pos, static_cast<double>(active), grads, ws)) {
      out.degenerate_pairs += active;
    }
  }

  if (lambda != 0.0) {
    out.regularizer = lambda * regularizer_sum(store);
    // d/dtheta lambda * (1 - |theta|^2) = -2 lambda theta
    auto add_reg = [&](std::span<double> g, std::span<const double> theta) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= 2.0 * lambda * theta[i];
    };
    if (full_reg_sweep) {
      for (std::size_t e = 0; e < store.n_entities(); ++e) grads.entity(static_cast<EntityId>(e));
      for (std::size_t r = 0; r < store.n_relations(); ++r) {
        grads.relation(static_cast<RelationId>(r));
      }
    }
    for (EntityId e : grads.touched_entities()) add_reg(grads.entity(e), store.entity(e));
    for (RelationId r : grads.touched_relations()) add_reg(grads.relation(r), store.relation(r));
  }
  out.total = out.hinge + out.regularizer;
  return out;
}

double compute_loss(const ParameterStore& store, const TrainingBatch& batch, double gamma,
                    double lambda) {
  check_batch(store, batch);
  Workspace ws(store.dim());
  double loss = 0.0;
  const std::size_t k = batch.negs_per_positive;
  for (std::size_t i = 0; i < batch.positives.size(); ++i) {
    const double f_pos = score(store, batch.positives[i], ws);
    for (std::size_t j = i * k; j < (i + 1) * k; ++j) {
      loss += std::max(gamma + f_pos - score(store, batch.negatives[j], ws), 0.0);
    }
  }
  if (lambda != 0.0) loss += lambda * regularizer_sum(store);
  return loss;
}

LossBreakdown batch_loss_and_grads(const ParameterStore& store, std::span<const Triple> positives,
                                   const DatasetBundle& bundle, const TrainConfig& config,
                                   Rng& rng, GradientBuffer& grads) {
  TrainingBatch batch;
  batch.positives.assign(positives.begin(), positives.end());
  batch.negs_per_positive = static_cast<std::size_t>(config.negs_e + config.negs_r);
  batch.negatives.reserve(batch.positives.size() * batch.negs_per_positive);
  for (const auto& p : batch.positives) {
    auto negs = sample_negatives(p, bundle, config.negs_e, config.negs_r, config.corruption, rng);
    batch.negatives.insert(batch.negatives.end(), negs.begin(), negs.end());
  }
  return compute_loss_and_grads(store, batch, config.gamma, config.lambda, config.full_reg_sweep,
                                grads);
}

void rsgd_step(ParameterStore& store, const GradientBuffer& grads, double eta, double eps) {
  auto require_finite = [](std::span<const double> g, const char* kind, std::int32_t id) {
    for (double c : g) {
      if (!std::isfinite(c)) {
        throw NumericError(std::string("rsgd_step: non-finite gradient for ") + kind + " " +
                           std::to_string(id));
      }
    }
  };
  for (EntityId e : grads.touched_entities()) require_finite(grads.entity(e), "entity", e);
  for (RelationId r : grads.touched_relations()) require_finite(grads.relation(r), "relation", r);

  auto update = [&](std::span<double> theta, std::span<const double> g, double radius) {
    const double step = eta * riemannian_scale(theta);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= step * g[i];
    project_to_radius_inplace(theta, radius, eps);
    if (!(norm(theta) < radius)) throw NumericError("rsgd_step: vector left its constraint ball");
  };
  for (EntityId e : grads.touched_entities()) {
    update(store.entity(e), grads.entity(e), store.entity_radius());
  }
  for (RelationId r : grads.touched_relations()) {
    update(store.relation(r), grads.relation(r), store.relation_radius());
  }
}

TrainResult train(const DatasetBundle& bundle, const TrainConfig& config,
                  const std::optional<std::filesystem::path>& out_dir) {
  config.validate();
  if (bundle.train.empty()) throw DataError("training split is empty");
  if (out_dir) std::filesystem::create_directories(*out_dir);

  const RngStreams streams(config.seed);
  ParameterStore store = init_params(bundle.n_entities(), bundle.n_relations(), config.dim,
                                     config.resolved_beta(), config.variant, config.seed);
  Rng shuffle_rng = streams.stream("shuffle");
  Rng negative_rng = streams.stream("negatives");
  GradientBuffer grads(store);

  TrainResult result{store, store, {}, 0, std::nullopt};
  std::vector<std::size_t> order(bundle.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Triple> positives;

  const std::size_t n_train = bundle.train.size();
  const auto n_batches = std::min(static_cast<std::size_t>(config.batches_per_epoch), n_train);
  const std::size_t batch_size = n_train / n_batches;
  const int ks[] = {10};

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double hinge = 0.0;
    for (std::size_t b = 0; b < n_batches; ++b) {
      const std::size_t begin = b * batch_size;
      const std::size_t end = b + 1 == n_batches ? n_train : begin + batch_size;
      positives.clear();
      for (std::size_t i = begin; i < end; ++i) positives.push_back(bundle.train[order[i]]);
      hinge += batch_loss_and_grads(store, positives, bundle, config, negative_rng, grads).hinge;
      rsgd_step(store, grads, config.eta, config.eps);
    }

    LogEntry entry;
    entry.epoch = epoch;
    entry.loss = hinge + config.lambda * regularizer_sum(store);
    if (config.eval_every > 0 && epoch % config.eval_every == 0 && !bundle.valid.empty()) {
      const auto rep = evaluate_triples(store, bundle.valid, bundle.filter, ks);
      entry.val_mrr = rep.mrr;
      entry.val_hits10 = rep.hits.at(10);
      if (!result.best_val_mrr || rep.mrr > *result.best_val_mrr) {
        result.best_val_mrr = rep.mrr;
        result.best_epoch = epoch;
        result.best = store;
        if (out_dir) save_checkpoint(store, bundle.vocab, *out_dir / "best.ckpt");
      }
    }
    result.log.push_back(entry);
  }

  store.check_invariants();
  result.last = store;
  if (!result.best_val_mrr) {
    result.best = store;
    result.best_epoch = config.max_epochs;
  }
  if (out_dir) {
    if (!result.best_val_mrr) save_checkpoint(store, bundle.vocab, *out_dir / "best.ckpt");
    save_checkpoint(store, bundle.vocab, *out_dir / "last.ckpt");
    write_train_log(result.log, *out_dir / "train_log.csv");
  }
  return result;
}

void write_train_log(std::span<const LogEntry> log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  out << "epoch,loss,val_mrr,val_hits10\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << e.loss << ',';
    if (e.val_mrr) out << *e.val_mrr;
    out << ',';
    if (e.val_hits10) out << *e.val_hits10;
    out << '\n';
  }
}

}  // namespace hyperkg
