#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "hyperkg/kg_data.hpp"
#include "hyperkg/model.hpp"
#include "hyperkg/rng.hpp"

namespace hyperkg {

enum class CorruptionMode { Bernoulli, Uniform };

std::string_view to_string(CorruptionMode m);
CorruptionMode parse_corruption_mode(std::string_view name);

struct TrainConfig {
  double gamma = 1.0;   // margin
  double lambda = 0.0;  // regulariser weight
  double eta = 0.01;    // learning rate
  int negs_e = 1;       // entity-corrupted negatives per positive
  int negs_r = 0;       // relation-corrupted negatives per positive
  std::size_t dim = 100;
  std::optional<std::size_t> beta;  // defaults to floor(dim / 2)
  Variant variant = Variant::EuclideanAdd;
  int max_epochs = 2000;
  int eval_every = 50;
  int batches_per_epoch = 10;
  double eps = kProjectionEps;
  std::uint64_t seed = 0;
  CorruptionMode corruption = CorruptionMode::Bernoulli;
  /// Apply the regulariser gradient to every vector on every step instead of
  /// only to vectors touched by the batch.
  bool full_reg_sweep = false;

  std::size_t resolved_beta() const { return beta.value_or(dim / 2); }
  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// negs_e entity-corrupted copies of `positive` (one side replaced by a
/// different entity; the side is drawn from the relation's Bernoulli
/// probability or a fair coin) followed by negs_r copies with the relation
/// replaced by a different relation.
std::vector<Triple> sample_negatives(const Triple& positive, const DatasetBundle& bundle,
                                     int negs_e, int negs_r, CorruptionMode mode, Rng& rng);

/// Sparse-by-row Euclidean gradient accumulator shaped like a store.
class GradientBuffer {
 public:
  explicit GradientBuffer(const ParameterStore& store);

  std::span<double> entity(EntityId e);
  std::span<double> relation(RelationId r);
  std::span<const double> entity(EntityId e) const;
  std::span<const double> relation(RelationId r) const;

  const std::vector<EntityId>& touched_entities() const { return touched_entities_; }
  const std::vector<RelationId>& touched_relations() const { return touched_relations_; }

  void clear();

 private:
  std::size_t dim_;
  std::vector<double> entities_;
  std::vector<double> relations_;
  std::vector<char> entity_touched_;
  std::vector<char> relation_touched_;
  std::vector<EntityId> touched_entities_;
  std::vector<RelationId> touched_relations_;
};

/// Positives with their frozen negatives: positive i owns
/// negatives[i * negs_per_positive, (i + 1) * negs_per_positive).
struct TrainingBatch {
  std::vector<Triple> positives;
  std::vector<Triple> negatives;
  std::size_t negs_per_positive = 0;
};

struct LossBreakdown {
  double total = 0.0;
  double hinge = 0.0;
  double regularizer = 0.0;  // lambda * sum over all vectors of (1 - |theta|^2)
  std::size_t active_pairs = 0;
  std::size_t degenerate_pairs = 0;  // active pairs with a coincident term and relation
};

/// Hinge loss sum [gamma + f(pos) - f(neg)]_+ over every (positive, own
/// negative) pair plus the regulariser, with Euclidean gradients
/// accumulated into `grads` (which is cleared first).
LossBreakdown compute_loss_and_grads(const ParameterStore& store, const TrainingBatch& batch,
                                     double gamma, double lambda, bool full_reg_sweep,
                                     GradientBuffer& grads);

/// Loss only; the finite-difference reference for the gradients.
double compute_loss(const ParameterStore& store, const TrainingBatch& batch, double gamma,
                    double lambda);

/// Samples fresh negatives for `positives` and evaluates the batch.
LossBreakdown batch_loss_and_grads(const ParameterStore& store, std::span<const Triple> positives,
                                   const DatasetBundle& bundle, const TrainConfig& config,
                                   Rng& rng, GradientBuffer& grads);

/// theta <- proj(theta - eta * (1 - |theta|^2)^2 / 4 * grad, a_theta) for every
/// touched vector. Throws NumericError on a non-finite gradient before
/// modifying anything.
void rsgd_step(ParameterStore& store, const GradientBuffer& grads, double eta,
               double eps = kProjectionEps);

struct LogEntry {
  int epoch = 0;
  double loss = 0.0;
  std::optional<double> val_mrr;
  std::optional<double> val_hits10;
};

struct TrainResult {
  ParameterStore best;
  ParameterStore last;
  std::vector<LogEntry> log;
  int best_epoch = 0;
  std::optional<double> best_val_mrr;
};

/// Mini-batch RSGD with periodic filtered validation MRR; keeps the best
/// validated parameters. When `out_dir` is given, writes train_log.csv,
/// best.ckpt on each improvement and last.ckpt at the end.
TrainResult train(const DatasetBundle& bundle, const TrainConfig& config,
                  const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// CSV `epoch,loss,val_mrr,val_hits10`; validation columns are empty between
/// evaluations.
void write_train_log(std::span<const LogEntry> log, const std::filesystem::path& path);

}  // namespace hyperkg
