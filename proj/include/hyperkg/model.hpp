#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperkg/geometry.hpp"
#include "hyperkg/kg_data.hpp"

namespace hyperkg {

/// How the subject and the permuted object are composed into a term vector.
enum class Variant {
  EuclideanAdd,  // s + P o, entity norms < 0.5
  MobiusAdd,     // s (+) P o, entity norms < 1
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

inline constexpr double kEntityRadius = 0.5;
inline constexpr double kRelationRadius = 1.0;

/// Entity and relation vectors (row-major) plus the permutation shift and
/// composition variant. Each vector carries a constraint radius: 0.5 for
/// entities under Euclidean addition, 1.0 for everything else.
class ParameterStore {
 public:
  ParameterStore(std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                 std::size_t beta, Variant variant);

  std::size_t n_entities() const { return n_entities_; }
  std::size_t n_relations() const { return n_relations_; }
  std::size_t dim() const { return perm_.dim(); }
  std::size_t beta() const { return perm_.shift(); }
  Variant variant() const { return variant_; }
  const PermutationSpec& permutation() const { return perm_; }

  double entity_radius() const {
    return variant_ == Variant::EuclideanAdd ? kEntityRadius : kRelationRadius;
  }
  double relation_radius() const { return kRelationRadius; }

  std::span<const double> entity(EntityId e) const;
  std::span<double> entity(EntityId e);
  std::span<const double> relation(RelationId r) const;
  std::span<double> relation(RelationId r);

  std::span<const double> entity_data() const { return entities_; }
  std::span<double> entity_data() { return entities_; }
  std::span<const double> relation_data() const { return relations_; }
  std::span<double> relation_data() { return relations_; }

  /// Throws DomainError naming the first vector that violates its radius or
  /// holds a non-finite coordinate.
  void check_invariants() const;

  friend bool operator==(const ParameterStore&, const ParameterStore&) = default;

 private:
  std::size_t n_entities_;
  std::size_t n_relations_;
  PermutationSpec perm_;
  Variant variant_;
  std::vector<double> entities_;
  std::vector<double> relations_;
};

/// Glorot-uniform init of both embedding matrices, bound sqrt(6 / (rows + n)),
/// followed by projection of any vector violating its radius.
ParameterStore init_params(std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                           std::size_t beta, Variant variant, std::uint64_t seed);

/// Term vector of the (subject, object) pair, written to `out`.
void term_embedding_into(const ParameterStore& store, EntityId s, EntityId o,
                         std::span<double> out, std::span<double> scratch);
Vector term_embedding(const ParameterStore& store, EntityId s, EntityId o);

/// Implausibility d_p(term(s, o), r); lower is more plausible.
double score_hyperkg(const ParameterStore& store, const Triple& t);

/// Allocation-free scorer for ranking loops.
class Scorer {
 public:
  explicit Scorer(const ParameterStore& store)
      : store_(store), term_(store.dim()), scratch_(store.dim()) {}

  double operator()(EntityId s, RelationId r, EntityId o);
  double operator()(const Triple& t) { return (*this)(t.subject, t.relation, t.object); }

 private:
  const ParameterStore& store_;
  Vector term_;
  Vector scratch_;
};

enum class Norm { L1, L2 };

/// TransE implausibility |s + r - o| under the chosen norm.
double score_transe(std::span<const double> s, std::span<const double> r,
                    std::span<const double> o, Norm norm);

/// Unconstrained Euclidean embeddings for TransE scoring.
struct TransEEmbeddings {
  std::size_t dim = 0;
  std::vector<double> entities;
  std::vector<double> relations;

  std::span<const double> entity(EntityId e) const {
    return std::span<const double>(entities).subspan(static_cast<std::size_t>(e) * dim, dim);
  }
  std::span<const double> relation(RelationId r) const {
    return std::span<const double>(relations).subspan(static_cast<std::size_t>(r) * dim, dim);
  }
};

double score_transe(const TransEEmbeddings& emb, const Triple& t, Norm norm);

// Checkpoint format: a JSON manifest at `path` and two little-endian float64
// sidecars `<path>.entities.f64` and `<path>.relations.f64`.

struct CheckpointInfo {
  int version = 1;
  std::uint64_t entity_vocab_hash = 0;
  std::uint64_t relation_vocab_hash = 0;
};

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const ParameterStore& store, const Vocabulary& vocab,
                     const std::filesystem::path& path);

struct LoadedCheckpoint {
  ParameterStore store;
  CheckpointInfo info;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hyperkg
