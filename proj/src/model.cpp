#include "hyperkg/model.hpp"

#include <cmath>
#include <random>

#include "hyperkg/errors.hpp"
#include "hyperkg/rng.hpp"

namespace hyperkg {

std::string_view to_string(Variant v) {
  return v == Variant::EuclideanAdd ? "euclidean-add" : "mobius-add";
}

Variant parse_variant(std::string_view name) {
  if (name == "euclidean-add") return Variant::EuclideanAdd;
  if (name == "mobius-add") return Variant::MobiusAdd;
  throw ConfigError("unknown model variant '" + std::string(name) +
                    "' (expected euclidean-add or mobius-add)");
}

ParameterStore::ParameterStore(std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                               std::size_t beta, Variant variant)
    : n_entities_(n_entities),
      n_relations_(n_relations),
      perm_(dim, beta),
      variant_(variant),
      entities_(n_entities * dim, 0.0),
      relations_(n_relations * dim, 0.0) {}

std::span<const double> ParameterStore::entity(EntityId e) const {
  if (e < 0 || static_cast<std::size_t>(e) >= n_entities_) {
    throw DataError("entity id " + std::to_string(e) + " out of range");
  }
  return std::span<const double>(entities_).subspan(static_cast<std::size_t>(e) * dim(), dim());
}

std::span<double> ParameterStore::entity(EntityId e) {
  const auto c = std::as_const(*this).entity(e);
  return {const_cast<double*>(c.data()), c.size()};
}

std::span<const double> ParameterStore::relation(RelationId r) const {
  if (r < 0 || static_cast<std::size_t>(r) >= n_relations_) {
    throw DataError("relation id " + std::to_string(r) + " out of range");
  }
  return std::span<const double>(relations_).subspan(static_cast<std::size_t>(r) * dim(), dim());
}

std::span<double> ParameterStore::relation(RelationId r) {
  const auto c = std::as_const(*this).relation(r);
  return {const_cast<double*>(c.data()), c.size()};
}

void ParameterStore::check_invariants() const {
  auto check = [](std::span<const double> v, double radius, const char* kind, std::size_t id) {
    for (double c : v) {
      if (!std::isfinite(c)) {
        throw DomainError(std::string(kind) + " " + std::to_string(id) + " has a non-finite coordinate");
      }
    }
    if (!(norm(v) < radius)) {
      throw DomainError(std::string(kind) + " " + std::to_string(id) + " has norm " +
                        std::to_string(norm(v)) + " >= " + std::to_string(radius));
    }
  };
  for (std::size_t e = 0; e < n_entities_; ++e) {
    check(entity(static_cast<EntityId>(e)), entity_radius(), "entity", e);
  }
  for (std::size_t r = 0; r < n_relations_; ++r) {
    check(relation(static_cast<RelationId>(r)), relation_radius(), "relation", r);
  }
}

ParameterStore init_params(std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                           std::size_t beta, Variant variant, std::uint64_t seed) {
  ParameterStore store(n_entities, n_relations, dim, beta, variant);
  Rng rng = RngStreams(seed).stream("init");
  auto fill = [&](std::span<double> data, std::size_t rows, double radius) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + dim));
    std::uniform_real_distribution<double> uni(-bound, bound);
    for (double& c : data) c = uni(rng);
    for (std::size_t i = 0; i < rows; ++i) {
      project_to_radius_inplace(data.subspan(i * dim, dim), radius);
    }
  };
  fill(store.entity_data(), n_entities, store.entity_radius());
  fill(store.relation_data(), n_relations, store.relation_radius());
  return store;
}

void term_embedding_into(const ParameterStore& store, EntityId s, EntityId o,
                         std::span<double> out, std::span<double> scratch) {
  const auto sv = store.entity(s);
  store.permutation().apply(store.entity(o), scratch);
  if (store.variant() == Variant::EuclideanAdd) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sv[i] + scratch[i];
  } else {
    mobius_add_into(sv, scratch, out);
  }
}

Vector term_embedding(const ParameterStore& store, EntityId s, EntityId o) {
  Vector out(store.dim());
  Vector scratch(store.dim());
  term_embedding_into(store, s, o, out, scratch);
  return out;
}

double score_hyperkg(const ParameterStore& store, const Triple& t) {
  const Vector term = term_embedding(store, t.subject, t.object);
  return poincare_distance(term, store.relation(t.relation));
}

double Scorer::operator()(EntityId s, RelationId r, EntityId o) {
  term_embedding_into(store_, s, o, term_, scratch_);
  return poincare_distance_unchecked(term_, store_.relation(r));
}

double score_transe(std::span<const double> s, std::span<const double> r,
                    std::span<const double> o, Norm norm) {
  if (s.size() != r.size() || s.size() != o.size()) {
    throw DimensionError("score_transe: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = s[i] + r[i] - o[i];
    acc += norm == Norm::L1 ? std::abs(d) : d * d;
  }
  return norm == Norm::L1 ? acc : std::sqrt(acc);
}

double score_transe(const TransEEmbeddings& emb, const Triple& t, Norm norm) {
  return score_transe(emb.entity(t.subject), emb.relation(t.relation), emb.entity(t.object), norm);
}

}  // namespace hyperkg
