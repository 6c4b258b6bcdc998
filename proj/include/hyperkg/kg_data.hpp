#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hyperkg {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
  EntityId subject = 0;
  RelationId relation = 0;
  EntityId object = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept;
};

/// Bijection between symbol names and dense 0-based ids, assigned in
/// first-appearance order.
class SymbolTable {
 public:
  std::int32_t intern(std::string_view name);
  std::optional<std::int32_t> find(std::string_view name) const;
  const std::string& name(std::int32_t id) const;
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  /// FNV-1a over the names in id order; identifies a vocabulary in
  /// checkpoint manifests.
  std::uint64_t fingerprint() const;

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t, StringHash, std::equal_to<>> ids_;
};

struct Vocabulary {
  SymbolTable entities;
  SymbolTable relations;
  /// When sealed, loading a file that mentions an unknown symbol fails.
  bool sealed = false;
};

/// Parses `subject<TAB>relation<TAB>object` lines, interning new symbols
/// into `vocab` (unless sealed). Blank lines and lines starting with '#' are
/// skipped; duplicates are preserved. Throws DataError with the line number
/// on malformed input.
std::vector<Triple> load_triples(const std::filesystem::path& path, Vocabulary& vocab);

void write_triples(const std::filesystem::path& path, std::span<const Triple> triples,
                   const Vocabulary& vocab);

struct RelationStats {
  double tph = 0.0;  // mean distinct tails per head
  double hpt = 0.0;  // mean distinct heads per tail
  double p_corrupt_subject = 0.5;
};

class BernoulliTable {
 public:
  BernoulliTable() = default;
  explicit BernoulliTable(std::vector<std::optional<RelationStats>> stats)
      : stats_(std::move(stats)) {}

  /// Throws DataError for a relation without training facts.
  const RelationStats& at(RelationId r) const;
  bool has(RelationId r) const;
  std::size_t size() const { return stats_.size(); }

 private:
  std::vector<std::optional<RelationStats>> stats_;
};

BernoulliTable compute_bernoulli_stats(std::span<const Triple> train, std::size_t n_relations);

/// Set of all known-true triples plus per-query indexes used by the
/// filtered ranking protocol.
class FilterIndex {
 public:
  void add(std::span<const Triple> triples);

  bool contains(const Triple& t) const { return known_.contains(t); }
  std::size_t size() const { return known_.size(); }

  /// Known objects o with (s, r, o) true.
  std::span<const EntityId> objects_of(EntityId s, RelationId r) const;
  /// Known subjects s with (s, r, o) true.
  std::span<const EntityId> subjects_of(RelationId r, EntityId o) const;

 private:
  static std::uint64_t key(std::int32_t a, std::int32_t b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }
  std::unordered_set<Triple, TripleHash> known_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> objects_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> subjects_;
};

struct DatasetBundle {
  std::vector<Triple> train;
  std::vector<Triple> valid;
  std::vector<Triple> test;
  Vocabulary vocab;
  FilterIndex filter;
  BernoulliTable bernoulli;
  /// Dataset-level switch: corrupt subject and object with equal
  /// probability instead of using the Bernoulli statistics.
  bool uniform_corruption = false;

  std::size_t n_entities() const { return vocab.entities.size(); }
  std::size_t n_relations() const { return vocab.relations.size(); }
};

/// Builds the filter set and Bernoulli statistics for already-parsed splits.
DatasetBundle make_bundle(std::vector<Triple> train, std::vector<Triple> valid,
                          std::vector<Triple> test, Vocabulary vocab);

/// Reads train.txt, valid.txt and test.txt from `dir`; vocabulary ids are
/// assigned over train, then valid, then test.
DatasetBundle load_dataset(const std::filesystem::path& dir);

struct HistogramBin {
  std::int64_t lower = 0;  // inclusive
  std::int64_t upper = 0;  // exclusive
  double center = 0.0;     // geometric mean of the integer degrees in the bin
  double pdf = 0.0;
};

struct DegreeReport {
  std::vector<std::int64_t> degrees;  // indexed by entity id
  std::vector<HistogramBin> histogram;
  double alpha_hat = 0.0;        // exact discrete MLE
  double alpha_hat_shift = 0.0;  // 1 + N / sum ln(d / (d_min - 1/2))
  std::int64_t d_min = 1;
  std::size_t n_entities = 0;
  std::size_t n_facts = 0;
};

/// Undirected multigraph degrees (a fact contributes one to each endpoint, a
/// self-loop two), a ratio-2 log-binned pdf and the power-law exponent.
/// `n_entities` of 0 means "max id + 1".
DegreeReport degree_analysis(std::span<const Triple> triples, std::size_t n_entities = 0,
                             std::int64_t d_min = 1);

/// Power-law exponent of an integer sample, maximising the exact discrete
/// likelihood -alpha * sum ln d - N ln zeta(alpha, d_min) over d >= d_min.
double fit_power_law_alpha(std::span<const std::int64_t> degrees, std::int64_t d_min);

/// The closed-form 1/2-shift approximation of the same estimator.
double fit_power_law_alpha_shift(std::span<const std::int64_t> degrees, std::int64_t d_min);

/// Writes `degree,pdf` CSV and a JSON sidecar with alpha_hat, d_min,
/// n_entities and n_facts.
void write_degree_report(const DegreeReport& report, const std::filesystem::path& csv_path,
                         const std::filesystem::path& json_path);

}  // namespace hyperkg
