#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "hyperkg/kg_data.hpp"
#include "hyperkg/model.hpp"

namespace hyperkg {

/// Which slot of a triple is replaced when ranking.
enum class Side { Subject, Object };

std::string_view to_string(Side s);

struct QueryResult {
  Triple triple;
  Side side = Side::Object;
  double rank = 1.0;
};

struct EvalReport {
  std::vector<QueryResult> per_query;
  double mrr = 0.0;
  std::map<int, double> hits;  // k -> fraction of ranks <= k
};

/// Ranks filtered link-prediction queries against every vocabulary entity.
/// Candidates whose completed triple is known true are dropped (the gold
/// triple itself is always kept); ties count half:
///   rank = 1 + #{score < gold} + #{score == gold, not gold} / 2.
class Ranker {
 public:
  Ranker(const ParameterStore& store, const FilterIndex& filter);

  double rank(const Triple& gold, Side side);

 private:
  const ParameterStore& store_;
  const FilterIndex& filter_;
  Scorer scorer_;
  std::vector<char> skip_;
};

double rank_query(const ParameterStore& store, const Triple& gold, Side side,
                  const FilterIndex& filter);

/// Aggregates MRR and Hits@k from already-ranked queries.
EvalReport aggregate(std::vector<QueryResult> per_query, std::span<const int> ks);

/// Ranks both sides of every triple.
EvalReport evaluate_triples(const ParameterStore& store, std::span<const Triple> triples,
                            const FilterIndex& filter, std::span<const int> ks);

/// Test-split evaluation.
EvalReport evaluate(const ParameterStore& store, const DatasetBundle& bundle,
                    std::span<const int> ks);

/// {mrr, hits: {k: v}, n_queries}
std::string report_json(const EvalReport& report);

/// `subject,relation,object,side,rank` using vocabulary names.
void write_per_query_csv(const EvalReport& report, const Vocabulary& vocab,
                         const std::filesystem::path& path);

}  // namespace hyperkg
