#include "hyperkg/evaluation.hpp"

#include <fstream>

#include "hyperkg/errors.hpp"
#include "json.hpp"

namespace hyperkg {

std::string_view to_string(Side s) { return s == Side::Subject ? "subject" : "object"; }

Ranker::Ranker(const ParameterStore& store, const FilterIndex& filter)
    : store_(store), filter_(filter), scorer_(store), skip_(store.n_entities(), 0) {}

double Ranker::rank(const Triple& gold, Side side) {
  const bool object_side = side == Side::Object;
  const EntityId gold_entity = object_side ? gold.object : gold.subject;
  const auto known = object_side ? filter_.objects_of(gold.subject, gold.relation)
                                 : filter_.subjects_of(gold.relation, gold.object);
  for (EntityId e : known) skip_[static_cast<std::size_t>(e)] = 1;
  skip_[static_cast<std::size_t>(gold_entity)] = 1;

  const double gold_score = scorer_(gold);
  std::size_t below = 0;
  std::size_t tied = 0;
  const auto n = static_cast<EntityId>(store_.n_entities());
  for (EntityId c = 0; c < n; ++c) {
    if (skip_[static_cast<std::size_t>(c)]) continue;
    const double score = object_side ? scorer_(gold.subject, gold.relation, c)
                                     : scorer_(c, gold.relation, gold.object);
    if (score < gold_score) {
      ++below;
    } else if (score == gold_score) {
      ++tied;
    }
  }

  for (EntityId e : known) skip_[static_cast<std::size_t>(e)] = 0;
  skip_[static_cast<std::size_t>(gold_entity)] = 0;
  return 1.0 + static_cast<double>(below) + static_cast<double>(tied) / 2.0;
}

double rank_query(const ParameterStore& store, const Triple& gold, Side side,
                  const FilterIndex& filter) {
  Ranker ranker(store, filter);
  return ranker.rank(gold, side);
}

EvalReport aggregate(std::vector<QueryResult> per_query, std::span<const int> ks) {
  EvalReport rep;
  rep.per_query = std::move(per_query);
  for (int k : ks) rep.hits[k] = 0.0;
  if (rep.per_query.empty()) return rep;
  double rr = 0.0;
  for (const auto& q : rep.per_query) {
    rr += 1.0 / q.rank;
    for (auto& [k, h] : rep.hits) {
      if (q.rank <= static_cast<double>(k)) h += 1.0;
    }
  }
  const auto n = static_cast<double>(rep.per_query.size());
  rep.mrr = rr / n;
  for (auto& [k, h] : rep.hits) h /= n;
  return rep;
}

EvalReport evaluate_triples(const ParameterStore& store, std::span<const Triple> triples,
                            const FilterIndex& filter, std::span<const int> ks) {
  Ranker ranker(store, filter);
  std::vector<QueryResult> per_query;
  per_query.reserve(triples.size() * 2);
  for (const auto& t : triples) {
    per_query.push_back({t, Side::Subject, ranker.rank(t, Side::Subject)});
    per_query.push_back({t, Side::Object, ranker.rank(t, Side::Object)});
  }
  return aggregate(std::move(per_query), ks);
}

EvalReport evaluate(const ParameterStore& store, const DatasetBundle& bundle,
                    std::span<const int> ks) {
  if (bundle.test.empty()) throw DataError("evaluation needs a non-empty test split");
  return evaluate_triples(store, bundle.test, bundle.filter, ks);
}

std::string report_json(const EvalReport& report) {
  nlohmann::json j;
  j["mrr"] = report.mrr;
  nlohmann::json hits = nlohmann::json::object();
  for (const auto& [k, v] : report.hits) hits[std::to_string(k)] = v;
  j["hits"] = hits;
  j["n_queries"] = report.per_query.size();
  return j.dump(2);
}

void write_per_query_csv(const EvalReport& report, const Vocabulary& vocab,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "subject,relation,object,side,rank\n";
  for (const auto& q : report.per_query) {
    out << vocab.entities.name(q.triple.subject) << ',' << vocab.relations.name(q.triple.relation)
        << ',' << vocab.entities.name(q.triple.object) << ',' << to_string(q.side) << ','
        << q.rank << '\n';
  }
}

}  // namespace hyperkg
