#include "hyperkg/kg_data.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <bit>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "hyperkg/errors.hpp"
#include "hyperkg/rng.hpp"
#include "json.hpp"

namespace hyperkg {

std::size_t TripleHash::operator()(const Triple& t) const noexcept {
  std::uint64_t h = splitmix64(static_cast<std::uint32_t>(t.subject));
  h = splitmix64(h ^ static_cast<std::uint32_t>(t.relation));
  h = splitmix64(h ^ static_cast<std::uint32_t>(t.object));
  return static_cast<std::size_t>(h);
}

std::int32_t SymbolTable::intern(std::string_view name) {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  const auto id = static_cast<std::int32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::int32_t> SymbolTable::find(std::string_view name) const {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  return std::nullopt;
}

const std::string& SymbolTable::name(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= names_.size()) {
    throw DataError("symbol id " + std::to_string(id) + " out of range");
  }
  return names_[static_cast<std::size_t>(id)];
}

std::uint64_t SymbolTable::fingerprint() const {
  std::uint64_t h = kFnvOffset;
  for (const auto& n : names_) {
    h = fnv1a(n, h);
    h = fnv1a(std::string_view("\n", 1), h);
  }
  return h;
}

namespace {

std::int32_t resolve(SymbolTable& table, std::string_view name, bool sealed, const char* kind,
                     const std::filesystem::path& path, std::size_t line_no) {
  if (sealed) {
    if (auto id = table.find(name)) return *id;
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": unknown " + kind + " '" +
                    std::string(name) + "'");
  }
  return table.intern(name);
}

}  // namespace

std::vector<Triple> load_triples(const std::filesystem::path& path, Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open triple file " + path.string());
  std::vector<Triple> triples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    const auto first = line.find('\t');
    const auto second = first == std::string::npos ? first : line.find('\t', first + 1);
    if (second == std::string::npos || line.find('\t', second + 1) != std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected exactly 3 TAB-separated fields");
    }
    const std::string_view view(line);
    const auto s = view.substr(0, first);
    const auto r = view.substr(first + 1, second - first - 1);
    const auto o = view.substr(second + 1);
    if (s.empty() || r.empty() || o.empty()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": empty field");
    }
    Triple t;
    t.subject = resolve(vocab.entities, s, vocab.sealed, "entity", path, line_no);
    t.relation = resolve(vocab.relations, r, vocab.sealed, "relation", path, line_no);
    t.object = resolve(vocab.entities, o, vocab.sealed, "entity", path, line_no);
    triples.push_back(t);
  }
  return triples;
}

void write_triples(const std::filesystem::path& path, std::span<const Triple> triples,
                   const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& t : triples) {
    out << vocab.entities.name(t.subject) << '\t' << vocab.relations.name(t.relation) << '\t'
        << vocab.entities.name(t.object) << '\n';
  }
}

const RelationStats& BernoulliTable::at(RelationId r) const {
  if (!has(r)) {
    throw DataError("no training facts for relation id " + std::to_string(r));
  }
  return *stats_[static_cast<std::size_t>(r)];
}

bool BernoulliTable::has(RelationId r) const {
  return r >= 0 && static_cast<std::size_t>(r) < stats_.size() &&
         stats_[static_cast<std::size_t>(r)].has_value();
}

BernoulliTable compute_bernoulli_stats(std::span<const Triple> train, std::size_t n_relations) {
  // Distinct (head, tail) pairs per relation.
  std::vector<std::set<std::pair<EntityId, EntityId>>> pairs(n_relations);
  for (const auto& t : train) {
    if (t.relation < 0 || static_cast<std::size_t>(t.relation) >= n_relations) {
      throw DataError("relation id " + std::to_string(t.relation) + " out of range");
    }
    pairs[static_cast<std::size_t>(t.relation)].emplace(t.subject, t.object);
  }
  std::vector<std::optional<RelationStats>> stats(n_relations);
  for (std::size_t r = 0; r < n_relations; ++r) {
    if (pairs[r].empty()) continue;
    std::map<EntityId, int> heads;
    std::map<EntityId, int> tails;
    for (const auto& [h, t] : pairs[r]) {
      ++heads[h];
      ++tails[t];
    }
    const double n = static_cast<double>(pairs[r].size());
    RelationStats s;
    s.tph = n / static_cast<double>(heads.size());
    s.hpt = n / static_cast<double>(tails.size());
    s.p_corrupt_subject = s.tph / (s.tph + s.hpt);
    stats[r] = s;
  }
  return BernoulliTable(std::move(stats));
}

void FilterIndex::add(std::span<const Triple> triples) {
  for (const auto& t : triples) {
    if (!known_.insert(t).second) continue;
    objects_[key(t.subject, t.relation)].push_back(t.object);
    subjects_[key(t.relation, t.object)].push_back(t.subject);
  }
}

std::span<const EntityId> FilterIndex::objects_of(EntityId s, RelationId r) const {
  if (auto it = objects_.find(key(s, r)); it != objects_.end()) return it->second;
  return {};
}

std::span<const EntityId> FilterIndex::subjects_of(RelationId r, EntityId o) const {
  if (auto it = subjects_.find(key(r, o)); it != subjects_.end()) return it->second;
  return {};
}

DatasetBundle make_bundle(std::vector<Triple> train, std::vector<Triple> valid,
                          std::vector<Triple> test, Vocabulary vocab) {
  DatasetBundle b;
  b.train = std::move(train);
  b.valid = std::move(valid);
  b.test = std::move(test);
  b.vocab = std::move(vocab);
  b.filter.add(b.train);
  b.filter.add(b.valid);
  b.filter.add(b.test);
  b.bernoulli = compute_bernoulli_stats(b.train, b.vocab.relations.size());
  return b;
}

DatasetBundle load_dataset(const std::filesystem::path& dir) {
  Vocabulary vocab;
  auto split = [&](const char* name) {
    const auto path = dir / name;
    if (!std::filesystem::is_regular_file(path)) {
      throw DataError("missing dataset file " + path.string());
    }
    return load_triples(path, vocab);
  };
  auto train = split("train.txt");
  auto valid = split("valid.txt");
  auto test = split("test.txt");
  return make_bundle(std::move(train), std::move(valid), std::move(test), std::move(vocab));
}

double fit_power_law_alpha_shift(std::span<const std::int64_t> degrees, std::int64_t d_min) {
  double sum = 0.0;
  std::size_t n = 0;
  for (auto d : degrees) {
    if (d < d_min) continue;
    sum += std::log(static_cast<double>(d) / (static_cast<double>(d_min) - 0.5));
    ++n;
  }
  if (n == 0) throw DataError("power-law fit: no degrees >= d_min");
  return 1.0 + static_cast<double>(n) / sum;
}

double fit_power_law_alpha(std::span<const std::int64_t> degrees, std::int64_t d_min) {
  if (d_min < 1) throw DomainError("power-law fit: d_min must be >= 1");
  double sum_log = 0.0;
  std::size_t n = 0;
  for (auto d : degrees) {
    if (d < d_min) continue;
    sum_log += std::log(static_cast<double>(d));
    ++n;
  }
  if (n == 0) throw DataError("power-law fit: no degrees >= d_min");
  const double mean_log = sum_log / static_cast<double>(n);
  const double q = static_cast<double>(d_min);

  gsl_set_error_handler_off();
  auto neg_log_likelihood = [&](double alpha) {
    gsl_sf_result z;
    if (gsl_sf_hzeta_e(alpha, q, &z) != GSL_SUCCESS || !(z.val > 0.0)) {
      return std::numeric_limits<double>::infinity();
    }
    return alpha * mean_log + std::log(z.val);
  };
  // The likelihood is concave in alpha; a sample concentrated at d_min
  // pushes the optimum to the upper end of the bracket.
  const auto [alpha, value] =
      boost::math::tools::brent_find_minima(neg_log_likelihood, 1.0 + 1e-6, 30.0, 50);
  (void)value;
  return alpha;
}

DegreeReport degree_analysis(std::span<const Triple> triples, std::size_t n_entities,
                             std::int64_t d_min) {
  if (triples.empty()) throw DataError("degree analysis needs at least one fact");
  if (n_entities == 0) {
    EntityId max_id = 0;
    for (const auto& t : triples) max_id = std::max({max_id, t.subject, t.object});
    n_entities = static_cast<std::size_t>(max_id) + 1;
  }
  DegreeReport rep;
  rep.d_min = d_min;
  rep.n_entities = n_entities;
  rep.n_facts = triples.size();
  rep.degrees.assign(n_entities, 0);
  for (const auto& t : triples) {
    if (t.subject < 0 || t.object < 0 || static_cast<std::size_t>(t.subject) >= n_entities ||
        static_cast<std::size_t>(t.object) >= n_entities) {
      throw DataError("degree analysis: entity id out of range");
    }
    ++rep.degrees[static_cast<std::size_t>(t.subject)];
    ++rep.degrees[static_cast<std::size_t>(t.object)];
  }

  std::vector<std::int64_t> counts;
  std::size_t positive = 0;
  for (auto d : rep.degrees) {
    if (d <= 0) continue;
    ++positive;
    const auto bin = static_cast<std::size_t>(std::bit_width(static_cast<std::uint64_t>(d)) - 1);
    if (counts.size() <= bin) counts.resize(bin + 1, 0);
    ++counts[bin];
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    HistogramBin b;
    b.lower = std::int64_t{1} << k;
    b.upper = std::int64_t{1} << (k + 1);
    b.center = std::sqrt(static_cast<double>(b.lower) * static_cast<double>(b.upper - 1));
    b.pdf = static_cast<double>(counts[k]) /
            (static_cast<double>(positive) * static_cast<double>(b.upper - b.lower));
    rep.histogram.push_back(b);
  }
  rep.alpha_hat = fit_power_law_alpha(rep.degrees, d_min);
  rep.alpha_hat_shift = fit_power_law_alpha_shift(rep.degrees, d_min);
  return rep;
}

void write_degree_report(const DegreeReport& report, const std::filesystem::path& csv_path,
                         const std::filesystem::path& json_path) {
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw DataError("cannot write " + csv_path.string());
  csv << "degree,pdf\n";
  csv.precision(17);
  for (const auto& b : report.histogram) csv << b.center << ',' << b.pdf << '\n';

  nlohmann::json j;
  j["alpha_hat"] = report.alpha_hat;
  j["alpha_hat_shift"] = report.alpha_hat_shift;
  j["d_min"] = report.d_min;
  j["n_entities"] = report.n_entities;
  j["n_facts"] = report.n_facts;
  std::ofstream js(json_path, std::ios::binary);
  if (!js) throw DataError("cannot write " + json_path.string());
  js << j.dump(2) << '\n';
}

}  // namespace hyperkg
