#include "hyperkg/qc_rules.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "hyperkg/errors.hpp"
#include "hyperkg/rng.hpp"
#include "json.hpp"

namespace hyperkg {

RuleSet RuleSet::parse(std::string_view spec) {
  RuleSet rs;
  for (char c : spec) {
    if (c == 'a') {
      rs.a = true;
    } else if (c == 'b') {
      rs.b = true;
    } else {
      throw ConfigError("unknown rule '" + std::string(1, c) + "' (expected a, b or ab)");
    }
  }
  if (!rs.a && !rs.b) throw ConfigError("empty rule set");
  return rs;
}

std::string RuleSet::to_string() const { return std::string(a ? "a" : "") + (b ? "b" : ""); }

Closure close_with_provenance(const RuleKB& kb, RuleSet rules) {
  std::map<EntityId, std::vector<EntityId>> children;  // y -> {x : is_a(x, y)}
  std::map<EntityId, std::vector<EntityId>> parents;   // y -> {z : is_a(y, z)}
  for (const auto& [x, y] : kb.is_a) {
    children[y].push_back(x);
    parents[x].push_back(y);
  }

  Closure out;
  out.kb = kb;
  std::vector<Edge> delta(kb.part_of.begin(), kb.part_of.end());
  while (!delta.empty()) {
    std::vector<Edge> next;
    for (const auto& [p, q] : delta) {
      if (rules.a) {
        if (auto it = children.find(p); it != children.end()) {
          for (EntityId c : it->second) {
            const Edge e{c, q};
            if (out.kb.part_of.insert(e).second) {
              out.derived.emplace(e, Derivation{Rule::A, {c, p}, {p, q}});
              next.push_back(e);
            }
          }
        }
      }
      if (rules.b) {
        if (auto it = parents.find(q); it != parents.end()) {
          for (EntityId g : it->second) {
            const Edge e{p, g};
            if (out.kb.part_of.insert(e).second) {
              out.derived.emplace(e, Derivation{Rule::B, {q, g}, {p, q}});
              next.push_back(e);
            }
          }
        }
      }
    }
    delta = std::move(next);
  }
  return out;
}

RuleKB close(const RuleKB& kb, RuleSet rules) { return close_with_provenance(kb, rules).kb; }

WdConfig WdConfig::wd(std::uint64_t seed) {
  WdConfig c;
  c.target_entities = 418;
  c.derived_per_rule = 200;
  c.holdout_per_split = 25;
  c.rules = RuleSet{true, false};
  c.seed = seed;
  return c;
}

WdConfig WdConfig::wd_plus_plus(std::uint64_t seed) {
  WdConfig c;
  c.target_entities = 763;
  c.derived_per_rule = 200;
  c.holdout_per_split = 40;
  c.rules = RuleSet{true, true};
  c.seed = seed;
  return c;
}

namespace {

struct Structure {
  std::vector<std::string> names;
  std::vector<EntityId> parts;    // taxonomy forest nodes
  std::vector<EntityId> wholes;   // part_of targets
  std::vector<EntityId> classes;  // is_a targets of wholes (rule b only)
  std::vector<std::vector<EntityId>> children;
  RuleKB kb;

  EntityId add(std::string prefix, std::size_t index) {
    names.push_back(std::move(prefix) + "_" + std::to_string(index));
    children.emplace_back();
    return static_cast<EntityId>(names.size() - 1);
  }
};

void grow_forest(Structure& st, std::size_t budget, Rng& rng) {
  std::uniform_int_distribution<int> depth_dist(3, 5);
  std::uniform_int_distribution<int> branch_dist(2, 5);
  std::bernoulli_distribution expand(0.45);
  while (st.parts.size() < budget) {
    const EntityId root = st.add("concept", st.parts.size());
    st.parts.push_back(root);
    const int max_depth = depth_dist(rng);
    std::vector<std::pair<EntityId, int>> queue{{root, 0}};
    for (std::size_t head = 0; head < queue.size() && st.parts.size() < budget; ++head) {
      const auto [node, depth] = queue[head];
      if (depth >= max_depth || (depth > 0 && !expand(rng))) continue;
      const int branches = branch_dist(rng);
      for (int b = 0; b < branches && st.parts.size() < budget; ++b) {
        const EntityId child = st.add("concept", st.parts.size());
        st.parts.push_back(child);
        st.children[static_cast<std::size_t>(node)].push_back(child);
        st.kb.is_a.emplace(child, node);
        queue.emplace_back(child, depth + 1);
      }
    }
  }
}

std::size_t derived_count(const RuleKB& kb, RuleSet rules) {
  return close_with_provenance(kb, rules).derived.size();
}

// Adds candidate edges one at a time (skipping any that would overshoot the
// target by more than 10%) until the closure holds at least `target`
// consequents. Returns false when the candidates run out first.
template <typename AddEdge, typename RemoveEdge>
bool fill_until(std::size_t target, std::size_t n_candidates, RuleSet rules, Structure& st,
                AddEdge add_edge, RemoveEdge remove_edge) {
  const auto ceiling = target + target / 10;
  std::size_t current = derived_count(st.kb, rules);
  for (std::size_t i = 0; i < n_candidates && current < target; ++i) {
    if (!add_edge(i)) continue;
    const std::size_t next = derived_count(st.kb, rules);
    if (next > ceiling || next == current) {
      remove_edge(i);
      continue;
    }
    current = next;
  }
  return current >= target;
}

Triple to_triple(const Edge& e, RelationId rel) { return Triple{e.first, rel, e.second}; }

void expand_chain(const Closure& closure, const Edge& part_of, RelationId is_a_rel,
                  RelationId part_of_rel, std::vector<Triple>& chain) {
  const auto it = closure.derived.find(part_of);
  if (it == closure.derived.end()) return;
  const Derivation& d = it->second;
  expand_chain(closure, d.part_of, is_a_rel, part_of_rel, chain);
  chain.push_back(to_triple(d.is_a, is_a_rel));
  chain.push_back(to_triple(d.part_of, part_of_rel));
}

}  // namespace

GeneratedDataset generate_wd_like(const WdConfig& config) {
  if (config.target_entities < 20) throw ConfigError("generate_wd_like: target_entities too small");
  if (config.derived_per_rule == 0) throw ConfigError("generate_wd_like: derived_per_rule is 0");
  Rng rng = RngStreams(config.seed).stream("wd-generator");

  Structure st;
  const std::size_t n_wholes = std::max<std::size_t>(2, config.target_entities / 10);
  const std::size_t n_classes = config.rules.b ? std::max<std::size_t>(2, config.target_entities / 25) : 0;
  for (std::size_t i = 0; i < n_wholes; ++i) st.wholes.push_back(st.add("whole", i));
  for (std::size_t i = 0; i < n_classes; ++i) st.classes.push_back(st.add("class", i));
  grow_forest(st, config.target_entities - n_wholes - n_classes, rng);

  // Base part_of edges from internal taxonomy nodes to wholes; rule (a)
  // pushes them down to every descendant.
  std::vector<EntityId> internal;
  for (EntityId p : st.parts) {
    if (!st.children[static_cast<std::size_t>(p)].empty()) internal.push_back(p);
  }
  std::shuffle(internal.begin(), internal.end(), rng);
  std::vector<Edge> part_candidates;
  for (EntityId p : internal) {
    std::uniform_int_distribution<std::size_t> pick(0, st.wholes.size() - 1);
    part_candidates.emplace_back(p, st.wholes[pick(rng)]);
  }
  const RuleSet only_a{true, false};
  const std::size_t target_a = config.rules.a ? config.derived_per_rule : 0;
  if (config.rules.a &&
      !fill_until(
          target_a, part_candidates.size(), only_a, st,
          [&](std::size_t i) { return st.kb.part_of.insert(part_candidates[i]).second; },
          [&](std::size_t i) { st.kb.part_of.erase(part_candidates[i]); })) {
    throw ConfigError("generate_wd_like: not enough rule (a) consequents; raise target_entities");
  }

  if (config.rules.b) {
    if (!config.rules.a) {
      // Without rule (a), seed part_of edges directly.
      for (std::size_t i = 0; i < part_candidates.size() / 2; ++i) {
        st.kb.part_of.insert(part_candidates[i]);
      }
    }
    std::vector<Edge> class_candidates;
    for (EntityId w : st.wholes) {
      std::uniform_int_distribution<std::size_t> pick(0, st.classes.size() - 1);
      class_candidates.emplace_back(w, st.classes[pick(rng)]);
    }
    std::shuffle(class_candidates.begin(), class_candidates.end(), rng);
    const std::size_t target = target_a + config.derived_per_rule;
    if (!fill_until(
            target, class_candidates.size(), config.rules, st,
            [&](std::size_t i) { return st.kb.is_a.insert(class_candidates[i]).second; },
            [&](std::size_t i) { st.kb.is_a.erase(class_candidates[i]); })) {
      throw ConfigError("generate_wd_like: not enough rule (b) consequents; raise target_entities");
    }
  }

  const Closure closure = close_with_provenance(st.kb, config.rules);
  std::vector<Edge> derived;
  for (const auto& [e, d] : closure.derived) derived.push_back(e);
  if (derived.size() < 2 * config.holdout_per_split + 1) {
    throw ConfigError("generate_wd_like: too few consequents for the requested holdout size");
  }
  std::shuffle(derived.begin(), derived.end(), rng);

  // Hold out consequents one by one, keeping each only if every held-out
  // fact stays derivable from what remains in train.
  std::set<Edge> held;
  std::vector<Edge> valid_edges;
  std::vector<Edge> test_edges;
  for (const Edge& e : derived) {
    if (test_edges.size() == config.holdout_per_split) break;
    held.insert(e);
    RuleKB train_kb{st.kb.is_a, {}};
    for (const auto& p : closure.kb.part_of) {
      if (!held.contains(p)) train_kb.part_of.insert(p);
    }
    const RuleKB reclosed = close(train_kb, config.rules);
    const bool derivable = std::all_of(held.begin(), held.end(),
                                       [&](const Edge& h) { return reclosed.part_of.contains(h); });
    if (!derivable) {
      held.erase(e);
      continue;
    }
    (valid_edges.size() < config.holdout_per_split ? valid_edges : test_edges).push_back(e);
  }
  if (test_edges.size() < config.holdout_per_split) {
    throw ConfigError("generate_wd_like: could not hold out enough derivable consequents");
  }

  // Train = is_a facts + every part_of fact not held out, in random order.
  std::vector<std::pair<Edge, bool>> train_facts;  // (edge, is_a?)
  for (const auto& e : st.kb.is_a) train_facts.emplace_back(e, true);
  for (const auto& e : closure.kb.part_of) {
    if (!held.contains(e)) train_facts.emplace_back(e, false);
  }
  std::shuffle(train_facts.begin(), train_facts.end(), rng);

  Vocabulary vocab;
  const RelationId is_a_rel = vocab.relations.intern(kIsA);
  const RelationId part_of_rel = vocab.relations.intern(kPartOf);
  auto named = [&](const Edge& e, RelationId rel) {
    const EntityId s = vocab.entities.intern(st.names[static_cast<std::size_t>(e.first)]);
    const EntityId o = vocab.entities.intern(st.names[static_cast<std::size_t>(e.second)]);
    return Triple{s, rel, o};
  };
  std::vector<Triple> train;
  for (const auto& [e, is_a] : train_facts) train.push_back(named(e, is_a ? is_a_rel : part_of_rel));
  std::vector<Triple> valid;
  for (const auto& e : valid_edges) valid.push_back(named(e, part_of_rel));
  std::vector<Triple> test;
  for (const auto& e : test_edges) test.push_back(named(e, part_of_rel));

  GeneratedDataset out;
  out.base_facts = st.kb.is_a.size() + st.kb.part_of.size();
  out.derived_facts = closure.derived.size();
  for (const auto& [e, d] : closure.derived) ++out.derived_by_rule[d.rule];

  auto add_provenance = [&](const std::vector<Edge>& edges, const char* split) {
    for (const auto& e : edges) {
      ProvenanceEntry p;
      p.fact = named(e, part_of_rel);
      p.split = split;
      p.rule = closure.derived.at(e).rule;
      std::vector<Triple> raw;
      expand_chain(closure, e, is_a_rel, part_of_rel, raw);
      for (const auto& t : raw) {
        p.chain.push_back(named({t.subject, t.object}, t.relation));
      }
      out.provenance.push_back(std::move(p));
    }
  };
  add_provenance(valid_edges, "valid");
  add_provenance(test_edges, "test");

  out.bundle = make_bundle(std::move(train), std::move(valid), std::move(test), std::move(vocab));
  out.bundle.uniform_corruption = true;
  return out;
}

void write_generated_dataset(const GeneratedDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& b = data.bundle;
  write_triples(dir / "train.txt", b.train, b.vocab);
  write_triples(dir / "valid.txt", b.valid, b.vocab);
  write_triples(dir / "test.txt", b.test, b.vocab);

  auto fact_json = [&](const Triple& t) {
    return nlohmann::json::array({b.vocab.entities.name(t.subject),
                                  b.vocab.relations.name(t.relation),
                                  b.vocab.entities.name(t.object)});
  };
  nlohmann::json j;
  j["n_entities"] = b.n_entities();
  j["n_relations"] = b.n_relations();
  j["splits"] = {{"train", b.train.size()}, {"valid", b.valid.size()}, {"test", b.test.size()}};
  j["base_facts"] = data.base_facts;
  j["derived_facts"] = data.derived_facts;
  j["derived_by_rule"] = {{"a", data.derived_by_rule.contains(Rule::A) ? data.derived_by_rule.at(Rule::A) : 0},
                          {"b", data.derived_by_rule.contains(Rule::B) ? data.derived_by_rule.at(Rule::B) : 0}};
  j["train_contains"] = "all base is_a/part_of facts plus the consequents not held out";
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& p : data.provenance) {
    nlohmann::json e;
    e["fact"] = fact_json(p.fact);
    e["split"] = p.split;
    e["rule"] = p.rule == Rule::A ? "a" : "b";
    nlohmann::json chain = nlohmann::json::array();
    for (const auto& t : p.chain) chain.push_back(fact_json(t));
    e["chain"] = chain;
    entries.push_back(e);
  }
  j["holdout"] = entries;
  std::ofstream out(dir / "provenance.json", std::ios::binary);
  if (!out) throw DataError("cannot write " + (dir / "provenance.json").string());
  out << j.dump(2) << '\n';
}

}  // namespace hyperkg
