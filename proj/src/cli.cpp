#include "hyperkg/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "hyperkg/errors.hpp"
#include "hyperkg/evaluation.hpp"
#include "hyperkg/kg_data.hpp"
#include "hyperkg/qc_rules.hpp"
#include "hyperkg/verification.hpp"

namespace hyperkg::cli {

using nlohmann::json;

namespace {

enum class Kind { Real, Int, Text, Bool, IntList };

struct KeySpec {
  const char* key;
  Kind kind;
  const char* help;
};

constexpr KeySpec kKeys[] = {
    {"gamma", Kind::Real, "hinge margin"},
    {"lambda", Kind::Real, "regulariser weight"},
    {"eta", Kind::Real, "learning rate"},
    {"negs_e", Kind::Int, "entity-corrupted negatives per positive"},
    {"negs_r", Kind::Int, "relation-corrupted negatives per positive"},
    {"dim", Kind::Int, "embedding dimension"},
    {"beta", Kind::Int, "permutation shift (default dim / 2)"},
    {"variant", Kind::Text, "euclidean-add | mobius-add"},
    {"max_epochs", Kind::Int, "training epochs"},
    {"eval_every", Kind::Int, "validate and checkpoint every N epochs (0 = never)"},
    {"batches_per_epoch", Kind::Int, "mini-batches per epoch"},
    {"eps", Kind::Real, "projection epsilon"},
    {"seed", Kind::Int, "random seed"},
    {"corruption", Kind::Text, "bernoulli | uniform"},
    {"full_reg_sweep", Kind::Bool, "regularise every vector on every step"},
    {"data_dir", Kind::Text, "dataset directory with train/valid/test.txt"},
    {"out", Kind::Text, "output directory"},
    {"ks", Kind::IntList, "comma-separated Hits@k cut-offs"},
};

const KeySpec* find_key(std::string_view key) {
  for (const auto& k : kKeys) {
    if (key == k.key) return &k;
  }
  return nullptr;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("not an integer list: '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

json parse_flag(const KeySpec& spec, const std::string& raw) {
  try {
    std::size_t used = 0;
    switch (spec.kind) {
      case Kind::Real: {
        const double v = std::stod(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::Int: {
        const long long v = std::stoll(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::Text:
        return raw;
      case Kind::Bool:
        if (raw == "true" || raw == "1") return true;
        if (raw == "false" || raw == "0") return false;
        break;
      case Kind::IntList:
        return parse_int_list(raw);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad value '" + raw + "' for --" + spec.key);
}

template <typename T>
T typed(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("wrong type for key '") + key + "'");
  }
}

json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object: " + path.string());
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse config file " + path.string() + ": " + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<Triple> all_triples(const DatasetBundle& b) {
  std::vector<Triple> t(b.train);
  t.insert(t.end(), b.valid.begin(), b.valid.end());
  t.insert(t.end(), b.test.begin(), b.test.end());
  return t;
}

// --- train ---------------------------------------------------------------

struct TrainArgs {
  std::string preset;
  std::string config_file;
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
};

void add_train_options(CLI::App& sub, TrainArgs& a) {
  sub.add_option("--preset", a.preset, "hyper-parameter preset")
      ->check(CLI::IsMember(preset_names()));
  sub.add_option("--config", a.config_file, "JSON config file");
  for (const auto& k : kKeys) {
    std::string dashed = k.key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    std::string names = "--" + dashed;
    if (dashed != k.key) names += std::string(",--") + k.key;
    if (std::string_view(k.key) == "data_dir") names += ",-d";
    if (std::string_view(k.key) == "out") names += ",-o";
    a.opts[k.key] = sub.add_option(names, a.raw[k.key], k.help);
  }
}

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  json flags = json::object();
  for (const auto& [key, opt] : a.opts) {
    if (opt->count() > 0) flags[key] = parse_flag(*find_key(key), a.raw.at(key));
  }
  const json file = a.config_file.empty() ? json::object() : read_config_file(a.config_file);
  const std::optional<std::string> preset =
      a.preset.empty() ? std::nullopt : std::optional<std::string>(a.preset);
  const RunConfig rc = resolve_run_config(preset, file, flags);
  if (rc.data_dir.empty()) throw ConfigError("train: --data-dir is required");
  if (rc.out_dir.empty()) throw ConfigError("train: --out is required");

  const DatasetBundle bundle = load_dataset(rc.data_dir);
  std::filesystem::create_directories(rc.out_dir);
  write_json_file(to_json(rc), rc.out_dir / "config.json");
  err << "training on " << bundle.train.size() << " facts, " << bundle.n_entities()
      << " entities, " << bundle.n_relations() << " relations\n";

  const TrainResult result = train(bundle, rc.train, rc.out_dir);
  for (const auto& e : result.log) {
    if (e.val_mrr) {
      err << "epoch " << e.epoch << " loss " << e.loss << " val_mrr " << *e.val_mrr
          << " val_hits10 " << *e.val_hits10 << '\n';
    }
  }
  err << "best epoch " << result.best_epoch << '\n';

  json report = json::object();
  if (!bundle.test.empty()) {
    const EvalReport test = evaluate(result.best, bundle, rc.ks);
    report = json::parse(report_json(test));
  }
  report["best_epoch"] = result.best_epoch;
  if (result.best_val_mrr) report["best_val_mrr"] = *result.best_val_mrr;
  write_json_file(report, rc.out_dir / "eval.json");
  out << report.dump() << '\n';
  return kOk;
}

// --- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint;
  std::string data_dir;
  std::string ks = "10";
  std::string split = "test";
  std::string per_query;
};

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << v;
  return s.str();
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const std::vector<int> ks = parse_int_list(a.ks);
  const LoadedCheckpoint ckpt = load_checkpoint(a.checkpoint);
  const DatasetBundle bundle = load_dataset(a.data_dir);
  const std::uint64_t ent = bundle.vocab.entities.fingerprint();
  const std::uint64_t rel = bundle.vocab.relations.fingerprint();
  if (ent != ckpt.info.entity_vocab_hash || rel != ckpt.info.relation_vocab_hash ||
      ckpt.store.n_entities() != bundle.n_entities() ||
      ckpt.store.n_relations() != bundle.n_relations()) {
    throw VocabMismatchError("checkpoint vocabulary (entities " + hex(ckpt.info.entity_vocab_hash) +
                             ", relations " + hex(ckpt.info.relation_vocab_hash) +
                             ") does not match dataset (entities " + hex(ent) + ", relations " +
                             hex(rel) + ")");
  }
  const auto& triples = a.split == "valid" ? bundle.valid : bundle.test;
  if (triples.empty()) throw DataError("eval: " + a.split + " split is empty");
  const EvalReport report = evaluate_triples(ckpt.store, triples, bundle.filter, ks);
  if (!a.per_query.empty()) write_per_query_csv(report, bundle.vocab, a.per_query);
  err << "evaluated " << report.per_query.size() << " queries\n";
  out << report_json(report) << '\n';
  return kOk;
}

// --- verify --------------------------------------------------------------

struct VerifyArgs {
  std::size_t samples = 100000;
  std::size_t regions = 100;
  std::string dims = "2,5,100";
  std::uint64_t seed = 0;
  std::size_t grad_configs = 1000;
  double lemma_a = 1.0;
  double lemma_offset = 0.0;
};

json norm_pair_json(const NormPair& p) { return {{"l1", p.l1}, {"l2", p.l2}}; }

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const std::vector<int> dims = parse_int_list(a.dims);
  RngStreams streams(a.seed);
  bool ok = true;
  json report;

  json regions = json::array();
  for (int d : dims) {
    if (d < 1) throw ConfigError("verify: dimensions must be >= 1");
    Rng rng = streams.stream("verify-regions", static_cast<std::uint64_t>(d));
    const RegionSuiteResult r =
        check_random_regions(static_cast<std::size_t>(d), a.regions, a.samples, rng);
    ok = ok && r.locus_violations == 0 && r.convexity_violations == 0;
    err << "regions dim " << d << ": locus violations " << r.locus_violations
        << ", convexity violations " << r.convexity_violations << ", skipped " << r.skipped << '\n';
    regions.push_back({{"dim", r.dim},
                       {"regions", r.regions},
                       {"samples_per_region", r.samples},
                       {"skipped", r.skipped},
                       {"locus_violations", r.locus_violations},
                       {"convexity_violations", r.convexity_violations},
                       {"worst_margin", r.worst_margin}});
  }
  report["regions"] = regions;

  const Lemma1Report lemma = lemma1_counterexamples(a.lemma_a, a.lemma_offset);
  const NormPair r3 = lemma.cases.at(2).conclusion;
  const double r3_expected = std::sqrt(26.0) / 2.0 * a.lemma_a;
  const bool r3_ok = std::abs(r3.l2 - r3_expected) <= 1e-12 * std::max(1.0, a.lemma_a);
  ok = ok && lemma.holds() && r3_ok;
  json cases = json::array();
  for (const auto& c : lemma.cases) {
    json premises = json::array();
    for (const auto& p : c.premises) premises.push_back(norm_pair_json(p));
    cases.push_back({{"name", c.name}, {"premises", premises}, {"conclusion", norm_pair_json(c.conclusion)}});
    err << c.name << " conclusion: L1 " << c.conclusion.l1 << ", L2 " << c.conclusion.l2 << '\n';
  }
  report["lemma1"] = {{"a", lemma.a},
                      {"cases", cases},
                      {"holds", lemma.holds()},
                      {"r3_l2_expected", r3_expected},
                      {"r3_l2_matches", r3_ok}};

  const GradientCheckResult g = check_loss_gradients(a.grad_configs, streams.stream("verify-gradients")());
  ok = ok && g.failures == 0;
  err << "gradients: " << g.failures << " failures over " << g.configurations
      << " configurations, max relative error " << g.max_rel_error << '\n';
  report["gradients"] = {{"configurations", g.configurations},
                         {"failures", g.failures},
                         {"resampled", g.resampled},
                         {"max_rel_error", g.max_rel_error},
                         {"tolerance", kGradientTolerance}};
  report["ok"] = ok;
  out << report.dump() << '\n';
  return ok ? kOk : kViolation;
}

// --- analyze-degrees -----------------------------------------------------

struct DegreeArgs {
  std::string data_dir;
  std::string out;
  std::int64_t d_min = 1;
};

int cmd_analyze_degrees(const DegreeArgs& a, std::ostream& out, std::ostream& err) {
  const DatasetBundle bundle = load_dataset(a.data_dir);
  const std::vector<Triple> triples = all_triples(bundle);
  const DegreeReport report = degree_analysis(triples, bundle.n_entities(), a.d_min);
  std::filesystem::path csv = a.out;
  std::filesystem::path sidecar = csv;
  sidecar.replace_extension(".json");
  if (sidecar == csv) sidecar += ".json";
  if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
  write_degree_report(report, csv, sidecar);

  const std::int64_t total = std::accumulate(report.degrees.begin(), report.degrees.end(), std::int64_t{0});
  err << "alpha_hat " << report.alpha_hat << " over " << report.n_entities << " entities\n";
  json j = {{"alpha_hat", report.alpha_hat},
            {"alpha_hat_shift", report.alpha_hat_shift},
            {"d_min", report.d_min},
            {"n_entities", report.n_entities},
            {"n_facts", report.n_facts},
            {"total_degree", total},
            {"handshake_ok", total == 2 * static_cast<std::int64_t>(report.n_facts)},
            {"csv", csv.string()},
            {"json", sidecar.string()}};
  out << j.dump() << '\n';
  return kOk;
}

// --- gen-dataset ---------------------------------------------------------

struct GenArgs {
  std::string rules = "a";
  std::uint64_t seed = 0;
  std::string out;
  std::size_t entities = 0;
  std::size_t holdout = 0;
};

int cmd_gen_dataset(const GenArgs& a, std::ostream& out, std::ostream& err) {
  const RuleSet rules = RuleSet::parse(a.rules);
  WdConfig config = rules.b ? WdConfig::wd_plus_plus(a.seed) : WdConfig::wd(a.seed);
  config.rules = rules;
  if (a.entities > 0) config.target_entities = a.entities;
  if (a.holdout > 0) config.holdout_per_split = a.holdout;
  const GeneratedDataset data = generate_wd_like(config);
  write_generated_dataset(data, a.out);
  const auto& b = data.bundle;
  err << "wrote " << b.train.size() << "/" << b.valid.size() << "/" << b.test.size()
      << " facts over " << b.n_entities() << " entities to " << a.out << '\n';
  json j = {{"rules", rules.to_string()},
            {"seed", a.seed},
            {"n_entities", b.n_entities()},
            {"n_relations", b.n_relations()},
            {"train", b.train.size()},
            {"valid", b.valid.size()},
            {"test", b.test.size()},
            {"derived_facts", data.derived_facts}};
  out << j.dump() << '\n';
  return kOk;
}

template <typename F>
int guarded(F&& f, std::ostream& err) {
  try {
    return f();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const VocabMismatchError& e) {
    err << "vocabulary mismatch: " << e.what() << '\n';
    return kVocabMismatch;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kViolation;
  }
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"wn18rr", "wn18rr-mobius", "wn18rr-noreg", "fb15k237", "fb15k237-mobius",
          "fb15k237-noreg", "wd", "wdpp"};
}

nlohmann::json preset_json(std::string_view name) {
  auto row = [](int negs_e, int negs_r, double eta, double lambda, double gamma,
                const char* variant, const char* corruption) {
    return json{{"negs_e", negs_e}, {"negs_r", negs_r}, {"eta", eta},
                {"lambda", lambda}, {"dim", 100},       {"gamma", gamma},
                {"variant", variant}, {"corruption", corruption}};
  };
  // The Mobius rows have no regulariser.
  if (name == "wn18rr") return row(10, 0, 0.01, 0.8, 1.0, "euclidean-add", "bernoulli");
  if (name == "wn18rr-mobius") return row(10, 0, 0.01, 0.0, 1.0, "mobius-add", "bernoulli");
  if (name == "wn18rr-noreg") return row(10, 0, 0.01, 0.0, 1.0, "euclidean-add", "bernoulli");
  if (name == "fb15k237") return row(5, 0, 0.01, 0.2, 0.5, "euclidean-add", "bernoulli");
  if (name == "fb15k237-mobius") return row(5, 0, 0.01, 0.0, 0.5, "mobius-add", "bernoulli");
  if (name == "fb15k237-noreg") return row(5, 0, 0.01, 0.0, 0.5, "euclidean-add", "bernoulli");
  if (name == "wd") return row(1, 1, 0.8, 0.0, 7.0, "euclidean-add", "uniform");
  if (name == "wdpp") return row(1, 1, 0.1, 0.0, 7.0, "euclidean-add", "uniform");
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

nlohmann::json default_json() {
  RunConfig rc;
  return to_json(rc);
}

nlohmann::json to_json(const RunConfig& c) {
  const TrainConfig& t = c.train;
  json j = {{"gamma", t.gamma},
            {"lambda", t.lambda},
            {"eta", t.eta},
            {"negs_e", t.negs_e},
            {"negs_r", t.negs_r},
            {"dim", t.dim},
            {"beta", nullptr},
            {"variant", std::string(to_string(t.variant))},
            {"max_epochs", t.max_epochs},
            {"eval_every", t.eval_every},
            {"batches_per_epoch", t.batches_per_epoch},
            {"eps", t.eps},
            {"seed", t.seed},
            {"corruption", std::string(to_string(t.corruption))},
            {"full_reg_sweep", t.full_reg_sweep},
            {"data_dir", c.data_dir.string()},
            {"out", c.out_dir.string()},
            {"ks", c.ks}};
  if (t.beta) j["beta"] = *t.beta;
  return j;
}

RunConfig resolve_run_config(const std::optional<std::string>& preset, const nlohmann::json& file,
                             const nlohmann::json& flags) {
  json merged = default_json();
  auto layer = [&](const json& src, const char* what) {
    if (!src.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
    for (const auto& [key, value] : src.items()) {
      if (find_key(key) == nullptr) {
        throw ConfigError(std::string("unknown ") + what + " key '" + key + "'");
      }
      merged[key] = value;
    }
  };
  if (preset) layer(preset_json(*preset), "preset");
  layer(file, "config");
  layer(flags, "flag");

  RunConfig rc;
  TrainConfig& t = rc.train;
  t.gamma = typed<double>(merged["gamma"], "gamma");
  t.lambda = typed<double>(merged["lambda"], "lambda");
  t.eta = typed<double>(merged["eta"], "eta");
  t.negs_e = typed<int>(merged["negs_e"], "negs_e");
  t.negs_r = typed<int>(merged["negs_r"], "negs_r");
  const auto dim = typed<long long>(merged["dim"], "dim");
  if (dim < 1) throw ConfigError("dim must be >= 1");
  t.dim = static_cast<std::size_t>(dim);
  if (!merged["beta"].is_null()) {
    const auto beta = typed<long long>(merged["beta"], "beta");
    if (beta < 0) throw ConfigError("beta must be >= 0");
    t.beta = static_cast<std::size_t>(beta);
  }
  t.variant = parse_variant(typed<std::string>(merged["variant"], "variant"));
  t.max_epochs = typed<int>(merged["max_epochs"], "max_epochs");
  t.eval_every = typed<int>(merged["eval_every"], "eval_every");
  t.batches_per_epoch = typed<int>(merged["batches_per_epoch"], "batches_per_epoch");
  t.eps = typed<double>(merged["eps"], "eps");
  const auto seed = typed<long long>(merged["seed"], "seed");
  if (seed < 0) throw ConfigError("seed must be >= 0");
  t.seed = static_cast<std::uint64_t>(seed);
  t.corruption = parse_corruption_mode(typed<std::string>(merged["corruption"], "corruption"));
  t.full_reg_sweep = typed<bool>(merged["full_reg_sweep"], "full_reg_sweep");
  rc.data_dir = typed<std::string>(merged["data_dir"], "data_dir");
  rc.out_dir = typed<std::string>(merged["out"], "out");
  rc.ks = typed<std::vector<int>>(merged["ks"], "ks");
  if (rc.ks.empty()) throw ConfigError("ks must not be empty");
  t.validate();
  return rc;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperbolic knowledge graph embeddings"};
  app.name(args.empty() ? "hyperkg" : args.front());
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a model and write logs, checkpoints and a test report");
  add_train_options(*train_cmd, train_args);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "filtered link-prediction metrics for a checkpoint");
  eval_cmd->add_option("--checkpoint,-c", eval_args.checkpoint, "checkpoint manifest")->required();
  eval_cmd->add_option("--data-dir,-d", eval_args.data_dir, "dataset directory")->required();
  eval_cmd->add_option("--ks", eval_args.ks, "comma-separated Hits@k cut-offs")->capture_default_str();
  eval_cmd->add_option("--split", eval_args.split, "valid | test")
      ->check(CLI::IsMember({"valid", "test"}))
      ->capture_default_str();
  eval_cmd->add_option("--per-query", eval_args.per_query, "write per-query ranks to this CSV");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "region, restriction and gradient checks");
  verify_cmd->add_option("--samples", verify_args.samples, "samples per region")->capture_default_str();
  verify_cmd->add_option("--regions", verify_args.regions, "random regions per dimension")->capture_default_str();
  verify_cmd->add_option("--dims", verify_args.dims, "comma-separated dimensions")->capture_default_str();
  verify_cmd->add_option("--seed", verify_args.seed, "random seed")->capture_default_str();
  verify_cmd->add_option("--grad-configs", verify_args.grad_configs, "gradient check configurations")
      ->capture_default_str();
  verify_cmd->add_option("--lemma-a", verify_args.lemma_a, "validity threshold a")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify_cmd->add_option("--lemma-offset", verify_args.lemma_offset, "offset of the counterexample points")
      ->capture_default_str();

  DegreeArgs degree_args;
  auto* degree_cmd = app.add_subcommand("analyze-degrees", "degree histogram and power-law fit");
  degree_cmd->add_option("--data-dir,-d", degree_args.data_dir, "dataset directory")->required();
  degree_cmd->add_option("--out,-o", degree_args.out, "CSV path; a .json sidecar is written next to it")
      ->required();
  degree_cmd->add_option("--d-min", degree_args.d_min, "smallest degree in the fit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen-dataset", "synthetic taxonomy dataset closed under rules a / ab");
  gen_cmd->add_option("--rules", gen_args.rules, "a | ab")
      ->check(CLI::IsMember({"a", "b", "ab"}))
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen_args.seed, "random seed")->capture_default_str();
  gen_cmd->add_option("--out,-o", gen_args.out, "output directory")->required();
  gen_cmd->add_option("--entities", gen_args.entities, "target entity count (default per rule set)");
  gen_cmd->add_option("--holdout", gen_args.holdout, "facts per held-out split (default per rule set)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  return guarded(
      [&] {
        if (train_cmd->parsed()) return cmd_train(train_args, out, err);
        if (eval_cmd->parsed()) return cmd_eval(eval_args, out, err);
        if (verify_cmd->parsed()) return cmd_verify(verify_args, out, err);
        if (degree_cmd->parsed()) return cmd_analyze_degrees(degree_args, out, err);
        return cmd_gen_dataset(gen_args, out, err);
      },
      err);
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace hyperkg::cli
