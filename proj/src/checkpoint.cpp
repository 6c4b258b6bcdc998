#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hyperkg/errors.hpp"
#include "hyperkg/model.hpp"
#include "json.hpp"

namespace hyperkg {

namespace {

std::filesystem::path sidecar(const std::filesystem::path& manifest, const char* suffix) {
  auto p = manifest;
  p += suffix;
  return p;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::uint64_t parse_hex64(const std::string& s) { return std::stoull(s, nullptr, 16); }

void write_f64_le(const std::filesystem::path& path, std::span<const double> data) {
  std::vector<unsigned char> bytes(data.size() * 8);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(data[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void read_f64_le(const std::filesystem::path& path, std::span<double> data) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<unsigned char> bytes(data.size() * 8);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size() || in.peek() != EOF) {
    throw DataError(path.string() + ": size does not match the manifest");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    data[i] = std::bit_cast<double>(bits);
  }
}

}  // namespace

void save_checkpoint(const ParameterStore& store, const Vocabulary& vocab,
                     const std::filesystem::path& path) {
  const auto ent_path = sidecar(path, ".entities.f64");
  const auto rel_path = sidecar(path, ".relations.f64");
  nlohmann::json j;
  j["version"] = kCheckpointVersion;
  j["n"] = store.dim();
  j["n_entities"] = store.n_entities();
  j["n_relations"] = store.n_relations();
  j["beta"] = store.beta();
  j["variant"] = std::string(to_string(store.variant()));
  j["vocab_hashes"] = {{"entities", hex64(vocab.entities.fingerprint())},
                       {"relations", hex64(vocab.relations.fingerprint())}};
  j["entities_file"] = ent_path.filename().string();
  j["relations_file"] = rel_path.filename().string();

  write_f64_le(ent_path, store.entity_data());
  write_f64_le(rel_path, store.relation_data());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint manifest " + path.string() + ": " + e.what());
  }
  try {
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw DataError("unsupported checkpoint version in " + path.string());
    }
    ParameterStore store(j.at("n_entities").get<std::size_t>(),
                         j.at("n_relations").get<std::size_t>(), j.at("n").get<std::size_t>(),
                         j.at("beta").get<std::size_t>(),
                         parse_variant(j.at("variant").get<std::string>()));
    const auto dir = path.parent_path();
    read_f64_le(dir / j.at("entities_file").get<std::string>(), store.entity_data());
    read_f64_le(dir / j.at("relations_file").get<std::string>(), store.relation_data());
    CheckpointInfo info;
    info.version = j.at("version").get<int>();
    info.entity_vocab_hash = parse_hex64(j.at("vocab_hashes").at("entities").get<std::string>());
    info.relation_vocab_hash = parse_hex64(j.at("vocab_hashes").at("relations").get<std::string>());
    return {std::move(store), info};
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace hyperkg
