#include "kgcast/artifact.hpp"

#include <cstring>
#include <fstream>

#include "kgcast/binio.hpp"
#include "kgcast/errors.hpp"
#include "kgcast/hash.hpp"

namespace kgcast {

nlohmann::json ArtifactMeta::to_json() const {
  nlohmann::json j;
  j["stage"] = stage;
  j["config_hash"] = checksum_hex(config_hash);
  j["inputs"] = inputs;
  j["params"] = params;
  return j;
}

ArtifactMeta ArtifactMeta::from_json(const nlohmann::json& j) {
  ArtifactMeta m;
  m.stage = j.value("stage", "");
  if (j.contains("config_hash")) m.config_hash = parse_checksum_hex(j["config_hash"].get<std::string>());
  if (j.contains("inputs")) m.inputs = j["inputs"].get<std::map<std::string, std::string>>();
  if (j.contains("params")) m.params = j["params"];
  return m;
}

void write_artifact_header(std::ostream& os, const char magic[8], uint32_t version, const ArtifactMeta& meta) {
  os.write(magic, 8);
  write_le<uint32_t>(os, version);
  write_string(os, meta.to_json().dump());
}

std::pair<uint32_t, ArtifactMeta> read_artifact_header(std::istream& is, const char magic[8],
                                                       uint32_t max_supported_version) {
  char got[8];
  is.read(got, 8);
  if (!is || std::memcmp(got, magic, 8) != 0)
    throw IntegrityError(std::string("bad file magic, expected '") + std::string(magic, 8) + "'");
  uint32_t version = read_le<uint32_t>(is);
  if (version == 0 || version > max_supported_version)
    throw IntegrityError("unsupported format version " + std::to_string(version));
  std::string meta_text = read_string(is);
  nlohmann::json j = nlohmann::json::parse(meta_text, nullptr, false);
  if (j.is_discarded()) throw IntegrityError("artifact meta block is not valid JSON");
  return {version, ArtifactMeta::from_json(j)};
}

void write_meta_sidecar(const std::filesystem::path& artifact_path, const ArtifactMeta& meta) {
  std::filesystem::path side = artifact_path;
  side += ".meta.json";
  std::ofstream out(side);
  if (!out) throw ValidationError("cannot write meta sidecar: " + side.string());
  out << meta.to_json().dump(2) << '\n';
}

ArtifactMeta read_meta_sidecar(const std::filesystem::path& artifact_path) {
  std::filesystem::path side = artifact_path;
  side += ".meta.json";
  std::ifstream in(side);
  if (!in) throw ValidationError("missing meta sidecar: " + side.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw IntegrityError("meta sidecar is not valid JSON: " + side.string());
  return ArtifactMeta::from_json(j);
}

void verify_input_checksum(const ArtifactMeta& meta, const std::string& name, const std::filesystem::path& path) {
  auto it = meta.inputs.find(name);
  if (it == meta.inputs.end()) return;
  const std::string actual = checksum_hex(file_checksum(path));
  if (actual != it->second) {
    throw IntegrityError("lineage mismatch for input '" + name + "': recorded checksum " + it->second +
                         " but file " + path.string() + " now hashes to " + actual);
  }
}

}  // namespace kgcast
