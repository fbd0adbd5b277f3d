#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace kgcast {

// Provenance block carried by every artifact: which stage wrote it, under
// which config hash, from which inputs (logical name -> whole-file checksum).
// Binary files embed it after the magic; text files get a sidecar
// "<file>.meta.json". No timestamps anywhere, so re-runs are byte-identical.
struct ArtifactMeta {
  std::string stage;
  uint64_t config_hash = 0;
  std::map<std::string, std::string> inputs;
  nlohmann::json params = nlohmann::json::object();

  nlohmann::json to_json() const;
  static ArtifactMeta from_json(const nlohmann::json& j);
};

// Binary container framing: magic (8 bytes) + format version + meta JSON.
void write_artifact_header(std::ostream& os, const char magic[8], uint32_t version, const ArtifactMeta& meta);
// Verifies magic, returns (version, meta). Throws IntegrityError on mismatch.
std::pair<uint32_t, ArtifactMeta> read_artifact_header(std::istream& is, const char magic[8],
                                                       uint32_t max_supported_version);

void write_meta_sidecar(const std::filesystem::path& artifact_path, const ArtifactMeta& meta);
ArtifactMeta read_meta_sidecar(const std::filesystem::path& artifact_path);

// Checks that `path`'s current checksum equals the checksum recorded for
// logical input `name` in `meta`; throws IntegrityError naming both values.
// Missing entries are ignored (older producers may record fewer inputs).
void verify_input_checksum(const ArtifactMeta& meta, const std::string& name, const std::filesystem::path& path);

}  // namespace kgcast
