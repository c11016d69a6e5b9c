#ifndef TOPOCHAIN_IO_MANIFEST_HPP
#define TOPOCHAIN_IO_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "topochain/io/csv.hpp"
#include "topochain/random.hpp"
#include "topochain/version.hpp"

namespace topochain::io {

// FNV-1a, 64 bit. Content fingerprint for reproducibility checks, not a
// cryptographic hash.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string digest_hex(const std::string& bytes) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

/// Record of one run: the resolved configuration, the RNG identity, and a
/// digest per emitted file. Re-running the same manifest inputs must
/// reproduce the csv/json digests byte for byte.
struct RunManifest {
  nlohmann::json config_echo;
  std::uint64_t seed = 0;
  std::string generator = GaussianSampler::generator_id();
  std::string code_version = kVersion;
  double duration_seconds = 0.0;

  struct FileRecord {
    std::string name;
    std::uint64_t bytes = 0;
    std::string digest;
  };
  std::vector<FileRecord> files;
  std::vector<std::string> warnings;

  void record_file(const std::string& name, const std::string& content) {
    files.push_back({name, content.size(), digest_hex(content)});
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["config"] = config_echo;
    j["seed"] = seed;
    j["generator"] = generator;
    j["code_version"] = code_version;
    j["duration_seconds"] = duration_seconds;
    j["files"] = nlohmann::json::array();
    for (const auto& f : files)
      j["files"].push_back({{"name", f.name}, {"bytes", f.bytes}, {"digest", f.digest}});
    j["warnings"] = warnings;
    return j;
  }
};

inline void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  write_file_atomic(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
}

}  // namespace topochain::io

#endif
