#pragma once

#include "json_text.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace rellich::cli {

class CacheCorruption : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One cached computation.  `outputs` is the exact payload text; the record's
/// timestamp lives here and never in the payload.
struct RunRecord {
  std::string command;
  std::string params_digest;
  std::string outputs;
  std::string output_sha256;
  std::string created_utc;
  std::string artifact_version;
};

std::string artifact_version();

/// Digest of a command's full input description (parameters, grid, solver budget).
std::string params_digest(const std::string& command, const Json& inputs);

class RunCache {
 public:
  explicit RunCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& directory() const { return dir_; }

  /// The record for `digest`, re-validated against its stored content hash.
  /// Throws CacheCorruption when the file exists but does not validate.
  std::optional<RunRecord> load(const std::string& digest) const;

  /// Writes atomically (temporary file plus rename).
  void store(const std::string& command, const std::string& digest, const std::string& outputs) const;

 private:
  std::filesystem::path path_for(const std::string& digest) const { return dir_ / (digest + ".json"); }
  std::filesystem::path dir_;
};

/// Default cache directory: $RELLICH_CACHE or ./cache.
std::filesystem::path default_cache_dir();

}  // namespace rellich::cli
