#include "run_cache.hpp"

#include "digest.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

namespace rellich::cli {

std::string artifact_version() { return std::string("rellich ") + RELLICH_VERSION; }

std::string params_digest(const std::string& command, const Json& inputs) {
  Json j;
  j["artifact_version"] = artifact_version();
  j["command"] = command;
  j["inputs"] = inputs;
  return sha256_hex(to_json_text(j, -1));
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("RELLICH_CACHE"); env && *env) return env;
  return "cache";
}

std::optional<RunRecord> RunCache::load(const std::string& digest) const {
  const auto path = path_for(digest);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  RunRecord r;
  try {
    const auto j = Json::parse(buf.str());
    r.command = j.at("command").get<std::string>();
    r.params_digest = j.at("params_digest").get<std::string>();
    r.outputs = j.at("outputs").get<std::string>();
    r.output_sha256 = j.at("output_sha256").get<std::string>();
    r.created_utc = j.at("created_utc").get<std::string>();
    r.artifact_version = j.at("artifact_version").get<std::string>();
  } catch (const std::exception& e) {
    throw CacheCorruption("unreadable cache record " + path.string() + ": " + e.what());
  }
  if (r.params_digest != digest)
    throw CacheCorruption("cache record " + path.string() + " carries a different params digest");
  if (sha256_hex(r.outputs) != r.output_sha256)
    throw CacheCorruption("cache record " + path.string() + " fails its content hash");
  return r;
}

void RunCache::store(const std::string& command, const std::string& digest, const std::string& outputs) const {
  std::filesystem::create_directories(dir_);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);

  Json j;
  j["artifact_version"] = artifact_version();
  j["command"] = command;
  j["params_digest"] = digest;
  j["created_utc"] = stamp;
  j["output_sha256"] = sha256_hex(outputs);
  j["outputs"] = outputs;

  const auto final_path = path_for(digest);
  std::ostringstream tid;
  tid << std::this_thread::get_id();
  const auto tmp = dir_ / (digest + ".tmp." + tid.str());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache file " + tmp.string());
    out << to_json_text(j) << '\n';
  }
  std::filesystem::rename(tmp, final_path);
}

}  // namespace rellich::cli
