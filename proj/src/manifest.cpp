#include "decigibbs/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace decigibbs {

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["params"] = m.params;
  j["seed"] = m.seed;
  j["outputs"] = m.outputs;
  j["wall_seconds"] = m.wall_seconds;
  j["threads"] = m.threads;
  j["version"] = m.version;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest");
  out << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open manifest: " + file.string());
  nlohmann::json j;
  in >> j;
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.params = j.at("params").get<std::map<std::string, std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.wall_seconds = j.value("wall_seconds", 0.0);
  m.threads = j.value("threads", 1);
  m.version = j.value("version", "");
  return m;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void prepare_run_dir(const std::filesystem::path& dir, bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir))
      throw std::runtime_error(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir) && !force)
      throw std::runtime_error(dir.string() +
                               " is not empty; pass --force to overwrite");
  }
  fs::create_directories(dir);
}

bool files_identical(const std::filesystem::path& a,
                     const std::filesystem::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::string ca((std::istreambuf_iterator<char>(fa)),
                 std::istreambuf_iterator<char>());
  std::string cb((std::istreambuf_iterator<char>(fb)),
                 std::istreambuf_iterator<char>());
  return ca == cb;
}

}  // namespace decigibbs
