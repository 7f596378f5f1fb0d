#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace decigibbs {

// Everything needed to replay a run byte-identically.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;  // file names relative to the run dir
  double wall_seconds = 0.0;
  int threads = 1;
  std::string version;
};

void write_manifest(const std::filesystem::path& dir, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& file);

// Full round-trip decimal formatting, locale-free.
std::string format_double(double v);

// Creates the run directory; refuses to reuse a non-empty one unless forced.
void prepare_run_dir(const std::filesystem::path& dir, bool force);

bool files_identical(const std::filesystem::path& a,
                     const std::filesystem::path& b);

}  // namespace decigibbs
