#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lfvs {

// Reproducibility record written next to every command's outputs. Holds the
// resolved configuration (after CLI flag > config file > default precedence)
// so a run can be repeated exactly.
struct RunManifest {
  std::string command;
  std::string config_path;
  uint64_t seed = 0;
  std::vector<std::string> checkpoints;
  std::string output_dir;
  std::string tool_version;
  std::map<std::string, std::string> resolved;

  void write(const std::filesystem::path& path) const;
  static RunManifest read(const std::filesystem::path& path);
};

}  // namespace lfvs
