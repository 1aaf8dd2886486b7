#include "lfvs/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "lfvs/common.hpp"

namespace lfvs {

using json = nlohmann::json;

void RunManifest::write(const std::filesystem::path& path) const {
  json j{{"command", command},
         {"config_path", config_path},
         {"seed", seed},
         {"checkpoints", checkpoints},
         {"output_dir", output_dir},
         {"tool_version", tool_version},
         {"resolved", resolved}};
  std::ofstream out(path);
  require_data(bool(out), "cannot write manifest: " + path.string());
  out << j.dump(2) << "\n";
}

RunManifest RunManifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  require_data(bool(in), "cannot read manifest: " + path.string());
  json j = json::parse(in, nullptr, false);
  require_data(!j.is_discarded(), "corrupt manifest: " + path.string());
  RunManifest m;
  m.command = j.value("command", "");
  m.config_path = j.value("config_path", "");
  m.seed = j.value("seed", uint64_t(0));
  m.checkpoints = j.value("checkpoints", std::vector<std::string>{});
  m.output_dir = j.value("output_dir", "");
  m.tool_version = j.value("tool_version", "");
  m.resolved = j.value("resolved", std::map<std::string, std::string>{});
  return m;
}

}  // namespace lfvs
