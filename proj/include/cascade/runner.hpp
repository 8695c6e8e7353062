#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cascade/scenario.hpp"

namespace cascade {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  unsigned jobs = 1;
  std::string scenario_name;  ///< recorded in the manifest
};

struct RunManifest {
  nlohmann::json json;
  std::vector<std::filesystem::path> outputs;  ///< CSV files, then the manifest itself
};

/// Executes the scenario, writes one CSV per output trace plus
/// `<prefix>_manifest.json` into out_dir. CSV content depends only on the
/// scenario (not on jobs or timing). Failures are rethrown with the kind and
/// parameter point prefixed to the message, preserving the exception type.
RunManifest run(const Scenario& scenario, const RunOptions& options);

}  // namespace cascade
