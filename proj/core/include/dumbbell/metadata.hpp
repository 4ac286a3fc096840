#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dumbbell/layout.hpp"
#include "dumbbell/run_params.hpp"

namespace dumbbell {

inline constexpr int kMetadataFormatVersion = 1;
inline constexpr const char* kMetadataFileName = "metadata.json";

/// Everything needed to rerun an experiment: run parameters with the seed
/// actually used, and the defaulted flow groups in start order.
struct Metadata {
  int format_version = kMetadataFormatVersion;
  RunParams params;
  std::vector<FlowGroup> groups;

  friend bool operator==(const Metadata&, const Metadata&) = default;
};

/// Seed to use when none was given on the command line: the current UNIX time.
std::uint64_t resolve_seed(std::optional<std::uint64_t> requested);

std::string metadata_to_json(const Metadata& m);
Metadata metadata_from_json(const std::string& text);

/// Writes `<params.output_dir>/metadata.json` and returns what was written.
Metadata save_metadata(const RunParams& params, const std::vector<FlowGroup>& groups);
Metadata load_metadata(const std::filesystem::path& path);

}  // namespace dumbbell
