#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "saea/types.hpp"

namespace saea {

/// One expensive evaluation. iteration 0 covers the initial design and any
/// probing; model-based iterations count from 1.
struct LogEntry {
  std::size_t iteration = 0;
  std::size_t fe_index = 0;
  DecisionVector x;
  ObjectiveVector f;
};

using ConfigSnapshot = std::vector<std::pair<std::string, std::string>>;

/// Everything one replication produced. wall_time is kept out of the record
/// file (it goes to a ".time" sidecar) so identical runs give identical files.
struct RunRecord {
  std::string problem;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  ConfigSnapshot config;
  std::vector<LogEntry> log;
  std::vector<std::size_t> archive;  // fe_index values of the final non-dominated set
  std::optional<double> igd;
  std::string status = "ok";  // "ok" or "aborted"
  std::string diagnostic;
  double wall_time = 0.0;

  std::vector<ObjectiveVector> archive_objectives() const;
};

/// Scientific notation with six significant digits.
std::string format_number(double v);

std::string serialize(const RunRecord& record);
RunRecord parse_record(const std::string& text);

/// Write-then-rename; also writes "<path>.time" with the wall time.
void write_record(const RunRecord& record, const std::filesystem::path& path);
RunRecord read_record(const std::filesystem::path& path);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace saea
