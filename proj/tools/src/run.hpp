#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cortexenc::cli {

const std::vector<std::string>& subcommands();

struct Invocation {
  std::string subcommand;
  std::string config_path;
  std::optional<std::string> out_dir;   // overrides the config's out_dir
  std::optional<int> threads;           // falls back to CORTEXENC_THREADS, then hardware
  std::optional<std::uint64_t> seed;    // overrides the config's seed (and its hash)
};

struct RunSummary {
  std::string config_hash;
  std::string out_dir;
  std::size_t outputs = 0;
  double wall_seconds = 0.0;
  int threads = 1;
};

// Loads and validates the config, runs one stage and writes its manifest.
// Throws cortexenc::Error on any failure.
RunSummary run(const Invocation& inv);

// {"error": {"kind": ..., "message": ..., "subcommand": ..., "byte_offset": ...}}
std::string error_json(std::string_view kind, std::string_view message, std::string_view subcommand,
                       std::optional<std::size_t> byte_offset = std::nullopt);

}  // namespace cortexenc::cli
