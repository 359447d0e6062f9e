#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace cortexenc::cli {

// Output directory plus the bookkeeping behind the stage manifest: every file
// read through read_input and written through write_output is recorded with
// its size and content hash.
class Workspace {
 public:
  Workspace(const RunConfig& config, std::filesystem::path out_dir, std::string subcommand);

  const RunConfig& config() const { return config_; }
  const std::filesystem::path& out_dir() const { return out_dir_; }

  std::filesystem::path resolve(std::string_view configured) const;

  // Resolves a path whose file name may contain '*' wildcards. Matches are
  // sorted; no match is an error.
  std::vector<std::filesystem::path> expand(std::string_view configured) const;

  std::string read_input(const std::filesystem::path& path);

  // Atomic write of out_dir / relative.
  void write_output(const std::filesystem::path& relative, std::string_view bytes);

  std::size_t output_count() const { return outputs_.size(); }

  void write_manifest(double wall_seconds, int threads);

 private:
  struct FileRecord {
    std::uintmax_t bytes = 0;
    std::string hash;
  };

  std::string display(const std::filesystem::path& path) const;

  const RunConfig& config_;
  std::filesystem::path out_dir_;
  std::string subcommand_;
  std::map<std::string, FileRecord> inputs_;
  std::map<std::string, FileRecord> outputs_;
};

}  // namespace cortexenc::cli
