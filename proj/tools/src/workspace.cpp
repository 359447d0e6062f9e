#include "workspace.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "cortexenc/binary_io.hpp"
#include "cortexenc/error.hpp"

namespace cortexenc::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kOutPrefix = "$OUT";

bool wildcard_match(std::string_view pattern, std::string_view name) {
  const auto star = pattern.find('*');
  if (star == std::string_view::npos) return pattern == name;
  const auto head = pattern.substr(0, star);
  if (name.substr(0, head.size()) != head) return false;
  const auto rest = pattern.substr(star + 1);
  for (std::size_t i = head.size(); i <= name.size(); ++i) {
    if (wildcard_match(rest, name.substr(i))) return true;
  }
  return false;
}

}  // namespace

Workspace::Workspace(const RunConfig& config, fs::path out_dir, std::string subcommand)
    : config_(config), out_dir_(std::move(out_dir)), subcommand_(std::move(subcommand)) {
  std::error_code ec;
  fs::create_directories(out_dir_, ec);
  require(!ec, ErrorKind::io, "cannot create output directory " + out_dir_.string() + ": " + ec.message());
}

fs::path Workspace::resolve(std::string_view configured) const {
  require(!configured.empty(), ErrorKind::invalid_argument, "empty path in config");
  if (configured.substr(0, kOutPrefix.size()) == kOutPrefix) {
    auto rest = configured.substr(kOutPrefix.size());
    while (!rest.empty() && (rest.front() == '/' || rest.front() == '\\')) rest.remove_prefix(1);
    return out_dir_ / fs::path(rest);
  }
  const fs::path p(configured);
  return p.is_absolute() ? p : config_.config_dir / p;
}

std::vector<fs::path> Workspace::expand(std::string_view configured) const {
  const auto path = resolve(configured);
  const auto pattern = path.filename().string();
  if (pattern.find('*') == std::string::npos) return {path};
  std::vector<fs::path> matches;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(path.parent_path(), ec)) {
    if (entry.is_regular_file() && wildcard_match(pattern, entry.path().filename().string())) {
      matches.push_back(entry.path());
    }
  }
  require(!ec, ErrorKind::io, "cannot list " + path.parent_path().string() + ": " + ec.message());
  require(!matches.empty(), ErrorKind::io, "no files match " + path.string());
  std::sort(matches.begin(), matches.end());
  return matches;
}

std::string Workspace::display(const fs::path& path) const {
  const auto rel = path.lexically_normal().lexically_relative(out_dir_.lexically_normal());
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return path.lexically_normal().generic_string();
}

std::string Workspace::read_input(const fs::path& path) {
  auto bytes = io::read_file(path);
  inputs_[display(path)] = {bytes.size(), hex64(fnv1a64(bytes))};
  return bytes;
}

void Workspace::write_output(const fs::path& relative, std::string_view bytes) {
  const auto path = out_dir_ / relative;
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  require(!ec, ErrorKind::io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  io::write_file_atomic(path, bytes);
  outputs_[display(path)] = {bytes.size(), hex64(fnv1a64(bytes))};
}

void Workspace::write_manifest(double wall_seconds, int threads) {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand_;
  j["config_hash"] = config_.config_hash;
  j["seed"] = config_.seed;
  j["threads"] = threads;
  j["wall_seconds"] = wall_seconds;
  auto files = [](const std::map<std::string, FileRecord>& records) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [path, rec] : records) {
      arr.push_back({{"path", path}, {"bytes", rec.bytes}, {"fnv1a64", rec.hash}});
    }
    return arr;
  };
  j["inputs"] = files(inputs_);
  j["outputs"] = files(outputs_);
  std::error_code ec;
  fs::create_directories(out_dir_ / "manifests", ec);
  require(!ec, ErrorKind::io, "cannot create manifest directory: " + ec.message());
  io::write_file_atomic(out_dir_ / "manifests" / (subcommand_ + ".json"), j.dump(1) + "\n");
}

}  // namespace cortexenc::cli
