#include "run.hpp"

#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "cortexenc/error.hpp"
#include "cortexenc/parallel.hpp"
#include "stages.hpp"

namespace cortexenc::cli {

namespace {

using Stage = void (*)(Workspace&);

const std::map<std::string, Stage>& stage_table() {
  static const std::map<std::string, Stage> table = {
      {"build-cooc", run_build_cooc}, {"build-lsm", run_build_lsm}, {"build-ntm", run_build_ntm},
      {"build-ebm", run_build_ebm},   {"import-emb", run_import_emb}, {"align", run_align},
      {"encode", run_encode},         {"compare", run_compare},     {"label-map", run_label_map},
      {"synth", run_synth},           {"report", run_report},
  };
  return table;
}

int resolve_threads(std::optional<int> requested) {
  if (requested) {
    require(*requested >= 1, ErrorKind::invalid_argument, "--threads must be >= 1");
    return *requested;
  }
  if (const char* env = std::getenv("CORTEXENC_THREADS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    require(end && *end == '\0' && n >= 1 && n <= 4096, ErrorKind::invalid_argument,
            std::string("CORTEXENC_THREADS must be a positive integer, got '") + env + "'");
    return static_cast<int>(n);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"build-cooc", "build-lsm", "build-ntm", "build-ebm",
                                                 "import-emb", "align",     "encode",    "compare",
                                                 "label-map",  "synth",     "report"};
  return names;
}

RunSummary run(const Invocation& inv) {
  const auto start = std::chrono::steady_clock::now();
  const auto it = stage_table().find(inv.subcommand);
  require(it != stage_table().end(), ErrorKind::invalid_argument, "unknown subcommand '" + inv.subcommand + "'");

  const auto config = load_config(inv.config_path, inv.seed);
  const std::filesystem::path out =
      inv.out_dir ? std::filesystem::absolute(*inv.out_dir)
                  : (std::filesystem::path(config.out_dir).is_absolute() ? std::filesystem::path(config.out_dir)
                                                                         : config.config_dir / config.out_dir);
  const int threads = resolve_threads(inv.threads);
  set_thread_count(threads);

  Workspace ws(config, out.lexically_normal(), inv.subcommand);
  it->second(ws);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ws.write_manifest(wall, threads);
  return {config.config_hash, ws.out_dir().string(), ws.output_count(), wall, threads};
}

std::string error_json(std::string_view kind, std::string_view message, std::string_view subcommand,
                       std::optional<std::size_t> byte_offset) {
  nlohmann::ordered_json err;
  err["kind"] = kind;
  err["message"] = message;
  err["subcommand"] = subcommand;
  if (byte_offset) err["byte_offset"] = *byte_offset;
  nlohmann::ordered_json j;
  j["error"] = err;
  return j.dump();
}

}  // namespace cortexenc::cli
