#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "cortexenc/error.hpp"
#include "run.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kRunError = 1;

}  // namespace

int main(int argc, char** argv) {
  using cortexenc::cli::Invocation;

  CLI::App app{"cortexenc: word representations and brain encoding models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cortexenc 0.1.0");

  Invocation inv;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir;
  for (const auto& name : cortexenc::cli::subcommands()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " stage");
    sub->add_option("--config", inv.config_path, "run config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides out_dir)");
    sub->add_option("--threads", threads, "worker threads (default: CORTEXENC_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "override the config seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    std::cerr << cortexenc::cli::error_json("usage", e.what(), sub ? sub->get_name() : "") << "\n";
    return kUsageError;
  }

  auto* sub = app.get_subcommands().front();
  inv.subcommand = sub->get_name();
  if (sub->count("--out")) inv.out_dir = out_dir;
  if (sub->count("--threads")) inv.threads = threads;
  if (sub->count("--seed")) inv.seed = seed;

  try {
    const auto summary = cortexenc::cli::run(inv);
    std::printf("%s: %zu outputs in %s (config %s, %d threads, %.2f s)\n", inv.subcommand.c_str(),
                summary.outputs, summary.out_dir.c_str(), summary.config_hash.c_str(), summary.threads,
                summary.wall_seconds);
    return 0;
  } catch (const cortexenc::Error& e) {
    std::cerr << cortexenc::cli::error_json(cortexenc::to_string(e.kind()), e.what(), inv.subcommand,
                                            e.byte_offset())
              << "\n";
    return e.kind() == cortexenc::ErrorKind::schema || e.kind() == cortexenc::ErrorKind::invalid_argument
               ? kUsageError
               : kRunError;
  } catch (const std::exception& e) {
    std::cerr << cortexenc::cli::error_json("internal", e.what(), inv.subcommand) << "\n";
    return kRunError;
  }
}
