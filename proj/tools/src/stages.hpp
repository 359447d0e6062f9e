#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cortexenc/align.hpp"
#include "cortexenc/embedding.hpp"
#include "cortexenc/encode.hpp"
#include "workspace.hpp"

namespace cortexenc::cli {

void run_synth(Workspace& ws);
void run_build_cooc(Workspace& ws);
void run_build_lsm(Workspace& ws);
void run_build_ntm(Workspace& ws);
void run_build_ebm(Workspace& ws);
void run_import_emb(Workspace& ws);
void run_align(Workspace& ws);
void run_encode(Workspace& ws);
void run_compare(Workspace& ws);
void run_label_map(Workspace& ws);
void run_report(Workspace& ws);

// Shared helpers.

// "NAME" or "NAME_L<layer>".
std::string model_tag(const std::string& model, std::optional<int> layer);

// Every matrix in each listed file: ".embl" files are per-layer tables,
// anything else is text-vec. The model name is the file stem.
std::vector<reprs::EmbeddingMatrix> load_models(Workspace& ws, const std::vector<std::string>& paths);

corpus::Corpus load_corpus(Workspace& ws);

// All EncodingResult files under the configured results directory,
// grouped by model name.
std::map<std::string, std::vector<encode::EncodingResult>> load_results(Workspace& ws);

// Subject results for one model, reduced to a single layer for layered
// models: the layer with the best subject-averaged mean r.
struct ModelResults {
  std::string model;
  std::optional<int> layer;
  std::vector<encode::EncodingResult> subjects;
};

ModelResults select_layer(const std::string& model, const std::vector<encode::EncodingResult>& all);

}  // namespace cortexenc::cli
