#pragma once

// Command-level flows shared by the C API and the CLI: each one consumes
// parsed JSON, runs the underlying checks, and produces a self-contained
// result document (inputs embedded so `replay` can re-run it) plus optional
// CSV diagnostics.

#include "core/jsonio.hpp"

namespace morsekit {

enum class PipeStatus {
  ok = 0,
  error = 1,
  rejected = 2,
  nongeneric = 3,
  budget_exhausted = 4,
  stages_exhausted = 5,
  resource = 6,
  calibration = 7,
};

struct PipeResult {
  PipeStatus status = PipeStatus::ok;
  Json document;      // wrapper: {command, model, input, certificate/outcome}
  std::string csv;    // margins / sweep diagnostics, empty if none
  std::string message;
};

Json model_to_json(const ModelConfig& m);
ModelConfig model_from_json(const Json& j);

// datum_spec: {"theta": {...}, "D", "L", "A", optional "theta_prime"}; null
// selects the stage-2 default.
PipeResult run_certify_path(const ModelConfig& model, const Calibration& cal,
                            const Json& path_json, const Json& datum_spec,
                            int local_scale, bool promote);

struct SchottkyOptions {
  int budget = 64;
  int max_word_length = 8;
  bool independent = false;
  int stage_window = 2;   // stage index of the Θ window used by the tests
  int pilot_length = 4;   // word length for the (L, A) pilot fit
  int threads = 0;
};

PipeResult run_schottky(const ModelConfig& model, const Calibration& cal,
                        const Isometry& alpha, const Isometry& beta,
                        const SchottkyOptions& opt);

PipeResult run_recognize(const ModelConfig& model, const Calibration& cal,
                         const Representation& rep, int budget_stages,
                         long max_paths, int threads);

PipeResult run_replay(const Calibration& cal, const Json& wrapper);

// exception -> status mapping used by every surface
PipeStatus classify_error(const std::exception& e);

}  // namespace morsekit
