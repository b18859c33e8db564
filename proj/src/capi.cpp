// Implementation of the C surface declared in include/morsekit.h.

#include "morsekit.h"

#include <cstring>
#include <new>
#include <string>

#include "core/calibration.hpp"
#include "core/pipeline.hpp"

using namespace morsekit;

struct mk_context {
  ModelConfig model;
  Calibration calibration;
  bool has_calibration = false;
  std::uint64_t seed = 1;
  Json config;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_error(char** error, const std::string& msg) {
  if (error) *error = dup_string(msg);
}

mk_status from_pipe(PipeStatus s) {
  switch (s) {
    case PipeStatus::ok: return MK_OK;
    case PipeStatus::rejected: return MK_REJECTED;
    case PipeStatus::nongeneric: return MK_NONGENERIC;
    case PipeStatus::budget_exhausted: return MK_BUDGET_EXHAUSTED;
    case PipeStatus::stages_exhausted: return MK_STAGES_EXHAUSTED;
    case PipeStatus::resource: return MK_RESOURCE;
    case PipeStatus::calibration: return MK_CALIBRATION;
    default: return MK_ERROR;
  }
}

mk_status map_exception(const std::exception& e, char** error) {
  set_error(error, e.what());
  return from_pipe(classify_error(e));
}

const Calibration& need_calibration(const mk_context* ctx) {
  if (!ctx->has_calibration)
    throw CalibrationMissing("context has no calibration table loaded");
  return ctx->calibration;
}

}  // namespace

extern "C" {

const char* mk_version(void) { return "morsekit 1.0.0"; }

mk_status mk_context_create(const char* config_path, char** error,
                            mk_context** out) {
  if (!out || !config_path) {
    set_error(error, "null argument");
    return MK_ERROR;
  }
  try {
    auto ctx = new mk_context();
    const RunConfig cfg = RunConfig::load(config_path);
    ctx->model = cfg.model;
    ctx->seed = cfg.seed;
    ctx->config = cfg.extra;
    if (!cfg.calibration_path.empty()) {
      ctx->calibration = Calibration::load(cfg.calibration_path);
      ctx->has_calibration = true;
    }
    *out = ctx;
    return MK_OK;
  } catch (const std::exception& e) {
    return map_exception(e, error);
  }
}

mk_status mk_context_create_default(int32_t n, const int32_t* pattern,
                                    int32_t pattern_len, char** error,
                                    mk_context** out) {
  if (!out || !pattern || pattern_len < 1) {
    set_error(error, "null argument");
    return MK_ERROR;
  }
  try {
    std::vector<int> pat(pattern, pattern + pattern_len);
    auto ctx = new mk_context();
    ctx->model = ModelConfig::standard(n, pat);
    *out = ctx;
    return MK_OK;
  } catch (const std::exception& e) {
    return map_exception(e, error);
  }
}

void mk_context_destroy(mk_context* ctx) { delete ctx; }

mk_status mk_context_load_calibration(mk_context* ctx, const char* path,
                                      char** error) {
  if (!ctx || !path) {
    set_error(error, "null argument");
    return MK_ERROR;
  }
  try {
    ctx->calibration = Calibration::load(path);
    ctx->has_calibration = true;
    return MK_OK;
  } catch (const std::exception& e) {
    return map_exception(e, error);
  }
}

mk_status mk_calibrate(mk_context* ctx, int32_t stage_max, uint64_t seed,
                       const char* out_path, char** error) {
  if (!ctx || !out_path) {
    set_error(error, "null argument");
    return MK_ERROR;
  }
  try {
    CalibrateOptions opt;
    if (stage_max > 0) opt.stage_max = stage_max;
    opt.seed = seed ? seed : ctx->seed;
    ctx->calibration = calibrate(ctx->model, opt);
    ctx->has_calibration = true;
    ctx->calibration.save(out_path);
    return MK_OK;
  } catch (const std::exception& e) {
    return map_exception(e, error);
  }
}

mk_status mk_certify_path(mk_context* ctx, const char* path_file,
                          const char* datum_json, int32_t local_scale,
                          int32_t promote, char** result, char** error) {
  if (!ctx || !path_file) {
    set_error(error, "null argument");
    return MK_ERROR;
  }
  try {
    const Json path_doc = parse_json_file(path_file);
    const Json datum_spec =
        datum_json && *datum_json ? Json::parse(datum_json) : Json();
    const PipeResult res =
        run_certify_path(ctx->model, need_calibration(ctx), path_doc,
                         datum_spec, local_scale, promote != 0);
    if (result) *result = dup_string(canonical_dump(res.document, 2));
    if (res.status != PipeStatus::ok && !res.message.empty())
      set_error(error, res.message);
    return from_pipe(res.status);
  } catch (const std::exception& e) {
    return map_exception(e, error);
  }
}

mk_status mk_schottky(mk_context* ctx, const char* generators_file,
                      int32_t budget, int32_t max_word_length,
                      int32_t independent_powers, char** result,
                      char** sweep_csv, char** error) {
  if (!ctx || !generators_file) {
    set_error(error, "null argument");
    return MK_ERROR;
  }
  try {
    const Json gens = parse_json_file(generators_file);
    SchottkyOptions opt;
    if (budget > 0) opt.budget = budget;
    if (max_word_length > 0) opt.max_word_length = max_word_length;
    opt.independent = independent_powers != 0;
    if (ctx->config.contains("schottky")) {
      const Json& block = ctx->config.at("schottky");
      if (block.contains("stage_window"))
        opt.stage_window = block.at("stage_window").get<int>();
      if (block.contains("pilot_length"))
        opt.pilot_length = block.at("pilot_length").get<int>();
    }
    const PipeResult res = run_schottky(
        ctx->model, need_calibration(ctx),
        isometry_from_json(gens.at("alpha"), ctx->model.tol),
        isometry_from_json(gens.at("beta"), ctx->model.tol), opt);
    if (result) *result = dup_string(canonical_dump(res.document, 2));
    if (sweep_csv) *sweep_csv = dup_string(res.csv);
    if (res.status != PipeStatus::ok && !res.message.empty())
      set_error(error, res.message);
    return from_pipe(res.status);
  } catch (const std::exception& e) {
    return map_exception(e, error);
  }
}

mk_status mk_recognize(mk_context* ctx, const char* representation_file,
                       int32_t budget_stages, int64_t max_paths, char** result,
                       char** error) {
  if (!ctx || !representation_file) {
    set_error(error, "null argument");
    return MK_ERROR;
  }
  try {
    const Json rep_doc = parse_json_file(representation_file);
    const Representation rep =
        representation_from_json(rep_doc, ctx->model.tol);
    const PipeResult res = run_recognize(
        ctx->model, need_calibration(ctx), rep,
        budget_stages > 0 ? budget_stages : 10,
        max_paths > 0 ? static_cast<long>(max_paths) : 2000000, 0);
    if (result) *result = dup_string(canonical_dump(res.document, 2));
    if (res.status != PipeStatus::ok && !res.message.empty())
      set_error(error, res.message);
    return from_pipe(res.status);
  } catch (const std::exception& e) {
    return map_exception(e, error);
  }
}

mk_status mk_replay(mk_context* ctx, const char* certificate_file,
                    char** result, char** error) {
  if (!ctx || !certificate_file) {
    set_error(error, "null argument");
    return MK_ERROR;
  }
  try {
    const Json wrapper = parse_json_file(certificate_file);
    const PipeResult res = run_replay(need_calibration(ctx), wrapper);
    if (result) *result = dup_string(canonical_dump(res.document, 2));
    if (res.status != PipeStatus::ok && !res.message.empty())
      set_error(error, res.message);
    return from_pipe(res.status);
  } catch (const std::exception& e) {
    return map_exception(e, error);
  }
}

void mk_string_free(char* s) { delete[] s; }

}  // extern "C"
