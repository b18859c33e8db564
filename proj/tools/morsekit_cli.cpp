// morsekit command line.  Talks to the shared library exclusively through
// the C surface in morsekit.h; exit codes are part of the contract:
//   0 ok/certified        4 power search budget exhausted
//   1 error               5 recognition stages exhausted
//   2 rejected            6 enumeration over the resource cap
//   3 non-generic pair    7 calibration missing/contradictory

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "morsekit.h"

namespace {

struct Owned {
  char* s = nullptr;
  ~Owned() { mk_string_free(s); }
};

int fail(const Owned& err, mk_status st) {
  if (err.s) std::fprintf(stderr, "error: %s\n", err.s);
  return static_cast<int>(st);
}

void write_file(const std::string& path, const char* text) {
  if (!text) return;
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct Ctx {
  mk_context* ptr = nullptr;
  ~Ctx() { mk_context_destroy(ptr); }
};

int make_context(const std::string& config, const std::string& calibration,
                 Ctx& ctx) {
  Owned err;
  mk_status st;
  if (!config.empty()) {
    st = mk_context_create(config.c_str(), &err.s, &ctx.ptr);
  } else {
    const int32_t pattern[2] = {1, 2};
    st = mk_context_create_default(3, pattern, 2, &err.s, &ctx.ptr);
  }
  if (st != MK_OK) return fail(err, st);
  if (!calibration.empty()) {
    Owned err2;
    st = mk_context_load_calibration(ctx.ptr, calibration.c_str(), &err2.s);
    if (st != MK_OK) return fail(err2, st);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"morsekit: Morse quasigeodesic and group action certification"};
  app.set_version_flag("--version", mk_version());

  std::string config, calibration, out_dir = ".";
  std::uint64_t seed = 1;
  app.add_option("--config", config, "JSON/TOML config file");
  app.add_option("--calibration", calibration,
                 "calibration TOML (overrides the config's table)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized subroutines");

  // certify-path / certify-local
  std::string path_file, datum_json;
  int local_scale = 0;
  bool promote = false;
  auto* certify = app.add_subcommand("certify-path", "certify a sampled path");
  certify->add_option("path", path_file, "path JSON file")->required();
  certify->add_option("--datum", datum_json, "Morse datum JSON (inline)");
  certify->add_flag("--promote", promote, "apply local-to-global promotion");

  auto* certify_local =
      app.add_subcommand("certify-local", "windowed local Morse check");
  std::string local_path_file, local_datum_json;
  int local_S = 6;
  certify_local->add_option("path", local_path_file, "path JSON file")->required();
  certify_local->add_option("--datum", local_datum_json, "Morse datum JSON");
  certify_local->add_option("--scale", local_S, "window length S");

  // schottky
  std::string gens_file;
  int budget = 64, word_len = 8;
  bool independent = false;
  auto* schottky = app.add_subcommand("schottky", "certify a generator pair");
  schottky->add_option("generators", gens_file, "generators JSON file")->required();
  schottky->add_option("--budget", budget, "max power for the search");
  schottky->add_option("--word-length", word_len, "verification word length");
  schottky->add_flag("--independent", independent, "search m and n separately");

  // recognize
  std::string rep_file;
  int stage_max = 10;
  long long max_paths = 2000000;
  auto* recognize = app.add_subcommand("recognize", "stagewise recognition");
  recognize->add_option("representation", rep_file, "representation JSON file")
      ->required();
  recognize->add_option("--stage-max", stage_max, "stage budget");
  recognize->add_option("--budget", max_paths, "per-stage path cap");

  // calibrate
  int cal_stage_max = 6;
  auto* cal_cmd = app.add_subcommand("calibrate", "fit the threshold tables");
  cal_cmd->add_option("--stage-max", cal_stage_max, "stages to fit");

  // replay
  std::string cert_file;
  auto* replay = app.add_subcommand("replay", "re-verify a certificate file");
  replay->add_option("certificate", cert_file, "certificate JSON file")->required();

  app.require_subcommand(1);
  CLI11_PARSE(app, argc, argv);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);

  const bool needs_calibration = !cal_cmd->parsed();
  Ctx ctx;
  if (int rc = make_context(config, calibration, ctx)) return rc;

  if (cal_cmd->parsed()) {
    Owned err;
    const std::string out_path = out_dir + "/calibration.toml";
    const mk_status st =
        mk_calibrate(ctx.ptr, cal_stage_max, seed, out_path.c_str(), &err.s);
    if (st != MK_OK) return fail(err, st);
    std::printf("calibration written to %s\n", out_path.c_str());
    return 0;
  }
  (void)needs_calibration;

  if (certify->parsed() || certify_local->parsed()) {
    const bool local = certify_local->parsed();
    Owned res, err;
    const mk_status st = mk_certify_path(
        ctx.ptr, (local ? local_path_file : path_file).c_str(),
        (local ? local_datum_json : datum_json).c_str(),
        local ? local_S : 0, (!local && promote) ? 1 : 0, &res.s, &err.s);
    if (res.s) {
      write_file(out_dir + "/certificate.json", res.s);
      std::printf("%s", res.s);
    }
    if (st != MK_OK) return fail(err, st);
    return 0;
  }

  if (schottky->parsed()) {
    Owned res, csv, err;
    const mk_status st =
        mk_schottky(ctx.ptr, gens_file.c_str(), budget, word_len,
                    independent ? 1 : 0, &res.s, &csv.s, &err.s);
    if (res.s) {
      write_file(out_dir + "/schottky_certificate.json", res.s);
      std::printf("%s", res.s);
    }
    if (csv.s) write_file(out_dir + "/schottky_sweep.csv", csv.s);
    if (st != MK_OK) return fail(err, st);
    return 0;
  }

  if (recognize->parsed()) {
    Owned res, err;
    const mk_status st = mk_recognize(ctx.ptr, rep_file.c_str(), stage_max,
                                      max_paths, &res.s, &err.s);
    if (res.s) {
      write_file(out_dir + "/recognition.json", res.s);
      std::printf("%s", res.s);
    }
    if (st != MK_OK) return fail(err, st);
    return 0;
  }

  if (replay->parsed()) {
    Owned res, err;
    const mk_status st = mk_replay(ctx.ptr, cert_file.c_str(), &res.s, &err.s);
    if (res.s) std::printf("%s", res.s);
    if (st != MK_OK) return fail(err, st);
    return 0;
  }
  return 1;
}
