#pragma once

// Empirical calibration tables.  The straightness and local-to-global
// theorems guarantee existence of thresholds (ε, l, s, S, ...) without
// giving values; this module realizes them as tables fitted on synthetic
// families (flat geodesics, controlled-turn sequences, axial orbit paths)
// and stores them in a versioned TOML file.  Certificates embed the table
// id so every verdict names the thresholds it used.

#include <optional>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/spd.hpp"

namespace morsekit {

// Thresholds for the straight-sequence Morse lemma at closeness target
// delta: sequences that are (theta, eps)-straight and ell-spaced stay within
// delta of the parallel set of their end flags, with projections moving
// through nested theta_prime cones and global spacing slope >= spacing_c.
struct StraightnessEntry {
  std::vector<double> theta;        // window bounds (pattern order)
  std::vector<double> theta_prime;  // relaxed window bounds
  double delta = 1.0;
  double eps = 0.0;
  double ell = 0.0;
  double spacing_c = 0.0;
};

// Constants for checking and promoting Morse data: pair threshold and
// distance slack for the tip-anchored diamond test, the quadruple scale s,
// the local-to-global scale S, and the promoted datum (theta_prime, D', L',
// A') whose re-verification runs against theta_second.
struct PromotionEntry {
  std::vector<double> theta;
  std::vector<double> theta_prime;
  double D = 0, L = 1, A = 0;
  double eps = 0, ell = 0;  // straightness thresholds at (theta, theta_prime)
  int s = 1;                // quadruple scale
  int S = 2;                // local-to-global scale
  double pair_threshold = 0;  // only tip pairs at least this far apart are tested
  double dist_slack = 0;      // diamond distance budget = D + dist_slack
  double D_prime = 0, L_prime = 1, A_prime = 0;
  std::vector<double> theta_second;  // relaxation window for the promoted check
  bool chained = false;  // entry generated to back a promoted re-check
};

struct Calibration {
  int version = 1;
  std::string id;  // content hash, embedded in certificates
  int n = 0;
  std::vector<int> pattern;
  std::uint64_t seed = 0;
  std::vector<StraightnessEntry> straightness;
  std::vector<PromotionEntry> promotion;

  const StraightnessEntry* find_straightness(const ThetaSpec& theta,
                                             const ThetaSpec& theta_prime,
                                             double delta) const;
  const PromotionEntry* find_promotion(const ThetaSpec& theta,
                                       const ThetaSpec& theta_prime, double D,
                                       double L, double A) const;
  // same, but throwing CalibrationMissing with a descriptive message
  const StraightnessEntry& need_straightness(const ThetaSpec& theta,
                                             const ThetaSpec& theta_prime,
                                             double delta) const;
  const PromotionEntry& need_promotion(const ThetaSpec& theta,
                                       const ThetaSpec& theta_prime, double D,
                                       double L, double A) const;

  std::string to_toml() const;  // deterministic, id recomputed
  static Calibration from_toml(const std::string& text);
  static Calibration load(const std::string& path);
  void save(const std::string& path) const;
};

struct CalibrateOptions {
  int stage_max = 6;          // stages i = 1..stage_max get entries
  int trials = 4;             // synthetic sequences per sweep cell
  int sequence_length = 9;    // points per synthetic sequence
  // angle allowance of the recognition/pair filters; orbit midpoint corners
  // of the order of a radian are normal at representable scales, so this is
  // a selection threshold, not a straightness-lemma constant
  double filter_eps = 1.55;
  std::uint64_t seed = 20240901;
};

// The sweep harness.  Deterministic under a fixed seed.
Calibration calibrate(const ModelConfig& model, const CalibrateOptions& opt);

}  // namespace morsekit
