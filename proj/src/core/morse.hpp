#pragma once

// Morse quasigeodesic verification: two-sided quasi-isometry bounds plus
// tip-anchored diamond proximity on all sufficiently separated sample pairs,
// windowed local checks, local-to-global promotion against the calibration
// table, end-flag estimation and the piecewise-geodesic Finsler
// approximation.

#include <map>
#include <optional>
#include <string>

#include "core/calibration.hpp"
#include "core/sequences.hpp"

namespace morsekit {

struct MorseDatum {
  ThetaSpec theta;
  double D = 0;
  double L = 1;
  double A = 0;

  // Budget arithmetic for perturbed paths: moving every sample by at most dp
  // costs dp in diamond distance and 2*dp in the additive constant.
  MorseDatum relaxed(double dp) const {
    MorseDatum m = *this;
    m.D += dp;
    m.A += 2.0 * dp;
    return m;
  }
  void validate(int n) const {
    theta.validate(n);
    if (L < 1.0 || D < 0.0 || A < 0.0)
      throw InvalidInput("Morse datum needs L >= 1, D >= 0, A >= 0");
  }
};

struct QuasiReport {
  bool pass = false;
  double lower_margin = 0;  // min over pairs of d - (|dt|/L - A)
  double upper_margin = 0;  // min over pairs of (L |dt| + A) - d
  int witness_t1 = 0, witness_t2 = 0;
  double fitted_L = 1, fitted_A = 0;  // smallest constants the samples obey
};

QuasiReport quasigeodesic_check(const DiscretePath& path, double L, double A,
                                const Tolerances& tol);

struct Certificate {
  std::string kind;  // morse_path | local_morse | schottky | recognized
  bool pass = false;
  MorseDatum datum;
  ThetaSpec theta_prime;
  int scale = 0;  // window size S or recognition stage
  Tolerances tol;
  std::string calibration_id;
  std::map<std::string, double> diagnostics;
  std::string witness;
  std::optional<MorseDatum> promoted;
};

// Quasi-isometry bounds at (L, A) plus, for every sample pair at distance
// >= pair_threshold, every intermediate sample within distance D +
// dist_slack of the theta_prime diamond over the pair (one-sided distance
// bound).  Requires theta < theta_prime strictly.
Certificate morse_check(const DiscretePath& path, const MorseDatum& m,
                        const ThetaSpec& theta_prime, const PromotionEntry& cal,
                        const std::string& calibration_id,
                        const ModelConfig& model);

// morse_check on every window of length S; worst window reported.  Domains
// shorter than S degenerate to a single full-domain check (flagged in the
// diagnostics).
Certificate local_morse_check(const DiscretePath& path, const MorseDatum& m,
                              int S, const ThetaSpec& theta_prime,
                              const PromotionEntry& cal,
                              const std::string& calibration_id,
                              const ModelConfig& model);

// Local check at the calibrated scale; on success the certificate carries
// the promoted datum (theta_prime, D', L', A') and is re-verified by a
// direct global morse_check against theta_second.  A failed re-verification
// throws CalibrationContradiction.
Certificate certify_local_to_global(const DiscretePath& path,
                                    const MorseDatum& m,
                                    const ThetaSpec& theta_prime,
                                    const Calibration& cal,
                                    const ModelConfig& model);

// Flag of the chord from the first sample to the latest admissible time
// >= tail, with a half-tail stability check at the given drift tolerance.
FlagChain estimate_end(const DiscretePath& path, int tail,
                       const ModelConfig& model, double stability_tol = 0.02);

struct FinslerApproximation {
  PointSequence vertices;
  double sup_distance = 0;       // max over coarse samples of d(p(j), z_j)
  StraightnessReport straightness;
};

// Piecewise-geodesic approximation: projections of an s'-separated sample
// subset onto the parallel set of the tip flags, spaced at least S apart.
FinslerApproximation finsler_approximate(const DiscretePath& path,
                                         const MorseDatum& m,
                                         const ThetaSpec& theta_prime,
                                         double S, const Calibration& cal,
                                         const ModelConfig& model);

}  // namespace morsekit
