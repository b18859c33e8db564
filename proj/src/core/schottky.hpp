#pragma once

// Construction and certification of free two-generator subgroups from a
// generic pair of axial isometries: genericity via pairwise antipodality of
// the four fixed flags, power search driven by the separation/regularity/
// angle test on the midpoint quadruple, and exhaustive word verification.

#include <array>

#include "core/morse.hpp"

namespace morsekit {

struct AxialPair {
  Isometry alpha, beta;
  FlagChain tau_a_plus, tau_a_minus, tau_b_plus, tau_b_minus;
  bool generic = false;
  double genericity_margin = 0;       // smallest of the six pairwise margins
  std::array<double, 6> pair_margins{};  // a+/a-, a+/b+, a+/b-, a-/b+, a-/b-, b+/b-
};

// Computes the four attracting/repelling flags and the six antipodality
// margins.  Throws on non-proximal generators (no flags); a non-generic
// pair is returned with generic = false.
AxialPair generic_pair(const Isometry& alpha, const Isometry& beta,
                       const ModelConfig& model);

// Midpoints (y_m, y_-m, z_n, z_-n) of the segments from x to alpha^{±m} x
// and beta^{±n} x.
std::array<SPDPoint, 4> midpoint_quadruple(const AxialPair& pair, int m, int n,
                                           const SPDPoint& x);

struct QuadrupleTestReport {
  bool pass = false;
  double spacing_margin = 0;     // min pairwise distance - ell
  double regularity_margin = 0;  // worst Θ margin over the six segments
  double angle_margin = 0;       // eps - worst ζ-angle at the four points
  std::string witness;
};

// (a) pairwise distances among the four midpoints >= ell, (b) the six
// connecting segments Θ-regular, (c) at each midpoint the segments to the
// other three make ζ-angle <= eps with the segment back to x.
QuadrupleTestReport quadruple_test(const std::array<SPDPoint, 4>& pts,
                                   const SPDPoint& x, const ThetaSpec& theta,
                                   double eps, double ell, const Vec& zeta,
                                   const Tolerances& tol);

struct PowerSearchResult {
  bool found = false;
  int m = 0, n = 0;
  QuadrupleTestReport best;  // report at (m, n), or the best attempt
  int tested = 0;
};

// Doubling-then-bisect search for the smallest power with a passing
// quadruple test; symmetric (m = n) by default, independent powers shrink
// each side separately afterwards.
PowerSearchResult search_powers(const AxialPair& pair, const SPDPoint& x,
                                const ThetaSpec& theta, double eps, double ell,
                                int budget, bool independent,
                                const ModelConfig& model);

struct WordVerification {
  bool pass = false;
  long words_checked = 0;
  double fitted_L = 1, fitted_A = 0;
  double straight_angle_margin = 0;
  double straight_spacing_margin = 0;
  double straight_regularity_margin = 0;
  double diamond_margin = 0;
  double qg_lower_margin = 0, qg_upper_margin = 0;
  double lower_slope = 0;  // min over words/pairs of d / |dt|
  std::string witness_word;
};

// Enumerates all reduced words of length <= k in A = alpha^m, B = beta^n;
// for each word the orbit path (x, w_1 x, w_1 w_2 x, ...) must pass the
// straightness check on its midpoint sequence (thresholds eps/ell) and
// morse_check at (datum, theta_prime).  Deterministic aggregation in
// lexicographic word order.
WordVerification verify_words(const AxialPair& pair, int m, int n,
                              const SPDPoint& x, int k, const MorseDatum& datum,
                              const ThetaSpec& theta_prime, double eps,
                              double ell, const PromotionEntry& cal,
                              const std::string& calibration_id,
                              const ModelConfig& model, int threads = 0);

struct SchottkyCertificate {
  int m = 0, n = 0;
  ThetaSpec theta;
  double eps = 0, ell = 0;
  QuadrupleTestReport quadruple_report;
  int max_word_length = 0;
  MorseDatum datum;
  WordVerification word_verification;
  std::string calibration_id;
  bool pass = false;
};

}  // namespace morsekit
