#pragma once

// Stagewise semidecision of the Morse property for free-group
// representations: at stage i every reduced word path of length 3 S_i
// through the identity must satisfy the stage quadruple condition; a passing
// stage is promoted through the calibrated local-to-global check and
// re-verified globally before a certificate is issued.
//
// Soundness: a certified outcome implies the direct global check passed on
// every enumerated orbit path with the promoted datum.  Completeness is
// relative to the calibration schedule (the ideal thresholds are not
// computable); actions outside the family the schedule was fitted on may
// never certify.

#include "core/morse.hpp"
#include "core/schottky.hpp"

namespace morsekit {

struct Representation {
  int rank = 0;
  std::vector<Isometry> generators;
  SPDPoint basepoint;

  void validate(const ModelConfig& model) const;
};

struct StageParams {
  int stage = 0;
  ThetaSpec theta, theta_next;
  double eps = 0, ell = 0;
  int S = 2;
  double D = 0, L = 1, A = 0;  // stage datum (A fixed to zero)
};

struct StageSchedule {
  std::vector<StageParams> stages;

  // Stage data (i, Θ_i, D_i = i, A = 0) with thresholds from the table;
  // stages without calibration entries (empty windows) are skipped.
  static StageSchedule from_calibration(const Calibration& cal,
                                        const ModelConfig& model,
                                        int budget_stages);
  void validate(int n) const;
};

struct StageSummary {
  int stage = 0;
  bool quadruples_pass = false;
  bool promotion_pass = false;
  double angle_margin = 0, spacing_margin = 0, regularity_margin = 0;
  long paths_checked = 0;
  std::string witness_word;
};

struct RecognitionOutcome {
  enum class Status { certified, budget_exhausted };
  Status status = Status::budget_exhausted;
  int stage = 0;  // certifying stage, or last stage tried
  std::optional<Certificate> certificate;
  std::vector<StageSummary> summaries;
  long paths_checked = 0;
};

struct RecognizeOptions {
  long max_paths = 2000000;  // per-stage enumeration cap (resource guard)
  int threads = 0;
  bool exhaustive_quadruples = false;
};

// Throws ResourceExhausted when a stage would have to enumerate more than
// max_paths paths while still all-passing.
RecognitionOutcome recognize(const Representation& rep,
                             const StageSchedule& schedule, int budget_stages,
                             const Calibration& cal, const ModelConfig& model,
                             const RecognizeOptions& opt = {});

struct PerturbReport {
  bool pass = false;
  double angle_margin = 0, spacing_margin = 0, regularity_margin = 0;
  double diamond_margin = 0;
  double angle_delta = 0, spacing_delta = 0;  // margin movement vs baseline
  std::string witness_word;
};

// Entrywise perturbation of the generators by at most delta (renormalized
// into the group), rechecked at the given stage with the datum relaxed by
// datum_relax (quadruple thresholds widened accordingly).
PerturbReport perturb_and_recheck(const Representation& rep,
                                  const StageParams& stage, double delta,
                                  double datum_relax, std::uint64_t seed,
                                  const Calibration& cal,
                                  const ModelConfig& model,
                                  const RecognizeOptions& opt = {});

// The orbit path of a reduced word (prefix products applied to the
// basepoint), exposed for tests and the perturbation harness.
DiscretePath orbit_path(const Representation& rep, const std::vector<int>& word,
                        const ModelConfig& model);

}  // namespace morsekit
