#pragma once

// Model data shared by every module: the matrix size n, the flag dimension
// pattern defining the face type, the auxiliary types zeta / finsler_type,
// the tolerance bundle, and the per-root regularity windows (ThetaSpec).
//
// Conventions used throughout:
//   * points live in SPD(n, det 1);
//   * a Cartan vector is the nonincreasing vector of log eigenvalues of the
//     relative position of two points (sums to zero);
//   * a type vector is a unit Cartan vector;
//   * simple root at index d (1-based, 1 <= d < n): alpha_d(v) = v[d-1] - v[d];
//   * the pattern lists the dimensions 0 < d_1 < ... < d_k < n of the partial
//     flags; it must be symmetric under d -> n - d.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace morsekit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Tolerances {
  double eigengap = 1e-7;        // log-eigenvalue gap below which a flag does not exist
  double projection = 1e-8;      // gradient-norm target of the parallel-set projector
  double flag = 1e-6;            // principal-angle threshold for flag equality (radians)
  double transversality = 1e-8;  // smallest singular value threshold for antipodality
  double finsler_gap = 1e-9;     // betweenness slack in the diamond membership test
  double angle = 1e-8;           // generic angle comparisons
  double det_rel = 1e-6;         // relative window for det-1 renormalization
  double sym_rel = 1e-9;         // relative symmetry check
  double quasi = 1e-9;           // slack on quasi-isometry inequalities
  int projection_iters = 400;    // iteration budget of the projector
};

// Compact regularity window: lower bounds on the pattern-root values of a
// normalized Cartan vector.  The represented set is
//   { v unit, nonincreasing : v[d-1] - v[d] >= bound(d)  for d in pattern }.
// Bounds must be symmetric under d -> n - d so the set is invariant under
// the opposition involution.
struct ThetaSpec {
  std::vector<int> pattern;
  std::vector<double> bounds;  // one per pattern entry, all >= 0

  // min over pattern roots of alpha_d(type) - bound(d); >= 0 means membership.
  double margin(const Vec& type) const;
  bool contains(const Vec& type) const { return margin(type) >= 0.0; }

  // Containment of windows: *this is a subset of `wider` iff every bound of
  // `wider` is <= the corresponding bound here.  Returns the worst slack
  // (positive = strictly inside).
  double inclusion_margin(const ThetaSpec& wider) const;

  // Stage-i window: bound 1/i on every pattern root.
  static ThetaSpec stage(const std::vector<int>& pattern, int i);

  void validate(int n) const;
  bool same_key(const ThetaSpec& o, double tol = 1e-9) const;
};

struct ModelConfig {
  int n = 3;
  std::vector<int> pattern;  // e.g. {1, 2}
  Vec zeta;                  // unit, nonincreasing, sum 0, block-constant, ι-invariant
  Vec finsler_type;          // same constraints
  Tolerances tol;

  // Block-step defaults for zeta / finsler_type: block j of the pattern gets
  // the constant value k + 2 - 2j (then normalized).  The pattern symmetry
  // makes the result ι-invariant by construction.
  static ModelConfig standard(int n, std::vector<int> pattern);

  void validate() const;
  std::vector<int> block_sizes() const;  // k + 1 blocks cut out by the pattern
};

// --- small vector helpers -------------------------------------------------

// negate and reverse coordinate order (the opposition involution on
// Cartan/type vectors).
Vec opposition(const Vec& v);

bool is_nonincreasing(const Vec& v, double tol = 1e-12);

// v / |v|; throws on vectors shorter than the eigengap tolerance.
Vec type_of(const Vec& v, double eigengap_tol = 1e-7);

// Block-step vector for a pattern (unnormalized value k + 2 - 2j on block j).
Vec block_step_vector(int n, const std::vector<int>& pattern);

void validate_pattern(int n, const std::vector<int>& pattern);

}  // namespace morsekit
