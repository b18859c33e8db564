#pragma once

// Partial flags, antipodality, ζ-angles, parallel sets, Weyl cones and
// diamonds, with numerical membership and projection.
//
// A flag of pattern (d_1 < ... < d_k) is stored as one orthonormal basis per
// level, nested by construction.  The flag of a regular segment x -> y is the
// chain of dominant eigenspace sums of the relative position, transported by
// x^{1/2}.
//
// The parallel set of an antipodal pair is the congruence image of the
// block-diagonal points under a transformer built from the common refinement
//   B_j = plus^(d_j)  ∩  minus^(n - d_{j-1}).
//
// Distance from a point to a parallel set is computed by Riemannian gradient
// descent on the totally geodesic block-diagonal submanifold; the distance
// function is geodesically convex there, so a stationary point is the global
// nearest-point projection.

#include <optional>
#include <vector>

#include "core/model.hpp"
#include "core/spd.hpp"

namespace morsekit {

struct FlagChain {
  std::vector<int> pattern;
  std::vector<Mat> basis;  // basis[j]: n x d_j, orthonormal columns, nested

  int n() const { return basis.empty() ? 0 : static_cast<int>(basis[0].rows()); }
  void validate(double tol_orth = 1e-9, double tol_nest = 1e-8) const;

  static FlagChain standard(int n, const std::vector<int>& pattern);
  // spans of trailing coordinates (e_n, then {e_n, e_{n-1}}, ...)
  static FlagChain standard_opposite(int n, const std::vector<int>& pattern);
};

// Max over levels of the largest principal angle between the spans.
double flag_distance(const FlagChain& f1, const FlagChain& f2);

// g . F  (columns mapped and re-orthonormalized)
FlagChain apply_isometry(const Isometry& g, const FlagChain& f);

FlagChain flag_of_segment(const SPDPoint& x, const SPDPoint& y,
                          const std::vector<int>& pattern,
                          const Tolerances& tol);

struct AntipodalReport {
  bool antipodal = false;
  double margin = 0.0;  // min over levels of the smallest singular value of
                        // the stacked bases; > tol means transverse
};

AntipodalReport antipodal(const FlagChain& f_minus, const FlagChain& f_plus,
                          const Tolerances& tol);

// Unit tangent at x toward the ideal point of type zeta in the flag's
// simplex.  Requires zeta constant on pattern blocks; the direction is then
// a weighted sum of projectors and does not depend on any frame choice.
TangentSym zeta_direction(const SPDPoint& x, const FlagChain& f, const Vec& zeta);

// Riemannian angle at x between the zeta-rays of two flags.
double zeta_angle(const SPDPoint& x, const FlagChain& f1, const FlagChain& f2,
                  const Vec& zeta);

// Angle at x between the zeta-rays of tau(x y) and of f.
double zeta_angle_to_point(const SPDPoint& x, const FlagChain& f,
                           const SPDPoint& y, const Vec& zeta,
                           const Tolerances& tol);

struct ParallelSet {
  FlagChain minus, plus;
  Isometry transformer;          // maps block-diagonal points into the set
  std::vector<int> block_dims;   // sizes of the refinement blocks

  int n() const { return transformer.n(); }
  // Frobenius norm of the off-block part of the pulled-back point (0 on the set).
  double membership_residual(const SPDPoint& x) const;
};

ParallelSet parallel_set(const FlagChain& f_minus, const FlagChain& f_plus,
                         const Tolerances& tol);

struct ProjectionResult {
  SPDPoint point;    // nearest point on the set
  double distance;   // d(x, point)
  int iterations;
  double grad_norm;  // stationarity residual at the solution
};

ProjectionResult project_to_parallel_set(const SPDPoint& x, const ParallelSet& p,
                                         const Tolerances& tol);

struct ConeDefect {
  bool verdict = false;
  bool degenerate = false;   // segment too degenerate to carry a flag
  double flag_mismatch = 0;  // principal angle between segment flag and target
  double type_margin = 0;    // Θ margin of the segment type
};

// Membership of z in the Θ-cone with the given apex and flag: the segment
// apex -> z must be Θ-regular and its flag must equal f.
ConeDefect cone_membership(const SPDPoint& apex, const FlagChain& f,
                           const SPDPoint& z, const ThetaSpec& theta,
                           const Tolerances& tol);

struct DiamondDefect {
  double finsler_gap = 0;  // d(x,z) + d(z,y) - d(x,y) in the Finsler metric
  double margin_xz = 0, margin_zy = 0;  // Θ margins of the two half segments
  bool skipped_xz = false, skipped_zy = false;  // z within tol of a tip
  bool member = false;
};

// z lies in the Θ-diamond over (x, y) iff the Finsler betweenness gap
// vanishes and both half segments are Θ-regular.  Margins are skipped (and
// treated as passing, tips belong to the diamond) when z coincides with a tip.
DiamondDefect diamond_defect(const SPDPoint& x, const SPDPoint& y,
                             const SPDPoint& z, const ThetaSpec& theta,
                             const Vec& theta_bar, const Tolerances& tol);

struct DiamondDistance {
  double upper = 0;           // one-sided upper bound on d(z, diamond)
  bool tips_regular = false;  // tip segment Θ-regular (needed for the bound)
  bool exact_member = false;  // membership test already passed
};

// One-sided upper bound on the distance from z to the Θ-diamond over
// (x1, x2): exact membership first, then the distance to the tip geodesic
// (a diamond subset), then projection to the maximal flat through the tips
// followed by clamping of the flat coordinates into the diamond polytope.
// If a stage already proves the bound <= early_accept, later stages are
// skipped (early_accept < 0 disables the shortcut).
DiamondDistance diamond_distance_upper(const SPDPoint& x1, const SPDPoint& x2,
                                       const SPDPoint& z, const ThetaSpec& theta,
                                       const Vec& theta_bar, const Tolerances& tol,
                                       double early_accept = -1.0);

// Flag of sums of dominant generalized eigenspaces of g (ordered by
// eigenvalue modulus); requires a modulus gap at every pattern index.
FlagChain attracting_flag(const Isometry& g, const std::vector<int>& pattern,
                          const Tolerances& tol);

}  // namespace morsekit
