#pragma once

// Straightness of point sequences and the quadruple condition on discrete
// paths.  A sequence is (Θ, ε)-straight and l-spaced when every consecutive
// segment is Θ-regular of length >= l and every interior ζ-angle between the
// backward and forward segment flags is >= π - ε.

#include <map>
#include <optional>
#include <vector>

#include "core/flags.hpp"

namespace morsekit {

struct PointSequence {
  std::vector<int> times;
  std::vector<SPDPoint> points;

  std::size_t size() const { return points.size(); }
  void validate() const;
};

struct DiscretePath {
  int t_start = 0;
  std::vector<SPDPoint> samples;  // sample at integer times t_start + i
  std::optional<FlagChain> end_minus, end_plus;

  int t_end() const { return t_start + static_cast<int>(samples.size()) - 1; }
  const SPDPoint& at(int t) const { return samples.at(static_cast<std::size_t>(t - t_start)); }
  DiscretePath window(int t0, int t1) const;  // inclusive subpath
  void validate() const;
};

// All margins are "pass iff >= 0": angle margin is ζ-angle - (π - ε),
// spacing margin is d - l, regularity margin is the Θ margin of the type.
struct StraightnessReport {
  bool straight = false;
  double angle_margin = 0;
  double spacing_margin = 0;
  double regularity_margin = 0;
  int witness_index = -1;  // time of the first violation, -1 if none
  long checked_angles = 0;
  long checked_segments = 0;
  bool vacuous() const { return checked_segments == 0; }
};

StraightnessReport is_straight_spaced(const PointSequence& seq,
                                      const ThetaSpec& theta, double eps,
                                      double ell, const Vec& zeta,
                                      const Tolerances& tol);

struct MovesAwayReport {
  bool moves_away = false;
  double angle_margin = 0;  // min over n of ζ-angle - (π - ε)
  int witness_index = -1;
};

// The sequence moves ε-away from the flag: at every point the ζ-angle
// between the flag and the forward segment is >= π - ε.
MovesAwayReport moves_away(const PointSequence& seq, const FlagChain& f,
                           double eps, const Vec& zeta, const Tolerances& tol);

// Midpoints of consecutive scale-s samples p(t_start + n s); entry n carries
// timestamp n.
PointSequence midpoint_sequence(const DiscretePath& path, int scale);

// Quadruple condition: for each time quadruple t1<t2<t3<t4 with consecutive
// gaps >= s, the midpoint triple (mid(t1,t2), mid(t2,t3), mid(t3,t4)) must be
// (Θ, ε)-straight and l-spaced.  By default quadruples are enumerated on the
// arithmetic grid of step s through the left endpoint, plus the right domain
// endpoint; exhaustive mode ranges over all integer sample times.
StraightnessReport quadruple_condition(const DiscretePath& path,
                                       const ThetaSpec& theta, double eps,
                                       double ell, int s, const Vec& zeta,
                                       const Tolerances& tol,
                                       bool exhaustive = false);

}  // namespace morsekit
