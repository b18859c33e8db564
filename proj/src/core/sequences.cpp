#include "core/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace morsekit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void PointSequence::validate() const {
  if (times.size() != points.size())
    throw InvalidInput("sequence times/points length mismatch");
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    if (times[i + 1] <= times[i])
      throw InvalidInput("sequence timestamps must be strictly increasing");
  }
}

void DiscretePath::validate() const {
  if (samples.size() < 2) throw InvalidInput("path needs at least two samples");
}

DiscretePath DiscretePath::window(int t0, int t1) const {
  if (t0 < t_start || t1 > t_end() || t1 <= t0)
    throw InvalidInput("window out of path domain");
  DiscretePath w;
  w.t_start = t0;
  for (int t = t0; t <= t1; ++t) w.samples.push_back(at(t));
  return w;
}

StraightnessReport is_straight_spaced(const PointSequence& seq,
                                      const ThetaSpec& theta, double eps,
                                      double ell, const Vec& zeta,
                                      const Tolerances& tol) {
  seq.validate();
  if (seq.size() < 2)
    throw InvalidInput("straightness needs at least two points");
  StraightnessReport rep;
  rep.angle_margin = kInf;
  rep.spacing_margin = kInf;
  rep.regularity_margin = kInf;

  const auto n_pts = seq.size();
  auto note_violation = [&](std::size_t i) {
    if (rep.witness_index < 0) rep.witness_index = seq.times[i];
  };

  // segment flags, reused for the interior angles
  std::vector<FlagChain> fwd(n_pts - 1), bwd(n_pts - 1);
  std::vector<bool> seg_ok(n_pts - 1, true);
  for (std::size_t i = 0; i + 1 < n_pts; ++i) {
    const double d = riem_distance(seq.points[i], seq.points[i + 1]);
    if (d <= tol.eigengap)
      throw InvalidInput("degenerate consecutive points in sequence");
    rep.spacing_margin = std::min(rep.spacing_margin, d - ell);
    if (d - ell < 0) note_violation(i);
    ++rep.checked_segments;
    try {
      const Vec cv = cartan_vector(seq.points[i], seq.points[i + 1]);
      const double margin = theta.margin(cv / cv.norm());
      rep.regularity_margin = std::min(rep.regularity_margin, margin);
      if (margin < 0) note_violation(i);
      fwd[i] = flag_of_segment(seq.points[i], seq.points[i + 1], theta.pattern, tol);
      bwd[i] = flag_of_segment(seq.points[i + 1], seq.points[i], theta.pattern, tol);
    } catch (const DegenerateSegment&) {
      seg_ok[i] = false;
      rep.regularity_margin = std::min(rep.regularity_margin, -kInf);
      note_violation(i);
    }
  }
  for (std::size_t i = 1; i + 1 < n_pts; ++i) {
    if (!seg_ok[i - 1] || !seg_ok[i]) {
      rep.angle_margin = std::min(rep.angle_margin, -kInf);
      continue;
    }
    const double ang =
        zeta_angle(seq.points[i], bwd[i - 1], fwd[i], zeta);
    rep.angle_margin = std::min(rep.angle_margin, ang - (M_PI - eps));
    if (ang - (M_PI - eps) < 0) note_violation(i);
    ++rep.checked_angles;
  }
  rep.straight = rep.angle_margin >= 0 && rep.spacing_margin >= 0 &&
                 rep.regularity_margin >= 0;
  return rep;
}

MovesAwayReport moves_away(const PointSequence& seq, const FlagChain& f,
                           double eps, const Vec& zeta, const Tolerances& tol) {
  seq.validate();
  if (seq.size() < 2) throw InvalidInput("moves_away needs at least two points");
  MovesAwayReport rep;
  rep.angle_margin = kInf;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const double ang =
        zeta_angle_to_point(seq.points[i], f, seq.points[i + 1], zeta, tol);
    const double m = ang - (M_PI - eps);
    if (m < rep.angle_margin) {
      rep.angle_margin = m;
      if (m < 0 && rep.witness_index < 0) rep.witness_index = seq.times[i];
    }
  }
  rep.moves_away = rep.angle_margin >= 0;
  return rep;
}

PointSequence midpoint_sequence(const DiscretePath& path, int scale) {
  if (scale < 1) throw InvalidInput("midpoint scale must be >= 1");
  path.validate();
  const int coarse = (path.t_end() - path.t_start) / scale + 1;
  if (coarse < 2) throw InvalidInput("path too short for the midpoint scale");
  PointSequence seq;
  for (int k = 0; k + 1 < coarse; ++k) {
    const int ta = path.t_start + k * scale;
    const int tb = ta + scale;
    seq.times.push_back(k);
    seq.points.push_back(midpoint(path.at(ta), path.at(tb)));
  }
  return seq;
}

StraightnessReport quadruple_condition(const DiscretePath& path,
                                       const ThetaSpec& theta, double eps,
                                       double ell, int s, const Vec& zeta,
                                       const Tolerances& tol, bool exhaustive) {
  if (s < 1) throw InvalidInput("quadruple scale must be >= 1");
  path.validate();

  std::vector<int> grid;
  if (exhaustive) {
    for (int t = path.t_start; t <= path.t_end(); ++t) grid.push_back(t);
  } else {
    for (int t = path.t_start; t <= path.t_end(); t += s) grid.push_back(t);
    if (grid.back() != path.t_end()) grid.push_back(path.t_end());
  }

  StraightnessReport agg;
  agg.angle_margin = kInf;
  agg.spacing_margin = kInf;
  agg.regularity_margin = kInf;
  agg.straight = true;

  const int g = static_cast<int>(grid.size());
  for (int a = 0; a < g; ++a)
    for (int b = a + 1; b < g; ++b) {
      if (grid[b] - grid[a] < s) continue;
      for (int c = b + 1; c < g; ++c) {
        if (grid[c] - grid[b] < s) continue;
        for (int d = c + 1; d < g; ++d) {
          if (grid[d] - grid[c] < s) continue;
          PointSequence mid3;
          mid3.times = {0, 1, 2};
          mid3.points = {midpoint(path.at(grid[a]), path.at(grid[b])),
                         midpoint(path.at(grid[b]), path.at(grid[c])),
                         midpoint(path.at(grid[c]), path.at(grid[d]))};
          StraightnessReport r;
          try {
            r = is_straight_spaced(mid3, theta, eps, ell, zeta, tol);
          } catch (const InvalidInput&) {
            // coincident midpoints cannot satisfy any positive spacing
            r.straight = false;
            r.angle_margin = -kInf;
            r.spacing_margin = -kInf;
            r.regularity_margin = -kInf;
            r.checked_segments = 2;
          }
          agg.checked_angles += r.checked_angles;
          agg.checked_segments += r.checked_segments;
          if (r.angle_margin < agg.angle_margin) agg.angle_margin = r.angle_margin;
          if (r.spacing_margin < agg.spacing_margin)
            agg.spacing_margin = r.spacing_margin;
          if (r.regularity_margin < agg.regularity_margin)
            agg.regularity_margin = r.regularity_margin;
          if (!r.straight) {
            agg.straight = false;
            if (agg.witness_index < 0) agg.witness_index = grid[a];
          }
        }
      }
    }
  return agg;
}

}  // namespace morsekit
