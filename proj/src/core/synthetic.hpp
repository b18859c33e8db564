#pragma once

// Deterministic builders of synthetic inputs: geodesic sample paths,
// controlled-turn straight sequences, and bounded perturbations.  Used by
// the calibration harness and reused by tests as fixture generators.

#include "core/rng.hpp"
#include "core/sequences.hpp"

namespace morsekit {

// Exp_x(t w) for a unit direction w given in identity-translated form.
SPDPoint exp_at(const SPDPoint& x, const Mat& w_translated, double t);

// Symmetric matrix frame * diag(type) * frame^T (a direction of the given
// type inside the flat of the frame).
Mat direction_of_type(const Vec& type, const Mat& frame);

// A unit type vector inside the window with the prescribed worst root
// margin, found by moving from the model's interior type toward a wall.
Vec type_with_margin(const ModelConfig& model, const ThetaSpec& theta,
                     double target_margin);

// Unit-speed-geodesic samples: p(t) = Exp_base(speed * t * w), t = 0..len-1,
// moved by a seeded random isometry.
DiscretePath geodesic_path(const ModelConfig& model, const Vec& type,
                           double speed, int len, Rng& rng);

// Piecewise-geodesic path in a maximal flat with one turn of the prescribed
// interior ζ-angle at the middle vertex (the turn permutes the flat
// coordinates; realizable angles are quantized by the Weyl group).
DiscretePath flat_turn_path(const ModelConfig& model, const Vec& type,
                            double speed, int len, int which_turn);

// Sequence of points with consecutive segments of the given type and length
// ell whose interior ζ-angles equal π - eps (realized by conjugating the
// straight continuation with a small rotation and bisecting the angle), with
// optional transverse jitter <= jitter applied to every point.
PointSequence straight_sequence(const ModelConfig& model, const Vec& type,
                                double eps, double ell, int len, Rng& rng,
                                double jitter = 0.0);

// Every sample moved by exactly eta along a random unit tangent direction.
DiscretePath perturb_path(const DiscretePath& path, double eta, Rng& rng);
PointSequence perturb_sequence(const PointSequence& seq, double eta, Rng& rng);

}  // namespace morsekit
