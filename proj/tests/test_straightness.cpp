#include <doctest.h>

#include "core/sequences.hpp"
#include "core/synthetic.hpp"
#include "oracles.hpp"

using namespace morsekit;

namespace {

const ModelConfig kModel = ModelConfig::standard(3, {1, 2});

ThetaSpec theta3(double b) {
  ThetaSpec t;
  t.pattern = {1, 2};
  t.bounds = {b, b};
  return t;
}

PointSequence flat_march(int count, double step) {
  PointSequence seq;
  for (int k = 0; k < count; ++k) {
    Mat d = Mat::Zero(3, 3);
    d(0, 0) = std::exp(step * k);
    d(2, 2) = std::exp(-step * k);
    d(1, 1) = 1.0;
    seq.times.push_back(k);
    seq.points.push_back(SPDPoint::from_matrix(d));
  }
  return seq;
}

// interior ζ-angle of a corner between flat directions u and v, computed
// from first principles: assign the zeta weights by the coordinate ranks of
// -u and of v, then take the arccos of the pairing.
double flat_corner_angle_oracle(const Vec& u, const Vec& v, const Vec& zeta) {
  auto weights = [&](const Vec& w) {
    std::vector<int> idx(w.size());
    for (int i = 0; i < w.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return w(a) > w(b); });
    Vec out(w.size());
    for (int r = 0; r < w.size(); ++r) out(idx[static_cast<std::size_t>(r)]) = zeta(r);
    return out;
  };
  const Vec w1 = weights(Vec(-u)), w2 = weights(v);
  return std::acos(std::clamp(w1.dot(w2), -1.0, 1.0));
}

}  // namespace

TEST_CASE("collinear flat sequences are straight") {
  const PointSequence seq = flat_march(6, 2.0);
  const StraightnessReport rep =
      is_straight_spaced(seq, theta3(0.1), 0.01, 1.0, kModel.zeta, kModel.tol);
  CHECK(rep.straight);
  CHECK(rep.angle_margin == doctest::Approx(0.01).epsilon(1e-6));  // angles are pi
  CHECK(rep.spacing_margin == doctest::Approx(2 * std::sqrt(2.0) - 1.0));
  CHECK(rep.checked_angles == 4);
}

TEST_CASE("a ninety-degree-class turn in the flat is rejected") {
  // march along zeta, then turn to the direction with coordinates 1 and 2
  // swapped; the interior ζ-angle drops to 2π/3 by chamber geometry
  Vec u = kModel.zeta;
  Vec v(3);
  v << u(1), u(0), u(2);
  PointSequence seq;
  Vec pos = Vec::Zero(3);
  for (int k = 0; k < 6; ++k) {
    Mat d = Mat::Zero(3, 3);
    for (int i = 0; i < 3; ++i) d(i, i) = std::exp(pos(i));
    seq.times.push_back(k);
    seq.points.push_back(SPDPoint::normalized(d));
    pos += 3.0 * (k < 3 ? u : v);
  }
  const StraightnessReport rep =
      is_straight_spaced(seq, theta3(0.05), 0.3, 1.0, kModel.zeta, kModel.tol);
  CHECK_FALSE(rep.straight);
  const double oracle = flat_corner_angle_oracle(u, v, kModel.zeta);
  CHECK(oracle == doctest::Approx(2 * M_PI / 3));
  // worst angle equals the oracle angle: margin = angle - (pi - eps)
  CHECK(rep.angle_margin ==
        doctest::Approx(oracle - (M_PI - 0.3)).epsilon(1e-9));
  CHECK(rep.witness_index == 3);
}

TEST_CASE("two-point sequences are spacing-checked") {
  PointSequence seq = flat_march(2, 0.3);
  const StraightnessReport rep =
      is_straight_spaced(seq, theta3(0.1), 0.1, 1.0, kModel.zeta, kModel.tol);
  CHECK_FALSE(rep.straight);
  CHECK(rep.spacing_margin < 0);
  CHECK(rep.checked_angles == 0);
}

TEST_CASE("moves_away against attracting and repelling flags") {
  const PointSequence seq = flat_march(5, 2.0);
  const auto repelling = FlagChain::standard_opposite(3, {1, 2});
  const auto attracting = FlagChain::standard(3, {1, 2});
  const MovesAwayReport away =
      moves_away(seq, repelling, 0.05, kModel.zeta, kModel.tol);
  CHECK(away.moves_away);
  CHECK(away.angle_margin == doctest::Approx(0.05).epsilon(1e-9));
  const MovesAwayReport toward =
      moves_away(seq, attracting, 0.05, kModel.zeta, kModel.tol);
  CHECK_FALSE(toward.moves_away);
}

TEST_CASE("straight spaced sequences keep moving away from the back flag") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const PointSequence seq =
        straight_sequence(kModel, kModel.zeta, 0.08, 3.0, 6, rng);
    // the flag of the backward extension of the first segment
    const FlagChain back =
        flag_of_segment(seq.points[0], exp_at(seq.points[0],
                        -zeta_direction(seq.points[0],
                                        flag_of_segment(seq.points[0], seq.points[1],
                                                        kModel.pattern, kModel.tol),
                                        kModel.zeta).w, 1.0),
                        kModel.pattern, kModel.tol);
    const MovesAwayReport rep =
        moves_away(seq, back, 3 * 0.08, kModel.zeta, kModel.tol);
    CHECK(rep.moves_away);
  }
}

TEST_CASE("midpoint sequences of geodesic samples stay on the geodesic") {
  Rng rng(32);
  const DiscretePath path = geodesic_path(kModel, kModel.zeta, 1.0, 13, rng);
  const PointSequence mids = midpoint_sequence(path, 3);
  CHECK(mids.size() == 4);
  for (std::size_t k = 0; k < mids.size(); ++k) {
    const auto expect = geodesic_point(path.samples[3 * k], path.samples[3 * k + 3], 0.5);
    CHECK((mids.points[k].matrix() - expect.matrix()).norm() < 1e-9);
    // consecutive scale-3 midpoints sit 3 time units apart on the geodesic
    if (k > 0)
      CHECK(riem_distance(mids.points[k - 1], mids.points[k]) ==
            doctest::Approx(3.0).epsilon(1e-9));
  }

  const PointSequence fine = midpoint_sequence(path, 1);
  CHECK(fine.size() == 12);

  // scale doubling: midpoints at scale 2s equal midpoints of the
  // s-coarsified path at scale 2
  const PointSequence lhs = midpoint_sequence(path, 4);
  DiscretePath coarse;
  coarse.t_start = 0;
  for (int t = 0; t <= path.t_end(); t += 2) coarse.samples.push_back(path.at(t));
  const PointSequence rhs = midpoint_sequence(coarse, 2);
  REQUIRE(lhs.size() == rhs.size());
  for (std::size_t k = 0; k < lhs.size(); ++k)
    CHECK((lhs.points[k].matrix() - rhs.points[k].matrix()).norm() < 1e-9);

  DiscretePath tiny;
  tiny.t_start = 0;
  tiny.samples = {path.samples[0], path.samples[1]};
  CHECK_THROWS_AS(midpoint_sequence(tiny, 2), InvalidInput);
}

TEST_CASE("quadruple condition on geodesics and turns") {
  Rng rng(33);
  const DiscretePath geo = geodesic_path(kModel, kModel.zeta, 1.5, 13, rng);
  for (int s : {1, 2, 3, 4}) {
    const StraightnessReport rep = quadruple_condition(
        geo, theta3(0.1), 0.05, 1.0, s, kModel.zeta, kModel.tol);
    CHECK(rep.straight);
  }

  // a sharp turn concentrated at one time fails for small s and eps
  const DiscretePath turn = flat_turn_path(kModel, kModel.zeta, 2.0, 13, 0);
  const StraightnessReport bad = quadruple_condition(
      turn, theta3(0.05), 0.2, 1.0, 2, kModel.zeta, kModel.tol);
  CHECK_FALSE(bad.straight);

  // exhaustive mode agrees with the grid on the failing verdict
  const StraightnessReport bad_ex = quadruple_condition(
      turn, theta3(0.05), 0.2, 1.0, 2, kModel.zeta, kModel.tol, true);
  CHECK_FALSE(bad_ex.straight);
  CHECK(bad_ex.angle_margin <= bad.angle_margin + 1e-12);
}

TEST_CASE("loosening parameters never flips a pass into a fail") {
  Rng rng(34);
  const DiscretePath path = geodesic_path(kModel, kModel.zeta, 1.2, 10, rng);
  const DiscretePath wobbly = perturb_path(path, 0.05, rng);
  const StraightnessReport base = quadruple_condition(
      wobbly, theta3(0.12), 0.08, 1.2, 2, kModel.zeta, kModel.tol);
  const StraightnessReport looser = quadruple_condition(
      wobbly, theta3(0.05), 0.30, 0.5, 2, kModel.zeta, kModel.tol);
  CHECK(looser.angle_margin >= base.angle_margin);
  CHECK(looser.spacing_margin >= base.spacing_margin);
  CHECK(looser.regularity_margin >= base.regularity_margin);
  if (base.straight) CHECK(looser.straight);
}

TEST_CASE("reports are isometry invariant") {
  Rng rng(35);
  const DiscretePath path = geodesic_path(kModel, kModel.zeta, 1.0, 9, rng);
  const DiscretePath wobbly = perturb_path(path, 0.08, rng);
  const Isometry g =
      Isometry::rescaled(rng.normal_matrix(3, 3) + 3.0 * Mat::Identity(3, 3));
  DiscretePath moved = wobbly;
  for (auto& p : moved.samples) p = apply_isometry(g, p);
  const StraightnessReport a = quadruple_condition(
      wobbly, theta3(0.1), 0.15, 1.0, 2, kModel.zeta, kModel.tol);
  const StraightnessReport b = quadruple_condition(
      moved, theta3(0.1), 0.15, 1.0, 2, kModel.zeta, kModel.tol);
  CHECK(a.straight == b.straight);
  CHECK(a.angle_margin == doctest::Approx(b.angle_margin).epsilon(1e-8));
  CHECK(a.spacing_margin == doctest::Approx(b.spacing_margin).epsilon(1e-8));
  CHECK(a.regularity_margin ==
        doctest::Approx(b.regularity_margin).epsilon(1e-8));
}

TEST_CASE("degenerate paths fail the quadruple condition without throwing") {
  DiscretePath constant;
  constant.t_start = 0;
  for (int t = 0; t < 7; ++t) constant.samples.push_back(SPDPoint::identity(3));
  const StraightnessReport rep = quadruple_condition(
      constant, theta3(0.1), 0.1, 1.0, 2, kModel.zeta, kModel.tol);
  CHECK_FALSE(rep.straight);
  CHECK(rep.spacing_margin < -1e300);
}
