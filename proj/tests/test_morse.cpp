#include <doctest.h>

#include "core/morse.hpp"
#include "core/synthetic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace morsekit;
using testutil::calibration3;
using testutil::model3;

namespace {

MorseDatum stage_datum(int i) {
  MorseDatum m;
  m.theta = ThetaSpec::stage(model3().pattern, i);
  m.D = i;
  m.L = i;
  m.A = 0;
  return m;
}

const PromotionEntry& stage_entry(int i) {
  return calibration3().need_promotion(
      ThetaSpec::stage(model3().pattern, i),
      ThetaSpec::stage(model3().pattern, i + 1), i, i, 0.0);
}

DiscretePath unit_geodesic(int len, Rng& rng) {
  return geodesic_path(model3(), model3().zeta, 1.0, len, rng);
}

}  // namespace

TEST_CASE("quasigeodesic check") {
  Rng rng(41);
  const DiscretePath geo = unit_geodesic(9, rng);
  const QuasiReport ok = quasigeodesic_check(geo, 1.0, 0.0, model3().tol);
  CHECK(ok.pass);
  CHECK(ok.fitted_L == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ok.fitted_A == doctest::Approx(0.0).epsilon(1e-9));

  DiscretePath constant;
  constant.t_start = 0;
  for (int t = 0; t < 12; ++t) constant.samples.push_back(SPDPoint::identity(3));
  const QuasiReport bad = quasigeodesic_check(constant, 1.5, 2.0, model3().tol);
  CHECK_FALSE(bad.pass);
  CHECK(bad.lower_margin < 0);
  CHECK(bad.upper_margin > 0);
}

TEST_CASE("morse_check certifies geodesics and rejects flat corners") {
  Rng rng(42);
  const MorseDatum m = stage_datum(2);
  const ThetaSpec thp = ThetaSpec::stage(model3().pattern, 3);
  const PromotionEntry& entry = stage_entry(2);

  const Certificate good = morse_check(unit_geodesic(9, rng), m, thp, entry,
                                       calibration3().id, model3());
  CHECK(good.pass);
  CHECK(good.diagnostics.at("diamond_margin") >=
        m.D + entry.dist_slack - 1e-9);  // geodesics live inside the diamonds

  // two long regular legs with an interior chamber turn leave every tip
  // diamond near the corner
  const DiscretePath corner = flat_turn_path(model3(), model3().zeta, 2.2, 13, 0);
  MorseDatum loose = m;
  loose.L = 4.0;  // generous quasi bounds; the diamond test must do the work
  loose.A = 2.0;
  const Certificate bad =
      morse_check(corner, loose, thp, entry, calibration3().id, model3());
  CHECK_FALSE(bad.pass);
  CHECK(bad.diagnostics.at("diamond_margin") < 0);
}

TEST_CASE("morse_check needs a strictly wider relaxation window") {
  Rng rng(43);
  const MorseDatum m = stage_datum(2);
  CHECK_THROWS_AS(morse_check(unit_geodesic(6, rng), m, m.theta, stage_entry(2),
                              calibration3().id, model3()),
                  InvalidInput);
}

TEST_CASE("local morse check windows") {
  Rng rng(44);
  const MorseDatum m = stage_datum(2);
  const ThetaSpec thp = ThetaSpec::stage(model3().pattern, 3);
  const PromotionEntry& entry = stage_entry(2);

  const DiscretePath geo = unit_geodesic(11, rng);
  const Certificate c = local_morse_check(geo, m, 4, thp, entry,
                                          calibration3().id, model3());
  CHECK(c.pass);
  CHECK(c.diagnostics.at("windows_checked") ==
        doctest::Approx(geo.t_end() - geo.t_start - 4 + 1));

  // short domain degenerates to a single flagged global check
  const DiscretePath tiny = unit_geodesic(3, rng);
  const Certificate d = local_morse_check(tiny, m, 8, thp, entry,
                                          calibration3().id, model3());
  CHECK(d.pass);
  CHECK(d.diagnostics.count("degenerate_domain") == 1);
}

TEST_CASE("a locally geodesic spiral passes locally and fails globally") {
  // concatenation of chamber-turning legs: every window of length <= leg
  // looks geodesic, but the quasi lower bound collapses over many turns
  const Vec u = model3().zeta;
  std::vector<Vec> dirs = {u};
  {
    Vec v(3);
    v << u(1), u(0), u(2);  // adjacent chamber
    dirs.push_back(v);
    Vec w(3);
    w << v(0), v(2), v(1);
    dirs.push_back(w);
    Vec y(3);
    y << w(1), w(0), w(2);
    dirs.push_back(y);
    Vec z(3);
    z << y(0), y(2), y(1);
    dirs.push_back(z);
    Vec a(3);
    a << z(1), z(0), z(2);
    dirs.push_back(a);  // six legs close to a full turn around the flat
  }
  DiscretePath spiral;
  spiral.t_start = 0;
  Vec pos = Vec::Zero(3);
  const int leg = 3;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    for (int t = 0; t < leg; ++t) {
      Mat mm = Mat::Zero(3, 3);
      for (int i = 0; i < 3; ++i) mm(i, i) = std::exp(pos(i));
      spiral.samples.push_back(SPDPoint::normalized(mm));
      pos += 1.2 * dirs[d];
    }
  }
  const MorseDatum m = stage_datum(2);
  const QuasiReport local_window = quasigeodesic_check(
      spiral.window(0, leg - 1), 1.3, 0.5, model3().tol);
  CHECK(local_window.pass);
  const QuasiReport global = quasigeodesic_check(spiral, 1.3, 0.5, model3().tol);
  CHECK_FALSE(global.pass);
  CHECK(global.lower_margin < 0);
  (void)m;
}

TEST_CASE("local-to-global promotion on geodesics") {
  Rng rng(45);
  const MorseDatum m = stage_datum(2);
  const ThetaSpec thp = ThetaSpec::stage(model3().pattern, 3);
  const Certificate cert = certify_local_to_global(unit_geodesic(9, rng), m,
                                                   thp, calibration3(), model3());
  CHECK(cert.pass);
  REQUIRE(cert.promoted.has_value());
  CHECK(cert.promoted->theta.bounds == thp.bounds);
  CHECK(cert.promoted->D >= m.D);

  // adversarial path: fails some window, no certificate, witness reported
  const DiscretePath corner = flat_turn_path(model3(), model3().zeta, 2.2, 13, 0);
  const Certificate no = certify_local_to_global(corner, m, thp, calibration3(),
                                                 model3());
  CHECK_FALSE(no.pass);
  CHECK(no.kind == "local_morse");
  CHECK_FALSE(no.witness.empty());
}

TEST_CASE("end flag estimation") {
  // ray in the standard flat: exact flag
  DiscretePath ray;
  ray.t_start = 0;
  for (int t = 0; t < 13; ++t) {
    Mat d = Mat::Zero(3, 3);
    for (int i = 0; i < 3; ++i) d(i, i) = std::exp(1.2 * t * model3().zeta(i));
    ray.samples.push_back(SPDPoint::normalized(d));
  }
  const FlagChain f = estimate_end(ray, 6, model3());
  CHECK(flag_distance(f, FlagChain::standard(3, {1, 2})) < 1e-9);

  // bounded perturbation does not move the end flag much
  Rng rng(46);
  const DiscretePath wobbly = perturb_path(ray, 0.2, rng);
  const FlagChain g = estimate_end(wobbly, 6, model3());
  CHECK(flag_distance(f, g) < 0.15);

  CHECK_THROWS_AS(estimate_end(ray, 100, model3()), InvalidInput);
}

TEST_CASE("periodic axial rays end at the attracting flag") {
  Rng rng(47);
  const Mat q = rng.rotation(3);
  Mat d = Mat::Zero(3, 3);
  d(0, 0) = 2.2;
  d(1, 1) = 1.0;
  d(2, 2) = 1.0 / 2.2;
  const Isometry g = Isometry::rescaled(q * d * q.transpose());
  DiscretePath orbit;
  orbit.t_start = 0;
  Isometry acc = Isometry::identity(3);
  for (int t = 0; t < 11; ++t) {
    orbit.samples.push_back(apply_isometry(acc, SPDPoint::identity(3)));
    acc = acc * g;
  }
  const FlagChain end = estimate_end(orbit, 5, model3());
  const FlagChain attract = attracting_flag(g, model3().pattern, model3().tol);
  CHECK(flag_distance(end, attract) < 1e-4);
}

TEST_CASE("perturbation lemma: relaxed datum absorbs sample motion") {
  Rng rng(48);
  const MorseDatum m = stage_datum(2);
  const ThetaSpec thp = ThetaSpec::stage(model3().pattern, 3);
  const PromotionEntry& entry = stage_entry(2);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscretePath geo = unit_geodesic(9, rng);
    const Certificate base =
        morse_check(geo, m, thp, entry, calibration3().id, model3());
    REQUIRE(base.pass);
    const double dp = 0.1;
    const DiscretePath moved = perturb_path(geo, dp, rng);
    const Certificate re = morse_check(moved, m.relaxed(dp), thp, entry,
                                       calibration3().id, model3());
    CHECK(re.pass);
  }
}

TEST_CASE("datum monotonicity: larger budgets never fail a passing path") {
  Rng rng(49);
  const ThetaSpec thp = ThetaSpec::stage(model3().pattern, 3);
  const PromotionEntry& entry = stage_entry(2);
  const DiscretePath path = perturb_path(unit_geodesic(9, rng), 0.15, rng);
  const MorseDatum m = stage_datum(2);
  const Certificate base =
      morse_check(path, m, thp, entry, calibration3().id, model3());
  MorseDatum weaker = m;
  weaker.D += 1.0;
  weaker.L += 1.0;
  weaker.A += 2.0;
  const Certificate relaxed =
      morse_check(path, weaker, thp, entry, calibration3().id, model3());
  if (base.pass) CHECK(relaxed.pass);
  CHECK(relaxed.diagnostics.at("diamond_margin") >=
        base.diagnostics.at("diamond_margin") - 1e-12);
}

TEST_CASE("finsler approximation of a geodesic path") {
  Rng rng(50);
  const MorseDatum m = stage_datum(2);
  const ThetaSpec thp = ThetaSpec::stage(model3().pattern, 3);
  const DiscretePath geo = geodesic_path(model3(), model3().zeta, 1.4, 13, rng);
  const FinslerApproximation fa =
      finsler_approximate(geo, m, thp, 2.5, calibration3(), model3());
  CHECK(fa.sup_distance < 1e-6);  // vertices on the geodesic itself
  CHECK(fa.straightness.straight);
  for (std::size_t i = 0; i + 1 < fa.vertices.size(); ++i)
    CHECK(riem_distance(fa.vertices.points[i], fa.vertices.points[i + 1]) >=
          2.5 - 1e-9);

  // perturbed input: vertices still straight/spaced, sup distance bounded
  const DiscretePath wob = perturb_path(geo, 0.1, rng);
  const FinslerApproximation fb =
      finsler_approximate(wob, m, thp, 2.5, calibration3(), model3());
  CHECK(fb.straightness.straight);
  CHECK(fb.sup_distance < 0.2);
}
