#include <doctest.h>

#include "core/spd.hpp"
#include "oracles.hpp"

using namespace morsekit;

namespace {
SPDPoint diag_point(std::initializer_list<double> logs) {
  Mat d = Mat::Zero(static_cast<int>(logs.size()), static_cast<int>(logs.size()));
  int i = 0;
  for (double l : logs) d(i, i) = std::exp(l), ++i;
  return SPDPoint::from_matrix(d);
}
}  // namespace

TEST_CASE("cartan vector of diagonal pairs") {
  const auto x = SPDPoint::identity(3);
  const auto y = diag_point({2, 0, -2});
  const Vec v = cartan_vector(x, y);
  CHECK(v(0) == doctest::Approx(2).epsilon(1e-12));
  CHECK(v(1) == doctest::Approx(0).epsilon(1e-12));
  CHECK(v(2) == doctest::Approx(-2).epsilon(1e-12));
  CHECK(cartan_vector(x, x).norm() == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("cartan vector is conjugation invariant") {
  Rng rng(11);
  const Mat q = rng.rotation(2);
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = std::exp(1.0);
  d(1, 1) = std::exp(-1.0);
  const auto y = SPDPoint::from_matrix(q * d * q.transpose());
  const Vec v = cartan_vector(SPDPoint::identity(2), y);
  CHECK(v(0) == doctest::Approx(1).epsilon(1e-10));
  CHECK(v(1) == doctest::Approx(-1).epsilon(1e-10));
}

TEST_CASE("riemannian distance basics") {
  const auto x = SPDPoint::identity(2);
  const auto y = diag_point({2, -2});
  CHECK(riem_distance(x, y) == doctest::Approx(2 * std::sqrt(2.0)));
  CHECK(riem_distance(y, y) == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("triangle inequality on random triples") {
  Rng rng(12);
  for (int n = 2; n <= 4; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = oracles::random_spd(n, rng);
      const auto y = oracles::random_spd(n, rng);
      const auto z = oracles::random_spd(n, rng);
      CHECK(riem_distance(x, z) <=
            riem_distance(x, y) + riem_distance(y, z) + 1e-9);
    }
  }
}

TEST_CASE("geodesic points") {
  const auto x = SPDPoint::identity(2);
  const auto y = diag_point({2, -2});
  const auto m = geodesic_point(x, y, 0.5);
  CHECK(m.matrix()(0, 0) == doctest::Approx(std::exp(1.0)));
  CHECK(m.matrix()(1, 1) == doctest::Approx(std::exp(-1.0)));
  CHECK((geodesic_point(x, y, 0.0).matrix() - x.matrix()).norm() ==
        doctest::Approx(0).epsilon(1e-12));

  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracles::random_spd(3, rng);
    const auto b = oracles::random_spd(3, rng);
    const auto p = geodesic_point(a, b, 1.0 / 3.0);
    CHECK(riem_distance(a, p) / riem_distance(a, b) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    // additivity: d(g(s), g(t)) = |s - t| d(a, b)
    const auto q = geodesic_point(a, b, 0.8);
    CHECK(riem_distance(p, q) ==
          doctest::Approx((0.8 - 1.0 / 3.0) * riem_distance(a, b))
              .epsilon(1e-9));
  }
}

TEST_CASE("type_of normalizes and rejects zero") {
  Vec v(3);
  v << 2, 0, -2;
  const Vec t = type_of(v);
  CHECK(t.norm() == doctest::Approx(1.0));
  CHECK(t(0) == doctest::Approx(2 / (2 * std::sqrt(2.0))));
  CHECK_THROWS_AS(type_of(Vec::Zero(3)), InvalidInput);

  Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    Vec w = rng.normal_vector(4);
    std::sort(w.data(), w.data() + 4, std::greater<double>());
    w.array() -= w.mean();
    if (w.norm() < 1e-6) continue;
    const Vec lhs = type_of(opposition(w));
    const Vec rhs = opposition(type_of(w));
    CHECK((lhs - rhs).norm() == doctest::Approx(0).epsilon(1e-12));
  }
}

TEST_CASE("theta regularity verdicts") {
  ThetaSpec theta;
  theta.pattern = {1, 2};
  theta.bounds = {0.1, 0.1};
  const auto x = SPDPoint::identity(3);
  const auto y = diag_point({2, 0, -2});
  const RegularityReport rep = theta_regular(x, y, theta, Tolerances{});
  CHECK(rep.regular);
  CHECK(rep.margin == doctest::Approx(2 / (2 * std::sqrt(2.0)) - 0.1));

  const auto z = diag_point({1, 1, -2});  // first root vanishes
  const RegularityReport rep2 = theta_regular(x, z, theta, Tolerances{});
  CHECK_FALSE(rep2.regular);
  CHECK(rep2.degenerate);

  CHECK_THROWS_AS(theta_regular(x, x, theta, Tolerances{}), InvalidInput);
}

TEST_CASE("finsler distance: sorted dot product equals the orbit maximum") {
  // SL(2) closed case
  const auto x2 = SPDPoint::identity(2);
  const auto y2 = diag_point({2, -2});
  Vec tb2(2);
  tb2 << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
  CHECK(finsler_distance(x2, y2, tb2) == doctest::Approx(2 * std::sqrt(2.0)));
  CHECK(finsler_distance(x2, x2, tb2) == doctest::Approx(0).epsilon(1e-12));

  Rng rng(15);
  for (int n = 2; n <= 4; ++n) {
    Vec tb = block_step_vector(n, n == 2 ? std::vector<int>{1}
                               : n == 3 ? std::vector<int>{1, 2}
                                        : std::vector<int>{1, 2, 3});
    tb /= tb.norm();
    for (int trial = 0; trial < 40; ++trial) {
      const auto a = oracles::random_spd(n, rng);
      const auto b = oracles::random_spd(n, rng);
      const double fast = finsler_distance(a, b, tb);
      const double brute = oracles::finsler_orbit_max(tb, cartan_vector(a, b));
      CHECK(fast == doctest::Approx(brute).epsilon(1e-12));
    }
  }
}

TEST_CASE("finsler symmetry under the opposition involution") {
  Rng rng(16);
  // non ι-invariant type: sorted unit trace-free vector
  Vec tb(3);
  tb << 0.8, 0.1, -0.9;
  tb.array() -= tb.mean();
  tb /= tb.norm();
  std::sort(tb.data(), tb.data() + 3, std::greater<double>());
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracles::random_spd(3, rng);
    const auto b = oracles::random_spd(3, rng);
    CHECK(finsler_distance(a, b, tb) ==
          doctest::Approx(finsler_distance(b, a, Vec(opposition(tb))))
              .epsilon(1e-10));
  }
}

TEST_CASE("finsler triangle inequality") {
  Rng rng(17);
  Vec tb = block_step_vector(3, {1, 2});
  tb /= tb.norm();
  for (int trial = 0; trial < 40; ++trial) {
    const auto x = oracles::random_spd(3, rng);
    const auto y = oracles::random_spd(3, rng);
    const auto z = oracles::random_spd(3, rng);
    CHECK(finsler_distance(x, y, tb) <=
          finsler_distance(x, z, tb) + finsler_distance(z, y, tb) + 1e-9);
  }
}

TEST_CASE("opposition involution") {
  Vec v(3);
  v << 2, 0, -2;
  CHECK((opposition(v) - v).norm() == doctest::Approx(0));
  Vec w(3);
  w << 3, 1, -4;
  const Vec ow = opposition(w);
  CHECK(ow(0) == 4);
  CHECK(ow(1) == -1);
  CHECK(ow(2) == -3);
  CHECK((opposition(opposition(w)) - w).norm() == doctest::Approx(0));

  Rng rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = oracles::random_spd(3, rng);
    const auto y = oracles::random_spd(3, rng);
    CHECK((cartan_vector(y, x) - opposition(cartan_vector(x, y))).norm() ==
          doctest::Approx(0).epsilon(1e-9));
  }
}

TEST_CASE("isometry action") {
  const auto x = SPDPoint::identity(3);
  CHECK((apply_isometry(Isometry::identity(3), x).matrix() - x.matrix()).norm() ==
        doctest::Approx(0));
  Rng rng(19);
  const Mat q = rng.rotation(3);
  CHECK((apply_isometry(Isometry::from_matrix(q), x).matrix() - x.matrix())
            .norm() == doctest::Approx(0).epsilon(1e-12));

  for (int trial = 0; trial < 20; ++trial) {
    const Mat g = rng.normal_matrix(3, 3) + 3.0 * Mat::Identity(3, 3);
    const Isometry iso = Isometry::rescaled(g);
    const auto a = oracles::random_spd(3, rng);
    const auto b = oracles::random_spd(3, rng);
    const Vec before = cartan_vector(a, b);
    const Vec after = cartan_vector(apply_isometry(iso, a), apply_isometry(iso, b));
    CHECK((before - after).norm() == doctest::Approx(0).epsilon(1e-9));
  }
}

TEST_CASE("SPD validation: symmetry, positivity, determinant window") {
  Mat bad(2, 2);
  bad << 1, 0.5, 0.2, 1;  // not symmetric
  CHECK_THROWS_AS(SPDPoint::from_matrix(bad), InvalidInput);
  Mat neg(2, 2);
  neg << 1, 0, 0, -1;
  CHECK_THROWS_AS(SPDPoint::from_matrix(neg), InvalidInput);
  Mat far(2, 2);
  far << 2, 0, 0, 2;  // det 4, outside the window
  CHECK_THROWS_AS(SPDPoint::from_matrix(far), InvalidInput);
  Mat close(2, 2);
  close << 1.0000001, 0, 0, 1.0;  // within the window, renormalized
  const auto p = SPDPoint::from_matrix(close);
  CHECK(p.matrix().determinant() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("model config validation") {
  const auto model = ModelConfig::standard(3, {1, 2});
  CHECK(model.zeta(0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(model.zeta(1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(ModelConfig::standard(4, {1}), InvalidInput);  // not symmetric
  CHECK_NOTHROW(ModelConfig::standard(4, {2}));
  CHECK_NOTHROW(ModelConfig::standard(4, {1, 2, 3}));
  const auto m4 = ModelConfig::standard(4, {1, 3});
  CHECK(m4.block_sizes() == std::vector<int>{1, 2, 1});
  CHECK(std::abs(m4.zeta.sum()) < 1e-12);
}
