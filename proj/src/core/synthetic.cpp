#include "core/synthetic.hpp"

#include <cmath>

namespace morsekit {

namespace {

Mat sym_exp_local(const Mat& s) {
  auto [vals, vecs] = sym_eigs_desc(s);
  Vec e(vals.size());
  for (int i = 0; i < vals.size(); ++i) e(i) = std::exp(vals(i));
  return vecs * e.asDiagonal() * vecs.transpose();
}

Mat random_unit_tangent(int n, Rng& rng) {
  Mat w = rng.normal_matrix(n, n);
  w = 0.5 * (w + w.transpose());
  w -= (w.trace() / n) * Mat::Identity(n, n);
  return w / w.norm();
}

}  // namespace

SPDPoint exp_at(const SPDPoint& x, const Mat& w_translated, double t) {
  return SPDPoint::normalized(x.sqrt() * sym_exp_local(t * w_translated) *
                              x.sqrt());
}

Mat direction_of_type(const Vec& type, const Mat& frame) {
  return frame * type.asDiagonal() * frame.transpose();
}

Vec type_with_margin(const ModelConfig& model, const ThetaSpec& theta,
                     double target_margin) {
  // Move from the interior block-step type toward the fully degenerate
  // direction (all gaps closed at the first pattern root) until the worst
  // margin hits the target.
  const Vec inner = model.zeta;
  const double m0 = theta.margin(inner);
  if (m0 <= target_margin) return inner;  // already at or below the target
  // wall direction: collapse the first pattern gap of the block-step vector
  Vec wall = inner;
  const int d = theta.pattern.front();
  const double merged = 0.5 * (wall(d - 1) + wall(d));
  wall(d - 1) = merged;
  wall(d) = merged;
  wall = wall / wall.norm();
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double t = 0.5 * (lo + hi);
    Vec v = (1.0 - t) * inner + t * wall;
    v /= v.norm();
    if (theta.margin(v) > target_margin)
      lo = t;
    else
      hi = t;
  }
  Vec v = (1.0 - lo) * inner + lo * wall;
  return v / v.norm();
}

DiscretePath geodesic_path(const ModelConfig& model, const Vec& type,
                           double speed, int len, Rng& rng) {
  if (len < 2) throw InvalidInput("path length must be >= 2");
  const Mat frame = rng.rotation(model.n);
  const Mat w = direction_of_type(type, frame);
  // recentred around the middle sample, then moved by a mild isometry (a
  // rotation plus a short translation keeps the eigenvalue range tame)
  Mat shift = rng.normal_matrix(model.n, model.n);
  shift = 0.5 * (shift + shift.transpose());
  shift -= (shift.trace() / model.n) * Mat::Identity(model.n, model.n);
  const Isometry move = Isometry::rescaled(
      rng.rotation(model.n) * sym_power(sym_exp_local(0.3 * shift / shift.norm()), 0.5));
  DiscretePath path;
  const SPDPoint base = SPDPoint::identity(model.n);
  const double mid = 0.5 * speed * static_cast<double>(len - 1);
  for (int t = 0; t < len; ++t)
    path.samples.push_back(apply_isometry(
        move, exp_at(base, w, speed * static_cast<double>(t) - mid)));
  return path;
}

DiscretePath flat_turn_path(const ModelConfig& model, const Vec& type,
                            double speed, int len, int which_turn) {
  if (len < 3) throw InvalidInput("turned path needs length >= 3");
  const int n = model.n;
  // permutations of the type vector = the other chamber directions of the flat
  std::vector<Vec> dirs;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  do {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = type(perm[i]);
    if ((v - type).norm() > 1e-12) dirs.push_back(v);
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (dirs.empty()) throw InvalidInput("type has a trivial orbit");
  const Vec second = dirs[static_cast<std::size_t>(which_turn) % dirs.size()];

  DiscretePath path;
  const int half = len / 2;
  Vec pos = Vec::Zero(n);
  for (int t = 0; t < len; ++t) {
    Mat d = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) d(i, i) = std::exp(pos(i));
    path.samples.push_back(SPDPoint::normalized(d));
    pos += speed * (t < half ? type : second);
  }
  return path;
}

PointSequence straight_sequence(const ModelConfig& model, const Vec& type,
                                double eps, double ell, int len, Rng& rng,
                                double jitter) {
  if (len < 3) throw InvalidInput("sequence length must be >= 3");
  const int n = model.n;
  PointSequence seq;
  SPDPoint x = SPDPoint::identity(n);
  const Mat frame0 = rng.rotation(n);
  Mat w = direction_of_type(type, frame0);
  seq.times.push_back(0);
  seq.points.push_back(x);
  for (int t = 1; t < len; ++t) {
    SPDPoint next = exp_at(x, w, ell);
    if (t + 1 < len) {
      // prepare the outgoing direction at `next`: straight continuation
      // conjugated by a rotation chosen so the interior ζ-angle is π - eps
      const Mat rel = next.inv_sqrt() * x.matrix() * next.inv_sqrt();
      auto [vals, vecs] = sym_eigs_desc(0.5 * (rel + rel.transpose()));
      Vec lg(n);
      for (int i = 0; i < n; ++i) lg(i) = std::log(vals(i));
      Mat back = vecs * lg.asDiagonal() * vecs.transpose();  // toward x
      Mat straight = -back / back.norm();

      // rotation plane chosen pseudo-randomly, angle bisected to the target
      const int a = rng.uniform_int(0, n - 1);
      int b = rng.uniform_int(0, n - 2);
      if (b >= a) ++b;
      auto rotate = [&](double phi) {
        Mat k = Mat::Identity(n, n);
        k(a, a) = std::cos(phi);
        k(b, b) = std::cos(phi);
        k(a, b) = -std::sin(phi);
        k(b, a) = std::sin(phi);
        return Mat((k * straight * k.transpose()).eval());
      };
      const FlagChain back_flag =
          flag_of_segment(next, x, model.pattern, model.tol);
      auto angle_of = [&](double phi) {
        const SPDPoint probe = exp_at(next, rotate(phi), ell);
        return zeta_angle_to_point(next, back_flag, probe, model.zeta, model.tol);
      };
      double lo = 0.0, hi = 1.2;
      while (angle_of(hi) > M_PI - eps && hi < 3.0) hi += 0.4;
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (angle_of(mid) > M_PI - eps)
          lo = mid;
        else
          hi = mid;
      }
      w = rotate(lo);
    }
    x = next;
    seq.times.push_back(t);
    seq.points.push_back(x);
  }
  if (jitter > 0.0) {
    for (auto& p : seq.points)
      p = exp_at(p, random_unit_tangent(n, rng), jitter * rng.uniform());
  }
  // recentre at the middle point to halve the eigenvalue dynamic range
  const Mat g = seq.points[seq.points.size() / 2].inv_sqrt();
  for (auto& p : seq.points) p = SPDPoint::normalized(g * p.matrix() * g);
  return seq;
}

DiscretePath perturb_path(const DiscretePath& path, double eta, Rng& rng) {
  DiscretePath out = path;
  for (auto& p : out.samples)
    p = exp_at(p, random_unit_tangent(p.n(), rng), eta);
  return out;
}

PointSequence perturb_sequence(const PointSequence& seq, double eta, Rng& rng) {
  PointSequence out = seq;
  for (auto& p : out.points)
    p = exp_at(p, random_unit_tangent(p.n(), rng), eta);
  return out;
}

}  // namespace morsekit
