#include "core/flags.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/rng.hpp"

namespace morsekit {

namespace {

// Thin orthonormal basis of the column span.
Mat orthonormalize(const Mat& b) {
  Eigen::HouseholderQR<Mat> qr(b);
  Mat q = qr.householderQ() * Mat::Identity(b.rows(), b.cols());
  Mat r = qr.matrixQR().topRows(b.cols()).triangularView<Eigen::Upper>();
  for (int i = 0; i < b.cols(); ++i) {
    if (std::abs(r(i, i)) < 1e-12)
      throw InvalidInput("degenerate frame: columns not independent");
  }
  return q;
}

Mat projector(const Mat& q) { return q * q.transpose(); }

double largest_principal_angle(const Mat& q1, const Mat& q2) {
  Eigen::JacobiSVD<Mat> svd(q1.transpose() * q2);
  const double c = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
  return std::acos(c);
}

}  // namespace

void FlagChain::validate(double tol_orth, double tol_nest) const {
  if (basis.size() != pattern.size())
    throw InvalidInput("flag needs one basis per pattern entry");
  const int nn = n();
  validate_pattern(nn, pattern);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const Mat& q = basis[j];
    if (q.rows() != nn || q.cols() != pattern[j])
      throw InvalidInput("flag basis has wrong shape");
    if ((q.transpose() * q - Mat::Identity(q.cols(), q.cols())).norm() > tol_orth * 10)
      throw InvalidInput("flag basis not orthonormal");
    if (j > 0) {
      const Mat resid = basis[j - 1] - q * (q.transpose() * basis[j - 1]);
      if (resid.norm() > tol_nest)
        throw InvalidInput("flag subspaces not nested");
    }
  }
}

FlagChain FlagChain::standard(int n, const std::vector<int>& pattern) {
  validate_pattern(n, pattern);
  FlagChain f;
  f.pattern = pattern;
  for (int d : pattern) f.basis.push_back(Mat::Identity(n, n).leftCols(d));
  return f;
}

FlagChain FlagChain::standard_opposite(int n, const std::vector<int>& pattern) {
  validate_pattern(n, pattern);
  FlagChain f;
  f.pattern = pattern;
  for (int d : pattern) {
    Mat q = Mat::Zero(n, d);
    for (int i = 0; i < d; ++i) q(n - 1 - i, i) = 1.0;
    f.basis.push_back(q);
  }
  return f;
}

double flag_distance(const FlagChain& f1, const FlagChain& f2) {
  if (f1.pattern != f2.pattern)
    throw InvalidInput("flag distance needs identical patterns");
  double worst = 0.0;
  for (std::size_t j = 0; j < f1.basis.size(); ++j)
    worst = std::max(worst, largest_principal_angle(f1.basis[j], f2.basis[j]));
  return worst;
}

FlagChain apply_isometry(const Isometry& g, const FlagChain& f) {
  FlagChain out;
  out.pattern = f.pattern;
  for (const Mat& q : f.basis) out.basis.push_back(orthonormalize(g.matrix() * q));
  return out;
}

FlagChain flag_of_segment(const SPDPoint& x, const SPDPoint& y,
                          const std::vector<int>& pattern,
                          const Tolerances& tol) {
  const Mat rel = x.inv_sqrt() * y.matrix() * x.inv_sqrt();
  auto [vals, vecs] = sym_eigs_desc(0.5 * (rel + rel.transpose()));
  const int n = static_cast<int>(vals.size());
  validate_pattern(n, pattern);
  for (int d : pattern) {
    if (vals(d) <= 0.0 || vals(d - 1) <= 0.0 ||
        std::log(vals(d - 1)) - std::log(vals(d)) <= tol.eigengap)
      throw DegenerateSegment("segment has no gap at pattern index " +
                              std::to_string(d));
  }
  FlagChain f;
  f.pattern = pattern;
  for (int d : pattern)
    f.basis.push_back(orthonormalize(x.sqrt() * vecs.leftCols(d)));
  return f;
}

AntipodalReport antipodal(const FlagChain& f_minus, const FlagChain& f_plus,
                          const Tolerances& tol) {
  if (f_minus.pattern != f_plus.pattern)
    throw InvalidInput("antipodality needs identical patterns");
  const int n = f_minus.n();
  AntipodalReport rep;
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < f_minus.pattern.size(); ++j) {
    const int d = f_minus.pattern[j];
    // locate the level of dimension n - d in the (ι-symmetric) pattern
    auto it = std::find(f_plus.pattern.begin(), f_plus.pattern.end(), n - d);
    if (it == f_plus.pattern.end())
      throw InvalidInput("pattern not symmetric under d -> n - d");
    const auto jj = static_cast<std::size_t>(it - f_plus.pattern.begin());
    Mat stacked(n, n);
    stacked << f_minus.basis[j], f_plus.basis[jj];
    Eigen::JacobiSVD<Mat> svd(stacked);
    rep.margin = std::min(rep.margin, svd.singularValues().minCoeff());
  }
  rep.antipodal = rep.margin > tol.transversality;
  return rep;
}

namespace {

// Block values of zeta on the pattern blocks (validates block-constancy).
std::vector<double> block_values(const Vec& zeta, const std::vector<int>& pattern) {
  const int n = static_cast<int>(zeta.size());
  std::vector<int> dims = pattern;
  dims.push_back(n);
  std::vector<double> c;
  int lo = 0;
  for (int d : dims) {
    for (int i = lo + 1; i < d; ++i)
      if (std::abs(zeta(i) - zeta(lo)) > 1e-9)
        throw InvalidInput("zeta must be constant on pattern blocks");
    c.push_back(zeta(lo));
    lo = d;
  }
  return c;
}

// Direction toward the zeta-point of the flag, translated to the identity:
//   w = sum_j c_j (P_j - P_{j-1})
// with P_j the projector onto the x^{-1/2}-translate of the level-j subspace.
// Because zeta is block-constant this depends only on the subspaces, not on
// any adapted frame.
Mat zeta_w(const SPDPoint& x, const FlagChain& f, const Vec& zeta) {
  if (zeta.size() != f.n()) throw InvalidInput("zeta has wrong length");
  const int n = f.n();
  const std::vector<double> c = block_values(zeta, f.pattern);
  Mat w = Mat::Zero(n, n);
  Mat prev = Mat::Zero(n, n);
  for (std::size_t j = 0; j < f.basis.size(); ++j) {
    const Mat p = projector(orthonormalize(x.inv_sqrt() * f.basis[j]));
    w += c[j] * (p - prev);
    prev = p;
  }
  w += c.back() * (Mat::Identity(n, n) - prev);
  w = 0.5 * (w + w.transpose());
  const double nrm = w.norm();
  if (nrm < 1e-14) throw InvalidInput("zeta direction degenerate");
  return w / nrm;
}

}  // namespace

TangentSym zeta_direction(const SPDPoint& x, const FlagChain& f, const Vec& zeta) {
  TangentSym t;
  t.base = x;
  t.w = zeta_w(x, f, zeta);
  t.dir = x.sqrt() * t.w * x.sqrt();
  t.dir = 0.5 * (t.dir + t.dir.transpose());
  return t;
}

double zeta_angle(const SPDPoint& x, const FlagChain& f1, const FlagChain& f2,
                  const Vec& zeta) {
  const Mat w1 = zeta_w(x, f1, zeta);
  const Mat w2 = zeta_w(x, f2, zeta);
  const double c = std::clamp((w1 * w2).trace(), -1.0, 1.0);
  return std::acos(c);
}

double zeta_angle_to_point(const SPDPoint& x, const FlagChain& f,
                           const SPDPoint& y, const Vec& zeta,
                           const Tolerances& tol) {
  const FlagChain seg = flag_of_segment(x, y, f.pattern, tol);
  return zeta_angle(x, seg, f, zeta);
}

double ParallelSet::membership_residual(const SPDPoint& x) const {
  const Mat gi = transformer.matrix().inverse();
  const Mat y = gi * x.matrix() * gi.transpose();
  double off2 = 0.0;
  int lo_r = 0;
  for (std::size_t a = 0; a < block_dims.size(); ++a) {
    int lo_c = 0;
    for (std::size_t b = 0; b < block_dims.size(); ++b) {
      if (a != b)
        off2 += y.block(lo_r, lo_c, block_dims[a], block_dims[b]).squaredNorm();
      lo_c += block_dims[b];
    }
    lo_r += block_dims[a];
  }
  return std::sqrt(off2);
}

ParallelSet parallel_set(const FlagChain& f_minus, const FlagChain& f_plus,
                         const Tolerances& tol) {
  const AntipodalReport rep = antipodal(f_minus, f_plus, tol);
  if (!rep.antipodal)
    throw InvalidInput("parallel set needs antipodal flags (margin " +
                       std::to_string(rep.margin) + ")");
  const int n = f_plus.n();
  const std::vector<int>& pat = f_plus.pattern;
  const int k = static_cast<int>(pat.size());

  auto level_of = [&](const FlagChain& f, int dim) -> const Mat& {
    auto it = std::find(f.pattern.begin(), f.pattern.end(), dim);
    if (it == f.pattern.end()) throw InvalidInput("missing flag level");
    return f.basis[static_cast<std::size_t>(it - f.pattern.begin())];
  };

  ParallelSet ps;
  ps.minus = f_minus;
  ps.plus = f_plus;
  Mat g(n, n);
  int col = 0;
  for (int j = 0; j <= k; ++j) {
    const int d_lo = (j == 0) ? 0 : pat[j - 1];
    const int d_hi = (j == k) ? n : pat[j];
    const int bj = d_hi - d_lo;
    Mat block(n, bj);
    if (j == 0) {
      block = level_of(f_plus, pat[0]);
    } else if (j == k) {
      block = level_of(f_minus, n - pat[k - 1]);
    } else {
      // intersection plus^(d_hi) ∩ minus^(n - d_lo): kernel directions of
      // 2I - P_plus - P_minus (the b_j smallest eigenvectors)
      const Mat pp = projector(level_of(f_plus, d_hi));
      const Mat pm = projector(level_of(f_minus, n - d_lo));
      Mat m = 2.0 * Mat::Identity(n, n) - pp - pm;
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
      if (es.info() != Eigen::Success)
        throw NoConvergence("eigensolver failed in parallel_set");
      block = es.eigenvectors().leftCols(bj);
    }
    g.middleCols(col, bj) = block;
    col += bj;
    ps.block_dims.push_back(bj);
  }
  ps.transformer = Isometry::rescaled(g);
  return ps;
}

namespace {

Mat block_truncate(const Mat& m, const std::vector<int>& dims) {
  Mat out = Mat::Zero(m.rows(), m.cols());
  int lo = 0;
  for (int b : dims) {
    out.block(lo, lo, b, b) = m.block(lo, lo, b, b);
    lo += b;
  }
  return out;
}

Mat sym_log(const Mat& s) {
  auto [vals, vecs] = sym_eigs_desc(s);
  Vec l(vals.size());
  for (int i = 0; i < vals.size(); ++i) {
    if (vals(i) <= 0.0) throw InvalidInput("matrix log needs positive eigenvalues");
    l(i) = std::log(vals(i));
  }
  return vecs * l.asDiagonal() * vecs.transpose();
}

Mat sym_exp(const Mat& s) {
  auto [vals, vecs] = sym_eigs_desc(s);
  Vec e(vals.size());
  for (int i = 0; i < vals.size(); ++i) e(i) = std::exp(vals(i));
  return vecs * e.asDiagonal() * vecs.transpose();
}

double dist2_spd(const SPDPoint& a, const Mat& b) {
  const Mat rel = a.inv_sqrt() * b * a.inv_sqrt();
  return sym_log(0.5 * (rel + rel.transpose())).squaredNorm();
}

}  // namespace

ProjectionResult project_to_parallel_set(const SPDPoint& x, const ParallelSet& p,
                                         const Tolerances& tol) {
  // Pull back by the transformer; in those coordinates the set is exactly the
  // block-diagonal points and the projection is the Riemannian minimizer of
  // the (geodesically convex) squared distance.  Gradient descent with
  // Barzilai-Borwein steps and an Armijo safeguard; a stationary point on a
  // totally geodesic submanifold of a Hadamard space is the global minimum.
  const Mat gi = p.transformer.matrix().inverse();
  const SPDPoint y = SPDPoint::normalized(gi * x.matrix() * gi.transpose());

  SPDPoint s = SPDPoint::normalized(block_truncate(y.matrix(), p.block_dims));
  double f = dist2_spd(s, y.matrix());
  int it = 0;
  double gnorm = 0.0;
  Mat w_prev;
  double step_prev = 0.0;
  double step0 = 1.0 / (1.0 + 0.5 * std::sqrt(f));
  for (; it < tol.projection_iters; ++it) {
    // Riemannian gradient of 1/2 d^2(., y) at s is -Log_s(y); its projection
    // onto the submanifold is the block truncation (the trace part vanishes
    // because both determinants are 1).
    const Mat rel = s.inv_sqrt() * y.matrix() * s.inv_sqrt();
    const Mat log_rel = sym_log(0.5 * (rel + rel.transpose()));
    const Mat w0 = block_truncate(log_rel, p.block_dims);  // at identity, translated
    gnorm = w0.norm();
    if (gnorm <= tol.projection) break;

    double step = step0;
    if (it > 0 && step_prev > 0.0) {
      // BB1 step from the last gradient pair (identity transport; the steps
      // are short so the distortion is second order):
      //   t = <s, s> / <s, dg>,  s = step_prev * w_prev,  dg = w_prev - w0
      const double denom =
          step_prev * ((w_prev - w0).array() * w_prev.array()).sum();
      if (denom > 1e-300) {
        step = std::clamp(step_prev * step_prev * w_prev.squaredNorm() / denom,
                          1e-4, 1e4);
      }
    }
    bool accepted = false;
    while (step > 1e-14) {
      const Mat cand = s.sqrt() * sym_exp(step * w0) * s.sqrt();
      const double fc = dist2_spd(SPDPoint::normalized(cand), y.matrix());
      if (fc <= f - 1e-4 * step * gnorm * gnorm) {
        s = SPDPoint::normalized(block_truncate(cand, p.block_dims));
        f = fc;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled at numerical floor
    w_prev = w0;
    step_prev = step;
  }
  if (gnorm > std::max(tol.projection, 1e-6))
    throw NoConvergence("parallel-set projection did not converge (grad " +
                        std::to_string(gnorm) + ")");
  ProjectionResult res{SPDPoint::normalized(p.transformer.matrix() * s.matrix() *
                                            p.transformer.matrix().transpose()),
                       0.0, it, gnorm};
  res.distance = riem_distance(x, res.point);
  return res;
}

ConeDefect cone_membership(const SPDPoint& apex, const FlagChain& f,
                           const SPDPoint& z, const ThetaSpec& theta,
                           const Tolerances& tol) {
  ConeDefect d;
  Vec cv;
  try {
    cv = cartan_vector(apex, z);
  } catch (const Error&) {
    d.degenerate = true;
    d.flag_mismatch = 3.14159265358979323846;
    return d;
  }
  if (cv.norm() <= tol.eigengap) {
    d.degenerate = true;
    d.flag_mismatch = 3.14159265358979323846;
    return d;
  }
  d.type_margin = theta.margin(cv / cv.norm());
  try {
    const FlagChain seg = flag_of_segment(apex, z, f.pattern, tol);
    d.flag_mismatch = flag_distance(seg, f);
  } catch (const DegenerateSegment&) {
    d.degenerate = true;
    d.flag_mismatch = 3.14159265358979323846;
    return d;
  }
  d.verdict = !d.degenerate && d.flag_mismatch <= tol.flag && d.type_margin >= 0.0;
  return d;
}

DiamondDefect diamond_defect(const SPDPoint& x, const SPDPoint& y,
                             const SPDPoint& z, const ThetaSpec& theta,
                             const Vec& theta_bar, const Tolerances& tol) {
  const double dxy = finsler_distance(x, y, theta_bar);
  if (riem_distance(x, y) <= tol.eigengap)
    throw InvalidInput("diamond_defect: coincident tips");
  DiamondDefect d;
  d.finsler_gap = finsler_distance(x, z, theta_bar) +
                  finsler_distance(z, y, theta_bar) - dxy;
  const double coincide = 1e-8 * (1.0 + riem_distance(x, y));
  bool margins_ok = true;
  if (riem_distance(x, z) <= coincide) {
    d.skipped_xz = true;  // tips belong to the diamond
  } else {
    const Vec cv = cartan_vector(x, z);
    d.margin_xz = theta.margin(cv / cv.norm());
    margins_ok = margins_ok && d.margin_xz >= 0.0;
  }
  if (riem_distance(z, y) <= coincide) {
    d.skipped_zy = true;
  } else {
    const Vec cv = cartan_vector(z, y);
    d.margin_zy = theta.margin(cv / cv.norm());
    margins_ok = margins_ok && d.margin_zy >= 0.0;
  }
  d.member = margins_ok &&
             d.finsler_gap <= tol.finsler_gap * std::max(1.0, std::abs(dxy));
  return d;
}

namespace {

// Feasibility of a flat coordinate w for the Θ cone anchored at the origin in
// a flat whose chamber order is the coordinate order: the smallest top-block
// entry must clear the largest bottom-block entry by the root bound (scaled
// by |w|).  Nonnegative = inside.
double cone_feasibility(const Vec& w, const ThetaSpec& theta) {
  const double nrm = w.norm();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < theta.pattern.size(); ++j) {
    const int d = theta.pattern[j];
    const double top = w.head(d).minCoeff();
    const double bot = w.tail(w.size() - d).maxCoeff();
    worst = std::min(worst, top - bot - theta.bounds[j] * nrm);
  }
  return worst;
}

double diamond_feasibility(const Vec& u, const Vec& v2, const ThetaSpec& theta) {
  return std::min(cone_feasibility(u, theta),
                  cone_feasibility(Vec(v2 - u), theta));
}

}  // namespace

DiamondDistance diamond_distance_upper(const SPDPoint& x1, const SPDPoint& x2,
                                       const SPDPoint& z, const ThetaSpec& theta,
                                       const Vec& theta_bar, const Tolerances& tol,
                                       double early_accept) {
  DiamondDistance out;
  const Vec cv = cartan_vector(x1, x2);
  const double nrm = cv.norm();
  if (nrm <= tol.eigengap) throw InvalidInput("coincident tips");
  out.tips_regular = theta.margin(cv / nrm) >= 0.0;
  for (int d : theta.pattern)
    if (cv(d - 1) - cv(d) <= tol.eigengap) out.tips_regular = false;
  if (!out.tips_regular) {
    out.upper = std::numeric_limits<double>::infinity();
    return out;
  }

  const DiamondDefect dd = diamond_defect(x1, x2, z, theta, theta_bar, tol);
  if (dd.member) {
    out.exact_member = true;
    out.upper = 0.0;
    return out;
  }

  // Distance to the tip geodesic: the Riemannian segment is contained in the
  // diamond once the tips are Θ-regular, and d(z, .) is convex along it, so
  // a ternary search gives a valid (cheap) upper bound.
  {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 36; ++i) {
      const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
      if (riem_distance(z, geodesic_point(x1, x2, a)) <=
          riem_distance(z, geodesic_point(x1, x2, b)))
        hi = b;
      else
        lo = a;
    }
    out.upper = riem_distance(z, geodesic_point(x1, x2, 0.5 * (lo + hi)));
    if (early_accept >= 0.0 && out.upper <= early_accept) return out;
  }

  // Project z onto the maximal flat through the tips, then clamp the flat
  // coordinates into the diamond polytope.  Both moves give valid one-sided
  // upper bounds by the triangle inequality.
  const Mat rel = x1.inv_sqrt() * x2.matrix() * x1.inv_sqrt();
  auto [vals, vecs] = sym_eigs_desc(0.5 * (rel + rel.transpose()));
  const int n = static_cast<int>(vals.size());
  Vec lambda(n);
  for (int i = 0; i < n; ++i) lambda(i) = std::log(vals(i));

  ParallelSet flat;
  flat.minus = FlagChain::standard_opposite(n, theta.pattern);
  flat.plus = FlagChain::standard(n, theta.pattern);
  flat.transformer = Isometry::rescaled(x1.sqrt() * vecs);
  flat.block_dims.assign(n, 1);

  const ProjectionResult proj = project_to_parallel_set(z, flat, tol);
  const Mat gi = flat.transformer.matrix().inverse();
  const Mat s = gi * proj.point.matrix() * gi.transpose();
  Vec u(n);
  for (int i = 0; i < n; ++i) u(i) = std::log(s(i, i));

  if (diamond_feasibility(u, lambda, theta) >= 0.0) {
    out.upper = std::min(out.upper, proj.distance);
    return out;
  }
  const Vec mid = 0.5 * lambda;
  if (diamond_feasibility(mid, lambda, theta) < 0.0) {
    // tip segment too marginal for the clamp anchor; keep the geodesic bound
    return out;
  }
  double t_lo = 0.0, t_hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double t = 0.5 * (t_lo + t_hi);
    if (diamond_feasibility(Vec(u + t * (mid - u)), lambda, theta) >= 0.0)
      t_hi = t;
    else
      t_lo = t;
  }
  out.upper = std::min(out.upper, proj.distance + t_hi * (mid - u).norm());
  return out;
}

FlagChain attracting_flag(const Isometry& g, const std::vector<int>& pattern,
                          const Tolerances& tol) {
  const int n = g.n();
  validate_pattern(n, pattern);
  // modulus gaps at pattern indices
  Eigen::EigenSolver<Mat> es(g.matrix());
  if (es.info() != Eigen::Success) throw NoConvergence("eigensolver failed");
  std::vector<double> logmod(n);
  for (int i = 0; i < n; ++i) logmod[i] = std::log(std::abs(es.eigenvalues()(i)));
  std::sort(logmod.begin(), logmod.end(), std::greater<double>());
  double min_gap = std::numeric_limits<double>::infinity();
  double spread = logmod.front() - logmod.back();
  for (int d : pattern) {
    const double gap = logmod[d - 1] - logmod[d];
    if (gap <= tol.eigengap)
      throw InvalidInput("eigenvalue modulus tie at pattern index " +
                         std::to_string(d));
    min_gap = std::min(min_gap, gap);
  }

  // Adaptive squaring: doubles the modulus gaps while keeping the dynamic
  // range of h small enough that the weakest level survives in double
  // precision.
  Mat h = g.matrix() / g.matrix().norm();
  double gap = min_gap;
  while (gap < 2.0 && 2.0 * spread < 30.0) {
    h = h * h;
    h /= h.norm();
    gap *= 2.0;
    spread *= 2.0;
  }

  // Simultaneous orthogonal iteration from a fixed generic start.  A generic
  // start makes the leading columns pick up the dominant generalized
  // eigenspaces in modulus order; coordinate starts can lock onto a wrong
  // (unsorted) invariant filtration.
  Rng rng(0x5eedf1a6u);
  Mat v = rng.rotation(n);
  const int iters = std::min(200000, static_cast<int>(std::ceil(45.0 / gap)) + 60);
  for (int i = 0; i < iters; ++i) v = orthonormalize(h * v);

  FlagChain f;
  f.pattern = pattern;
  for (int d : pattern) {
    const Mat vd = v.leftCols(d);
    // invariance residual of the span under the original map
    const Mat img = g.matrix() * vd;
    const Mat resid = img - vd * (vd.transpose() * img);
    Eigen::JacobiSVD<Mat> svd(img);
    if (resid.norm() > 1e-7 * svd.singularValues().minCoeff())
      throw NoConvergence("dominant subspace iteration did not settle");
    // certificate that the captured moduli are the top-d ones
    double want = 0.0;
    for (int i = 0; i < d; ++i) want += logmod[i];
    const double got = std::log(std::abs((vd.transpose() * img).determinant()));
    if (std::abs(got - want) > 1e-6 * (1.0 + std::abs(want)) + 1e-8)
      throw NoConvergence("subspace iteration captured a non-dominant filtration");
    f.basis.push_back(vd);
  }
  return f;
}

}  // namespace morsekit
