#include "core/spd.hpp"

#include <algorithm>
#include <cmath>

namespace morsekit {

std::pair<Vec, Mat> sym_eigs_desc(const Mat& s) {
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  if (es.info() != Eigen::Success)
    throw NoConvergence("symmetric eigensolver failed");
  const int n = static_cast<int>(s.rows());
  Vec vals(n);
  Mat vecs(n, n);
  for (int i = 0; i < n; ++i) {  // Eigen returns ascending order
    vals(i) = es.eigenvalues()(n - 1 - i);
    vecs.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return {vals, vecs};
}

Mat sym_power(const Mat& s, double t) {
  auto [vals, vecs] = sym_eigs_desc(s);
  Vec p(vals.size());
  for (int i = 0; i < vals.size(); ++i) {
    if (vals(i) <= 0.0) throw InvalidInput("matrix power needs positive eigenvalues");
    p(i) = std::pow(vals(i), t);
  }
  return vecs * p.asDiagonal() * vecs.transpose();
}

SPDPoint SPDPoint::from_matrix(const Mat& m, double tol_det, double tol_sym) {
  if (m.rows() != m.cols() || m.rows() < 2)
    throw InvalidInput("SPD point must be a square matrix of size >= 2");
  const double scale = std::max(1.0, m.norm());
  if ((m - m.transpose()).norm() > tol_sym * scale)
    throw InvalidInput("SPD point must be symmetric");
  Mat s = 0.5 * (m + m.transpose());
  auto [vals, vecs] = sym_eigs_desc(s);
  if (vals(vals.size() - 1) <= 0.0)
    throw InvalidInput("SPD point must be positive definite");
  double logdet = 0.0;
  for (int i = 0; i < vals.size(); ++i) logdet += std::log(vals(i));
  if (std::abs(logdet) > static_cast<double>(vals.size()) * tol_det * 4.0)
    throw InvalidInput("determinant too far from 1 to renormalize");
  return normalized(s);
}

SPDPoint SPDPoint::normalized(const Mat& m) {
  Mat s = 0.5 * (m + m.transpose());
  auto [vals, vecs] = sym_eigs_desc(s);
  if (vals(vals.size() - 1) <= 0.0)
    throw InvalidInput("matrix is not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < vals.size(); ++i) logdet += std::log(vals(i));
  const double shift = -logdet / static_cast<double>(vals.size());
  Vec v1(vals.size()), vh(vals.size()), vmh(vals.size());
  for (int i = 0; i < vals.size(); ++i) {
    const double lv = std::log(vals(i)) + shift;
    v1(i) = std::exp(lv);
    vh(i) = std::exp(0.5 * lv);
    vmh(i) = std::exp(-0.5 * lv);
  }
  SPDPoint p;
  p.m_ = vecs * v1.asDiagonal() * vecs.transpose();
  p.m_ = 0.5 * (p.m_ + p.m_.transpose());
  p.sqrt_ = vecs * vh.asDiagonal() * vecs.transpose();
  p.sqrt_ = 0.5 * (p.sqrt_ + p.sqrt_.transpose());
  p.inv_sqrt_ = vecs * vmh.asDiagonal() * vecs.transpose();
  p.inv_sqrt_ = 0.5 * (p.inv_sqrt_ + p.inv_sqrt_.transpose());
  return p;
}

SPDPoint SPDPoint::identity(int n) {
  SPDPoint p;
  p.m_ = Mat::Identity(n, n);
  p.sqrt_ = p.m_;
  p.inv_sqrt_ = p.m_;
  return p;
}

Isometry Isometry::from_matrix(const Mat& g, double tol_det) {
  if (g.rows() != g.cols() || g.rows() < 2)
    throw InvalidInput("isometry must be a square matrix of size >= 2");
  const double det = g.determinant();
  if (std::abs(det) < 1e-12) throw InvalidInput("isometry must be invertible");
  const double ad = std::abs(det);
  if (std::abs(ad - 1.0) > tol_det * 4.0 * static_cast<double>(g.rows()))
    throw InvalidInput("|det| too far from 1 to renormalize");
  Isometry iso;
  iso.g_ = g / std::pow(ad, 1.0 / static_cast<double>(g.rows()));
  return iso;
}

Isometry Isometry::rescaled(const Mat& g) {
  if (g.rows() != g.cols() || g.rows() < 2)
    throw InvalidInput("isometry must be a square matrix of size >= 2");
  const double ad = std::abs(g.determinant());
  if (ad < 1e-200) throw InvalidInput("isometry must be invertible");
  Isometry iso;
  iso.g_ = g / std::pow(ad, 1.0 / static_cast<double>(g.rows()));
  return iso;
}

Isometry Isometry::identity(int n) {
  Isometry iso;
  iso.g_ = Mat::Identity(n, n);
  return iso;
}

Isometry Isometry::inverse() const {
  Isometry iso;
  iso.g_ = g_.inverse();
  return iso;
}

Isometry Isometry::operator*(const Isometry& o) const {
  Isometry iso;
  iso.g_ = g_ * o.g_;
  return iso;
}

Vec cartan_vector(const SPDPoint& x, const SPDPoint& y) {
  if (x.n() != y.n()) throw InvalidInput("points of different size");
  const Mat rel = x.inv_sqrt() * y.matrix() * x.inv_sqrt();
  auto [vals, vecs] = sym_eigs_desc(0.5 * (rel + rel.transpose()));
  Vec v(vals.size());
  for (int i = 0; i < vals.size(); ++i) {
    if (vals(i) <= 0.0 || vals(0) > 1e16 * vals(i))
      throw InvalidInput(
          "relative position outside the representable dynamic range "
          "(points too far apart for double precision)");
    v(i) = std::log(vals(i));
  }
  std::sort(v.data(), v.data() + v.size(), std::greater<double>());
  return v;
}

double riem_distance(const SPDPoint& x, const SPDPoint& y) {
  return cartan_vector(x, y).norm();
}

SPDPoint geodesic_point(const SPDPoint& x, const SPDPoint& y, double t) {
  if (t == 0.0) return x;
  if (t == 1.0) return y;
  const Mat rel = x.inv_sqrt() * y.matrix() * x.inv_sqrt();
  const Mat p = sym_power(0.5 * (rel + rel.transpose()), t);
  return SPDPoint::normalized(x.sqrt() * p * x.sqrt());
}

SPDPoint midpoint(const SPDPoint& x, const SPDPoint& y) {
  return geodesic_point(x, y, 0.5);
}

RegularityReport theta_regular(const SPDPoint& x, const SPDPoint& y,
                               const ThetaSpec& theta, const Tolerances& tol) {
  RegularityReport r;
  r.cartan = cartan_vector(x, y);
  const double nrm = r.cartan.norm();
  if (nrm <= tol.eigengap)
    throw InvalidInput("theta_regular: coincident points");
  for (int d : theta.pattern) {
    if (r.cartan(d - 1) - r.cartan(d) <= tol.eigengap) r.degenerate = true;
  }
  r.margin = theta.margin(r.cartan / nrm);
  r.regular = !r.degenerate && r.margin >= 0.0;
  return r;
}

double finsler_distance(const SPDPoint& x, const SPDPoint& y,
                        const Vec& theta_bar) {
  if (theta_bar.size() != x.n())
    throw InvalidInput("finsler type vector has wrong length");
  if (!is_nonincreasing(theta_bar, 1e-12))
    throw InvalidInput("finsler type vector must be nonincreasing");
  if (std::abs(theta_bar.sum()) > 1e-9 || std::abs(theta_bar.norm() - 1.0) > 1e-9)
    throw InvalidInput("finsler type vector must be a unit trace-free vector");
  return theta_bar.dot(cartan_vector(x, y));
}

SPDPoint apply_isometry(const Isometry& g, const SPDPoint& x) {
  if (g.n() != x.n()) throw InvalidInput("isometry/point size mismatch");
  return SPDPoint::normalized(g.matrix() * x.matrix() * g.matrix().transpose());
}

}  // namespace morsekit
