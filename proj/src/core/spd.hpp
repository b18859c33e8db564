#pragma once

// Points of the symmetric space, realized as positive-definite symmetric
// matrices of determinant one, with the invariant metric
//   <u, v>_x = tr(x^{-1} u x^{-1} v).
//
// The Cartan vector of a pair (x, y) is the nonincreasing vector of log
// eigenvalues of x^{-1/2} y x^{-1/2}; its Euclidean norm is the Riemannian
// distance.  Both are congruence invariants: for any g with |det g| = 1,
// the pair (g x g^T, g y g^T) has the same Cartan vector.

#include <Eigen/Dense>
#include <utility>

#include "core/model.hpp"

namespace morsekit {

class SPDPoint {
 public:
  SPDPoint() = default;  // empty; fill via a factory before use

  // Validates symmetry and positivity; renormalizes det to 1 when within the
  // relative window tol_det, rejects otherwise.
  static SPDPoint from_matrix(const Mat& m, double tol_det = 1e-6,
                              double tol_sym = 1e-9);
  // Internal constructor: symmetrizes and rescales to det 1 without a
  // window check.  For matrices produced by the library itself.
  static SPDPoint normalized(const Mat& m);
  static SPDPoint identity(int n);

  int n() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  const Mat& sqrt() const { return sqrt_; }
  const Mat& inv_sqrt() const { return inv_sqrt_; }

 private:
  Mat m_, sqrt_, inv_sqrt_;
};

class Isometry {
 public:
  // |det g| must be 1 within the relative window; g is rescaled to make it
  // exact.  Acts on points by x -> g x g^T.
  static Isometry from_matrix(const Mat& g, double tol_det = 1e-6);
  // Rescales any invertible matrix so |det| = 1 (no window check).
  static Isometry rescaled(const Mat& g);
  static Isometry identity(int n);

  int n() const { return static_cast<int>(g_.rows()); }
  const Mat& matrix() const { return g_; }
  Isometry inverse() const;
  Isometry operator*(const Isometry& o) const;

  Isometry() = default;  // empty; fill via a factory before use

 private:
  Mat g_;
};

// Unit tangent vector at a base point; w is the direction translated to the
// identity (w = x^{-1/2} dir x^{-1/2}, symmetric, trace 0, unit Frobenius
// norm), kept because inner products at x reduce to tr(w1 w2).
struct TangentSym {
  SPDPoint base;
  Mat dir;
  Mat w;
};

struct RegularityReport {
  bool regular = false;     // type in the window
  bool degenerate = false;  // some pattern gap below the eigengap tolerance
  double margin = 0.0;      // min over pattern roots of alpha(type) - bound
  Vec cartan;
};

// Symmetric eigendecomposition helpers (eigenvalues descending).
std::pair<Vec, Mat> sym_eigs_desc(const Mat& s);
Mat sym_power(const Mat& s, double t);  // s^t by eigendecomposition

Vec cartan_vector(const SPDPoint& x, const SPDPoint& y);
double riem_distance(const SPDPoint& x, const SPDPoint& y);

// x^{1/2} (x^{-1/2} y x^{-1/2})^t x^{1/2}; t in [0,1] interpolates, t = 1/2
// is the geodesic midpoint.  Values of t outside [0,1] extrapolate along the
// same geodesic.
SPDPoint geodesic_point(const SPDPoint& x, const SPDPoint& y, double t);
SPDPoint midpoint(const SPDPoint& x, const SPDPoint& y);

RegularityReport theta_regular(const SPDPoint& x, const SPDPoint& y,
                               const ThetaSpec& theta, const Tolerances& tol);

// Polyhedral Finsler distance of type theta_bar: the maximum over the
// permutation orbit of theta_bar paired against the Cartan vector.  Both
// vectors are sorted nonincreasing, so by the rearrangement inequality the
// maximum is their plain dot product.  (tests/oracles.hpp keeps the
// exhaustive-orbit version used to validate this shortcut.)
double finsler_distance(const SPDPoint& x, const SPDPoint& y,
                        const Vec& theta_bar);

SPDPoint apply_isometry(const Isometry& g, const SPDPoint& x);

}  // namespace morsekit
