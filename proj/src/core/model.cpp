#include "core/model.hpp"

#include <algorithm>
#include <cmath>

namespace morsekit {

void validate_pattern(int n, const std::vector<int>& pattern) {
  if (n < 2) throw InvalidInput("matrix size must be >= 2");
  if (pattern.empty()) throw InvalidInput("pattern must be nonempty");
  int prev = 0;
  for (int d : pattern) {
    if (d <= prev || d >= n)
      throw InvalidInput("pattern must be strictly increasing in (0, n)");
    prev = d;
  }
  // symmetry under d -> n - d, required for ι-invariance of the face type
  for (int d : pattern) {
    if (std::find(pattern.begin(), pattern.end(), n - d) == pattern.end())
      throw InvalidInput("pattern must be symmetric under d -> n - d");
  }
}

Vec opposition(const Vec& v) {
  Vec r(v.size());
  for (int i = 0; i < v.size(); ++i) r(i) = -v(v.size() - 1 - i);
  return r;
}

bool is_nonincreasing(const Vec& v, double tol) {
  for (int i = 0; i + 1 < v.size(); ++i)
    if (v(i + 1) > v(i) + tol) return false;
  return true;
}

Vec type_of(const Vec& v, double eigengap_tol) {
  const double nrm = v.norm();
  if (nrm <= eigengap_tol)
    throw InvalidInput("type of a (near-)zero vector is undefined");
  return v / nrm;
}

Vec block_step_vector(int n, const std::vector<int>& pattern) {
  validate_pattern(n, pattern);
  Vec v(n);
  const int k = static_cast<int>(pattern.size());
  int lo = 0;
  for (int j = 0; j <= k; ++j) {
    const int hi = (j < k) ? pattern[j] : n;
    const double c = static_cast<double>(k - 2 * j);  // k, k-2, ..., -k
    for (int i = lo; i < hi; ++i) v(i) = c;
    lo = hi;
  }
  return v;
}

double ThetaSpec::margin(const Vec& type) const {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pattern.size(); ++j) {
    const int d = pattern[j];
    worst = std::min(worst, type(d - 1) - type(d) - bounds[j]);
  }
  return worst;
}

double ThetaSpec::inclusion_margin(const ThetaSpec& wider) const {
  if (pattern != wider.pattern)
    throw InvalidInput("ThetaSpec inclusion needs identical patterns");
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < bounds.size(); ++j)
    worst = std::min(worst, bounds[j] - wider.bounds[j]);
  return worst;
}

ThetaSpec ThetaSpec::stage(const std::vector<int>& pattern, int i) {
  if (i < 1) throw InvalidInput("stage index must be >= 1");
  ThetaSpec t;
  t.pattern = pattern;
  t.bounds.assign(pattern.size(), 1.0 / static_cast<double>(i));
  return t;
}

void ThetaSpec::validate(int n) const {
  validate_pattern(n, pattern);
  if (bounds.size() != pattern.size())
    throw InvalidInput("ThetaSpec needs one bound per pattern entry");
  for (std::size_t j = 0; j < pattern.size(); ++j) {
    if (!(bounds[j] >= 0.0)) throw InvalidInput("ThetaSpec bounds must be >= 0");
    // ι-symmetry: the bound at d must equal the bound at n - d
    const int d_op = n - pattern[j];
    auto it = std::find(pattern.begin(), pattern.end(), d_op);
    const auto jj = static_cast<std::size_t>(it - pattern.begin());
    if (std::abs(bounds[j] - bounds[jj]) > 1e-12)
      throw InvalidInput("ThetaSpec bounds must be symmetric under d -> n - d");
  }
}

bool ThetaSpec::same_key(const ThetaSpec& o, double tol) const {
  if (pattern != o.pattern || bounds.size() != o.bounds.size()) return false;
  for (std::size_t j = 0; j < bounds.size(); ++j)
    if (std::abs(bounds[j] - o.bounds[j]) > tol) return false;
  return true;
}

std::vector<int> ModelConfig::block_sizes() const {
  std::vector<int> b;
  int lo = 0;
  for (int d : pattern) {
    b.push_back(d - lo);
    lo = d;
  }
  b.push_back(n - lo);
  return b;
}

ModelConfig ModelConfig::standard(int n, std::vector<int> pattern) {
  ModelConfig m;
  m.n = n;
  m.pattern = std::move(pattern);
  Vec v = block_step_vector(n, m.pattern);
  m.zeta = v / v.norm();
  m.finsler_type = m.zeta;
  m.validate();
  return m;
}

namespace {

void validate_type_vector(const Vec& v, int n, const std::vector<int>& pattern,
                          const char* name) {
  if (v.size() != n) throw InvalidInput(std::string(name) + ": wrong length");
  if (std::abs(v.sum()) > 1e-9 * std::max(1.0, v.norm()))
    throw InvalidInput(std::string(name) + ": must sum to zero");
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw InvalidInput(std::string(name) + ": must be a unit vector");
  if (!is_nonincreasing(v, 1e-12))
    throw InvalidInput(std::string(name) + ": must be nonincreasing");
  // block-constant with strict steps across pattern boundaries
  int lo = 0;
  std::vector<int> dims = pattern;
  dims.push_back(n);
  for (int d : dims) {
    for (int i = lo + 1; i < d; ++i)
      if (std::abs(v(i) - v(lo)) > 1e-9)
        throw InvalidInput(std::string(name) + ": must be constant on pattern blocks");
    if (d < n && !(v(d - 1) > v(d) + 1e-12))
      throw InvalidInput(std::string(name) + ": must strictly decrease across blocks");
    lo = d;
  }
  if ((v - opposition(v)).norm() > 1e-9)
    throw InvalidInput(std::string(name) + ": must be ι-invariant");
}

}  // namespace

void ModelConfig::validate() const {
  validate_pattern(n, pattern);
  validate_type_vector(zeta, n, pattern, "zeta");
  validate_type_vector(finsler_type, n, pattern, "finsler_type");
  if (!(tol.eigengap > 0 && tol.projection > 0 && tol.flag > 0 &&
        tol.transversality > 0 && tol.finsler_gap > 0 && tol.angle > 0))
    throw InvalidInput("tolerances must be strictly positive");
}

}  // namespace morsekit
