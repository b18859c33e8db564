#include "core/schottky.hpp"

#include <algorithm>
#include <cmath>

#include "core/parallel.hpp"
#include "core/words.hpp"

namespace morsekit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

AxialPair generic_pair(const Isometry& alpha, const Isometry& beta,
                       const ModelConfig& model) {
  AxialPair pair;
  pair.alpha = alpha;
  pair.beta = beta;
  pair.tau_a_plus = attracting_flag(alpha, model.pattern, model.tol);
  pair.tau_a_minus = attracting_flag(alpha.inverse(), model.pattern, model.tol);
  pair.tau_b_plus = attracting_flag(beta, model.pattern, model.tol);
  pair.tau_b_minus = attracting_flag(beta.inverse(), model.pattern, model.tol);

  const FlagChain* flags[4] = {&pair.tau_a_plus, &pair.tau_a_minus,
                               &pair.tau_b_plus, &pair.tau_b_minus};
  int k = 0;
  pair.genericity_margin = kInf;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const AntipodalReport rep = antipodal(*flags[i], *flags[j], model.tol);
      pair.pair_margins[static_cast<std::size_t>(k++)] = rep.margin;
      pair.genericity_margin = std::min(pair.genericity_margin, rep.margin);
    }
  pair.generic = pair.genericity_margin > model.tol.transversality;
  return pair;
}

namespace {

Isometry power(const Isometry& g, int k) {
  Isometry out = Isometry::identity(g.n());
  Isometry base = k >= 0 ? g : g.inverse();
  for (int i = 0; i < std::abs(k); ++i) out = out * base;
  return out;
}

}  // namespace

std::array<SPDPoint, 4> midpoint_quadruple(const AxialPair& pair, int m, int n,
                                           const SPDPoint& x) {
  if (m < 1 || n < 1) throw InvalidInput("powers must be >= 1");
  return {midpoint(x, apply_isometry(power(pair.alpha, m), x)),
          midpoint(x, apply_isometry(power(pair.alpha, -m), x)),
          midpoint(x, apply_isometry(power(pair.beta, n), x)),
          midpoint(x, apply_isometry(power(pair.beta, -n), x))};
}

QuadrupleTestReport quadruple_test(const std::array<SPDPoint, 4>& pts,
                                   const SPDPoint& x, const ThetaSpec& theta,
                                   double eps, double ell, const Vec& zeta,
                                   const Tolerances& tol) {
  static const char* names[4] = {"y+", "y-", "z+", "z-"};
  QuadrupleTestReport rep;
  rep.spacing_margin = kInf;
  rep.regularity_margin = kInf;
  rep.angle_margin = kInf;
  for (int i = 0; i < 4; ++i) {
    if (riem_distance(pts[static_cast<std::size_t>(i)], x) <= tol.eigengap)
      throw InvalidInput("quadruple point coincides with the base point");
    for (int j = i + 1; j < 4; ++j) {
      const auto& a = pts[static_cast<std::size_t>(i)];
      const auto& b = pts[static_cast<std::size_t>(j)];
      const double d = riem_distance(a, b);
      if (d <= tol.eigengap) throw InvalidInput("coincident quadruple points");
      if (d - ell < rep.spacing_margin) {
        rep.spacing_margin = d - ell;
        if (d - ell < 0 && rep.witness.empty())
          rep.witness = std::string("spacing ") + names[i] + names[j];
      }
      double margin = -kInf;
      try {
        const Vec cv = cartan_vector(a, b);
        margin = theta.margin(cv / cv.norm());
        for (int dd : theta.pattern)
          if (cv(dd - 1) - cv(dd) <= tol.eigengap) margin = -kInf;
      } catch (const Error&) {
      }
      if (margin < rep.regularity_margin) {
        rep.regularity_margin = margin;
        if (margin < 0 && rep.witness.empty())
          rep.witness = std::string("regularity ") + names[i] + names[j];
      }
    }
  }
  // angle condition: at each midpoint the other three lie within eps of the
  // direction back to x
  for (int i = 0; i < 4 && rep.regularity_margin > -kInf; ++i) {
    const auto& w = pts[static_cast<std::size_t>(i)];
    FlagChain to_x;
    try {
      to_x = flag_of_segment(w, x, theta.pattern, tol);
    } catch (const DegenerateSegment&) {
      rep.angle_margin = -kInf;
      if (rep.witness.empty())
        rep.witness = std::string("degenerate segment to base at ") + names[i];
      break;
    }
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      double ang;
      try {
        ang = zeta_angle_to_point(w, to_x, pts[static_cast<std::size_t>(j)],
                                  zeta, tol);
      } catch (const DegenerateSegment&) {
        ang = kInf;
      }
      if (eps - ang < rep.angle_margin) {
        rep.angle_margin = eps - ang;
        if (eps - ang < 0 && rep.witness.empty())
          rep.witness = std::string("angle at ") + names[i] + " toward " + names[j];
      }
    }
  }
  rep.pass = rep.spacing_margin >= 0 && rep.regularity_margin >= 0 &&
             rep.angle_margin >= 0;
  return rep;
}

PowerSearchResult search_powers(const AxialPair& pair, const SPDPoint& x,
                                const ThetaSpec& theta, double eps, double ell,
                                int budget, bool independent,
                                const ModelConfig& model) {
  if (!pair.generic) throw InvalidInput("search_powers needs a generic pair");
  if (budget < 1) throw InvalidInput("budget must be >= 1");
  PowerSearchResult res;

  // powers whose midpoint configuration exceeds the representable
  // eigenvalue range cannot be tested; cap the schedule there
  auto log_spread = [](const Isometry& g) {
    Eigen::EigenSolver<Mat> es(g.matrix());
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < g.n(); ++i) {
      const double lm = std::log(std::abs(es.eigenvalues()(i)));
      lo = std::min(lo, lm);
      hi = std::max(hi, lm);
    }
    return hi - lo;
  };
  const double spread =
      std::max(log_spread(pair.alpha), std::max(log_spread(pair.beta), 1e-6));
  const int cap = std::max(
      1, std::min(budget, static_cast<int>(std::floor(16.0 / spread))));

  auto test = [&](int m, int n) {
    ++res.tested;
    try {
      return quadruple_test(midpoint_quadruple(pair, m, n, x), x, theta, eps,
                            ell, model.zeta, model.tol);
    } catch (const Error&) {
      QuadrupleTestReport r;  // out of numeric range: treated as a failure
      r.pass = false;
      r.witness = "configuration out of the representable range";
      r.spacing_margin = r.regularity_margin = r.angle_margin =
          -std::numeric_limits<double>::infinity();
      return r;
    }
  };

  // doubling until the symmetric test passes
  int hi = 1;
  QuadrupleTestReport at_hi = test(1, 1);
  int lo = 0;  // largest known-failing power
  while (!at_hi.pass && hi < cap) {
    lo = hi;
    hi = std::min(2 * hi, cap);
    at_hi = test(hi, hi);
  }
  if (!at_hi.pass) {
    res.best = at_hi;
    return res;  // exhausted, margins reported
  }
  // bisect to the smallest passing power on the schedule
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    const QuadrupleTestReport r = test(mid, mid);
    if (r.pass) {
      hi = mid;
      at_hi = r;
    } else {
      lo = mid;
    }
  }
  res.found = true;
  res.m = hi;
  res.n = hi;
  res.best = at_hi;

  if (independent) {
    // shrink each power separately while the test still passes
    for (int cand = res.n - 1; cand >= 1; --cand) {
      const QuadrupleTestReport r = test(res.m, cand);
      if (!r.pass) break;
      res.n = cand;
      res.best = r;
    }
    for (int cand = res.m - 1; cand >= 1; --cand) {
      const QuadrupleTestReport r = test(cand, res.n);
      if (!r.pass) break;
      res.m = cand;
      res.best = r;
    }
  }
  return res;
}

WordVerification verify_words(const AxialPair& pair, int m, int n,
                              const SPDPoint& x, int k, const MorseDatum& datum,
                              const ThetaSpec& theta_prime, double eps,
                              double ell, const PromotionEntry& cal,
                              const std::string& calibration_id,
                              const ModelConfig& model, int threads) {
  if (k < 1) throw InvalidInput("max word length must be >= 1");
  const Isometry gen[4] = {power(pair.alpha, m), power(pair.alpha, -m),
                           power(pair.beta, n), power(pair.beta, -n)};
  const auto words = reduced_words_up_to(2, k);

  struct PerWord {
    bool pass = true;
    double fitted_L = 1, fitted_A = 0;
    double ang = kInf, spc = kInf, reg = kInf, dia = kInf, qlo = kInf, qhi = kInf;
    double slope = kInf;
  };
  std::vector<PerWord> results(words.size());

  parallel_for(static_cast<long>(words.size()), threads, [&](long wi) {
    const std::vector<int>& w = words[static_cast<std::size_t>(wi)];
    PerWord& r = results[static_cast<std::size_t>(wi)];
    DiscretePath path;
    path.samples.push_back(x);
    Isometry prefix = Isometry::identity(model.n);
    for (int letter : w) {
      prefix = prefix * gen[letter];
      path.samples.push_back(apply_isometry(prefix, x));
    }
    // straightness of the midpoint sequence (vacuous below three midpoints)
    if (path.samples.size() >= 3) {
      PointSequence mids;
      for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
        mids.times.push_back(static_cast<int>(i));
        mids.points.push_back(midpoint(path.samples[i], path.samples[i + 1]));
      }
      const StraightnessReport sr =
          is_straight_spaced(mids, datum.theta, eps, ell, model.zeta, model.tol);
      r.ang = sr.angle_margin;
      r.spc = sr.spacing_margin;
      r.reg = sr.regularity_margin;
      if (!sr.straight) r.pass = false;
    }
    const Certificate cert =
        morse_check(path, datum, theta_prime, cal, calibration_id, model);
    r.dia = cert.diagnostics.at("diamond_margin");
    r.qlo = cert.diagnostics.at("qg_lower_margin");
    r.qhi = cert.diagnostics.at("qg_upper_margin");
    r.fitted_L = cert.diagnostics.at("fitted_L");
    r.fitted_A = cert.diagnostics.at("fitted_A");
    if (!cert.pass) r.pass = false;
    const int len = static_cast<int>(path.samples.size());
    for (int i = 0; i < len; ++i)
      for (int j = i + 1; j < len; ++j)
        r.slope = std::min(r.slope,
                           riem_distance(path.samples[static_cast<std::size_t>(i)],
                                         path.samples[static_cast<std::size_t>(j)]) /
                               static_cast<double>(j - i));
  });

  WordVerification out;
  out.pass = true;
  out.straight_angle_margin = kInf;
  out.straight_spacing_margin = kInf;
  out.straight_regularity_margin = kInf;
  out.diamond_margin = kInf;
  out.qg_lower_margin = kInf;
  out.qg_upper_margin = kInf;
  out.lower_slope = kInf;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const PerWord& r = results[i];
    ++out.words_checked;
    out.fitted_L = std::max(out.fitted_L, r.fitted_L);
    out.fitted_A = std::max(out.fitted_A, r.fitted_A);
    out.straight_angle_margin = std::min(out.straight_angle_margin, r.ang);
    out.straight_spacing_margin = std::min(out.straight_spacing_margin, r.spc);
    out.straight_regularity_margin =
        std::min(out.straight_regularity_margin, r.reg);
    out.diamond_margin = std::min(out.diamond_margin, r.dia);
    out.qg_lower_margin = std::min(out.qg_lower_margin, r.qlo);
    out.qg_upper_margin = std::min(out.qg_upper_margin, r.qhi);
    out.lower_slope = std::min(out.lower_slope, r.slope);
    if (!r.pass && out.pass) {
      out.pass = false;
      out.witness_word = word_name(words[i], 2);
    }
  }
  return out;
}

}  // namespace morsekit
