#include "core/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/morse.hpp"
#include "core/synthetic.hpp"
#include "core/toml_lite.hpp"

namespace morsekit {

namespace {

bool bounds_match(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-9) return false;
  return true;
}

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

const StraightnessEntry* Calibration::find_straightness(
    const ThetaSpec& theta, const ThetaSpec& theta_prime, double delta) const {
  for (const auto& e : straightness) {
    if (bounds_match(e.theta, theta.bounds) &&
        bounds_match(e.theta_prime, theta_prime.bounds) &&
        std::abs(e.delta - delta) <= 1e-9)
      return &e;
  }
  return nullptr;
}

const PromotionEntry* Calibration::find_promotion(const ThetaSpec& theta,
                                                  const ThetaSpec& theta_prime,
                                                  double D, double L,
                                                  double A) const {
  const PromotionEntry* generic = nullptr;
  for (const auto& e : promotion) {
    if (!bounds_match(e.theta, theta.bounds) ||
        !bounds_match(e.theta_prime, theta_prime.bounds))
      continue;
    if (std::abs(e.D - D) <= 1e-9 && std::abs(e.L - L) <= 1e-9 &&
        std::abs(e.A - A) <= 1e-9)
      return &e;
    generic = &e;  // same windows, different datum: usable fallback
  }
  return generic;
}

const StraightnessEntry& Calibration::need_straightness(
    const ThetaSpec& theta, const ThetaSpec& theta_prime, double delta) const {
  const StraightnessEntry* e = find_straightness(theta, theta_prime, delta);
  if (!e)
    throw CalibrationMissing("no straightness entry for the requested windows "
                             "(calibration " + id + ")");
  return *e;
}

const PromotionEntry& Calibration::need_promotion(const ThetaSpec& theta,
                                                  const ThetaSpec& theta_prime,
                                                  double D, double L,
                                                  double A) const {
  const PromotionEntry* e = find_promotion(theta, theta_prime, D, L, A);
  if (!e)
    throw CalibrationMissing("no promotion entry for the requested datum "
                             "(calibration " + id + ")");
  return *e;
}

std::string Calibration::to_toml() const {
  std::ostringstream out;
  auto arr = [](const std::vector<double>& v) {
    return toml::serialize_value(toml::Value(v));
  };
  auto num = [](double v) { return toml::serialize_value(toml::Value(v)); };
  std::ostringstream body;
  body << "version = " << version << "\n";
  body << "n = " << n << "\n";
  body << "pattern = " << arr(std::vector<double>(pattern.begin(), pattern.end()))
       << "\n";
  body << "seed = " << static_cast<long long>(seed) << "\n";
  for (const auto& e : straightness) {
    body << "\n[[straightness]]\n";
    body << "theta = " << arr(e.theta) << "\n";
    body << "theta_prime = " << arr(e.theta_prime) << "\n";
    body << "delta = " << num(e.delta) << "\n";
    body << "eps = " << num(e.eps) << "\n";
    body << "ell = " << num(e.ell) << "\n";
    body << "spacing_c = " << num(e.spacing_c) << "\n";
  }
  for (const auto& e : promotion) {
    body << "\n[[promotion]]\n";
    body << "theta = " << arr(e.theta) << "\n";
    body << "theta_prime = " << arr(e.theta_prime) << "\n";
    body << "D = " << num(e.D) << "\n";
    body << "L = " << num(e.L) << "\n";
    body << "A = " << num(e.A) << "\n";
    body << "eps = " << num(e.eps) << "\n";
    body << "ell = " << num(e.ell) << "\n";
    body << "s = " << e.s << "\n";
    body << "S = " << e.S << "\n";
    body << "pair_threshold = " << num(e.pair_threshold) << "\n";
    body << "dist_slack = " << num(e.dist_slack) << "\n";
    body << "D_prime = " << num(e.D_prime) << "\n";
    body << "L_prime = " << num(e.L_prime) << "\n";
    body << "A_prime = " << num(e.A_prime) << "\n";
    body << "theta_second = " << arr(e.theta_second) << "\n";
    body << "chained = " << (e.chained ? 1 : 0) << "\n";
  }
  out << "id = \"cal-v" << version << "-" << fnv1a(body.str()) << "\"\n"
      << body.str();
  return out.str();
}

Calibration Calibration::from_toml(const std::string& text) {
  const toml::Document doc = toml::parse(text);
  Calibration cal;
  cal.version = static_cast<int>(doc.root.integer("version"));
  cal.id = doc.root.text("id");
  cal.n = static_cast<int>(doc.root.integer("n"));
  for (double d : doc.root.array("pattern"))
    cal.pattern.push_back(static_cast<int>(d));
  cal.seed = static_cast<std::uint64_t>(doc.root.integer("seed"));
  if (auto it = doc.arrays.find("straightness"); it != doc.arrays.end()) {
    for (const auto& t : it->second) {
      StraightnessEntry e;
      e.theta = t.array("theta");
      e.theta_prime = t.array("theta_prime");
      e.delta = t.number("delta");
      e.eps = t.number("eps");
      e.ell = t.number("ell");
      e.spacing_c = t.number("spacing_c");
      cal.straightness.push_back(e);
    }
  }
  if (auto it = doc.arrays.find("promotion"); it != doc.arrays.end()) {
    for (const auto& t : it->second) {
      PromotionEntry e;
      e.theta = t.array("theta");
      e.theta_prime = t.array("theta_prime");
      e.D = t.number("D");
      e.L = t.number("L");
      e.A = t.number("A");
      e.eps = t.number("eps");
      e.ell = t.number("ell");
      e.s = static_cast<int>(t.integer("s"));
      e.S = static_cast<int>(t.integer("S"));
      e.pair_threshold = t.number("pair_threshold");
      e.dist_slack = t.number("dist_slack");
      e.D_prime = t.number("D_prime");
      e.L_prime = t.number("L_prime");
      e.A_prime = t.number("A_prime");
      e.theta_second = t.array("theta_second");
      e.chained = t.integer("chained") != 0;
      cal.promotion.push_back(e);
    }
  }
  return cal;
}

Calibration Calibration::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open calibration file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_toml(ss.str());
}

void Calibration::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write calibration file " + path);
  out << to_toml();
}

// ---------------------------------------------------------------------------
// The sweep harness.
// ---------------------------------------------------------------------------

namespace {

struct ConclusionCheck {
  bool holds = false;
  double max_dist = 0;     // distance to the parallel set of the end flags
  double spacing_c = 0;    // fitted global spacing slope
};

// The straight-sequence conclusion at closeness delta: end flags are
// antipodal, every point is delta-close to their parallel set, projections
// march through nested theta_prime cones, and the global spacing slope is
// positive.
ConclusionCheck conclusion_holds(const PointSequence& seq,
                                 const ThetaSpec& theta_prime, double delta,
                                 double ell, const ModelConfig& model) {
  ConclusionCheck out;
  try {
    const SPDPoint& first = seq.points.front();
    const SPDPoint& last = seq.points.back();
    const FlagChain tau_plus =
        flag_of_segment(first, last, model.pattern, model.tol);
    const FlagChain tau_minus =
        flag_of_segment(last, first, model.pattern, model.tol);
    if (!antipodal(tau_minus, tau_plus, model.tol).antipodal) return out;
    const ParallelSet pset = parallel_set(tau_minus, tau_plus, model.tol);

    std::vector<SPDPoint> proj;
    for (const auto& p : seq.points) {
      const ProjectionResult r = project_to_parallel_set(p, pset, model.tol);
      out.max_dist = std::max(out.max_dist, r.distance);
      proj.push_back(r.point);
    }
    if (out.max_dist > delta) return out;

    for (std::size_t i = 0; i + 1 < proj.size(); ++i) {
      for (std::size_t j = i + 1; j < proj.size(); ++j) {
        if (!cone_membership(proj[i], tau_plus, proj[j], theta_prime, model.tol)
                 .verdict)
          return out;
        if (!cone_membership(proj[j], tau_minus, proj[i], theta_prime, model.tol)
                 .verdict)
          return out;
      }
    }

    double c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < seq.points.size(); ++i)
      for (std::size_t j = i + 1; j < seq.points.size(); ++j) {
        const double d = riem_distance(seq.points[i], seq.points[j]);
        c = std::min(c, (d + 2.0 * delta) /
                            (ell * static_cast<double>(j - i)));
      }
    out.spacing_c = c;
    out.holds = c > 0.0;
  } catch (const Error&) {
    out.holds = false;
  }
  return out;
}

struct StraightnessFit {
  double eps, ell, spacing_c;
};

StraightnessFit fit_straightness(const ModelConfig& model, const ThetaSpec& theta,
                                 const ThetaSpec& theta_prime, double delta,
                                 const CalibrateOptions& opt, Rng& rng) {
  const std::vector<double> eps_grid = {0.45, 0.35, 0.25, 0.18, 0.12, 0.08};
  const std::vector<double> ell_grid = {1.5, 2.0, 3.0, 4.0, 6.0};

  // worst-case segment types: near the window boundary and in the interior
  std::vector<Vec> types = {type_with_margin(model, theta, 0.02),
                            type_with_margin(model, theta, 0.10),
                            model.zeta};

  // Small spacing is worth more than a loose angle downstream (it bounds the
  // eigenvalue range of everything built on top), so sweep ell outermost.
  for (double ell : ell_grid) {
    for (double eps : eps_grid) {
      // keep the total extent inside the double-precision eigenvalue range
      const int len = std::max(
          4, std::min(opt.sequence_length,
                      1 + static_cast<int>(std::floor(18.0 / ell))));
      bool all_ok = true;
      double worst_c = std::numeric_limits<double>::infinity();
      for (int trial = 0; trial < opt.trials && all_ok; ++trial) {
        for (const Vec& ty : types) {
          const PointSequence seq = straight_sequence(
              model, ty, eps, ell, len, rng, trial % 2 ? 0.1 * delta : 0.0);
          const ConclusionCheck c =
              conclusion_holds(seq, theta_prime, delta, ell, model);
          if (!c.holds) {
            all_ok = false;
            break;
          }
          worst_c = std::min(worst_c, c.spacing_c);
        }
      }
      if (all_ok) {
        // back off for safety before recording
        return {0.8 * eps, 1.25 * ell, 0.8 * worst_c};
      }
    }
  }
  throw NoConvergence("straightness sweep found no passing cell");
}

// Two synthetic families back the promotion constants.  The budget family
// (geodesics at several speeds plus perturbed copies) drives the pair
// threshold, the distance slack and the promoted datum.  The scale family
// (clean geodesics at orbit-step speeds with light jitter) drives the
// quadruple scale; fitting the scale on heavily perturbed paths would blow
// up the enumeration length of the recognition stages, so completeness is
// deliberately relative to this family.
std::vector<DiscretePath> budget_family(const ModelConfig& model,
                                        const ThetaSpec& theta, double D,
                                        double L, Rng& rng) {
  std::vector<DiscretePath> fam;
  const std::vector<Vec> types = {type_with_margin(model, theta, 0.05),
                                  model.zeta};
  const std::vector<double> speeds = {1.0, 2.0, std::min(3.0, std::max(1.0, L))};
  for (const Vec& ty : types)
    for (double sp : speeds) {
      DiscretePath p = geodesic_path(model, ty, sp, 9, rng);
      fam.push_back(p);
      if (D > 0.0)
        fam.push_back(perturb_path(p, std::min(0.4 * D, 0.5), rng));
    }
  return fam;
}

std::vector<DiscretePath> scale_family(const ModelConfig& model,
                                       const ThetaSpec& theta, double ell_next,
                                       Rng& rng) {
  // Orbit-step speeds start just above the spacing threshold: slower actions
  // cannot satisfy the spacing half of the quadruple condition at any scale
  // and are outside the family the schedule is fitted for.
  std::vector<DiscretePath> fam;
  const std::vector<Vec> types = {type_with_margin(model, theta, 0.05),
                                  model.zeta};
  for (const Vec& ty : types)
    for (double factor : {1.15, 1.8}) {
      const double speed = factor * std::max(1.0, ell_next);
      // keep the half-extent inside the representable eigenvalue range
      const int len =
          std::max(4, std::min(7, 1 + static_cast<int>(std::floor(22.0 / speed))));
      if (speed * (len - 1) > 26.0)
        throw NoConvergence("scale family outside the representable range");
      DiscretePath p = geodesic_path(model, ty, speed, len, rng);
      fam.push_back(perturb_path(p, 0.05, rng));
    }
  return fam;
}

PromotionEntry fit_promotion(const ModelConfig& model, const ThetaSpec& theta,
                             const ThetaSpec& theta_prime,
                             const ThetaSpec& theta_second, double D, double L,
                             double A, const StraightnessEntry& next_straight,
                             const CalibrateOptions& opt, Rng& rng,
                             bool chained) {
  PromotionEntry e;
  e.theta = theta.bounds;
  e.theta_prime = theta_prime.bounds;
  e.D = D;
  e.L = L;
  e.A = A;
  e.theta_second = theta_second.bounds;
  e.chained = chained;

  const std::vector<DiscretePath> fam = budget_family(model, theta, D, L, rng);

  // pair threshold: smallest separation past which every family tip pair is
  // theta_prime-regular
  double c_min = 1.0;
  double worst_bound = 0.0;
  double fitted_L = 1.0, fitted_A = 0.0;
  for (const auto& p : fam) {
    const QuasiReport q = quasigeodesic_check(p, 1e6, 1e6, model.tol);
    fitted_L = std::max(fitted_L, q.fitted_L);
    fitted_A = std::max(fitted_A, q.fitted_A);
    const int n = static_cast<int>(p.samples.size());
    for (int i = 0; i < n; ++i)
      for (int j = i + 2; j < n; ++j) {
        const double d = riem_distance(p.samples[i], p.samples[j]);
        const Vec cv = cartan_vector(p.samples[i], p.samples[j]);
        bool reg = theta_prime.margin(cv / cv.norm()) >= 0.0;
        for (int dd : theta_prime.pattern)
          if (cv(dd - 1) - cv(dd) <= model.tol.eigengap) reg = false;
        if (!reg) {
          c_min = std::max(c_min, d);
          continue;
        }
        for (int t = i + 1; t < j; ++t) {
          const DiamondDistance b = diamond_distance_upper(
              p.samples[i], p.samples[j], p.samples[t], theta_prime,
              model.finsler_type, model.tol);
          if (std::isfinite(b.upper)) worst_bound = std::max(worst_bound, b.upper);
        }
      }
  }
  e.pair_threshold = 1.25 * c_min + 0.5;
  e.dist_slack = std::max(2.0 * worst_bound, 0.3) + 0.05;

  // Filter thresholds (eps, ell, s) for the quadruple stage.  Spacing and
  // scale are fit on the clean family; the angle allowance is the configured
  // filter_eps, far looser than the straightness-lemma rows because finite
  // orbits of genuinely Morse actions show midpoint corners of the order of
  // a radian at representable scales.  The stage filter only selects
  // candidates; soundness comes from the promoted re-check.
  const std::vector<DiscretePath> scales =
      scale_family(model, theta, next_straight.ell, rng);
  int s_fit = 0;
  double min_space = std::numeric_limits<double>::infinity();
  for (int s : {1, 2}) {
    double ms = std::numeric_limits<double>::infinity();
    bool ok = true;
    int tested = 0;
    for (const auto& p : scales) {
      if (p.t_end() - p.t_start < 3 * s) continue;
      const StraightnessReport r = quadruple_condition(
          p, theta_prime, opt.filter_eps, 0.0, s, model.zeta, model.tol);
      if (r.vacuous()) continue;
      ++tested;
      ms = std::min(ms, r.spacing_margin);  // = worst midpoint spacing
      if (!r.straight) ok = false;
    }
    if (tested > 0 && ok && ms > 0.5) {
      s_fit = s;
      min_space = ms;
      break;
    }
  }
  if (s_fit == 0)
    throw NoConvergence("quadruple-scale sweep found no passing scale");
  e.s = s_fit;
  e.S = std::max(2, 3 * s_fit);
  e.eps = opt.filter_eps;
  e.ell = 0.8 * min_space;

  // promoted datum: cover the family with margin
  e.D_prime = D + e.dist_slack + 0.25;
  e.L_prime = std::max(L, 1.3 * fitted_L + 0.3);
  e.A_prime = 2.0 * fitted_A + 2.0 * e.D_prime + 1.0;
  return e;
}

}  // namespace

Calibration calibrate(const ModelConfig& model, const CalibrateOptions& opt) {
  model.validate();
  Calibration cal;
  cal.version = 1;
  cal.n = model.n;
  cal.pattern = model.pattern;
  cal.seed = opt.seed;
  Rng rng(opt.seed);

  // straightness thresholds for consecutive stage windows (delta = 1)
  std::vector<StraightnessEntry> by_stage(static_cast<std::size_t>(opt.stage_max) + 3);
  for (int i = 1; i <= opt.stage_max + 2; ++i) {
    const ThetaSpec th = ThetaSpec::stage(model.pattern, i);
    const ThetaSpec thp = ThetaSpec::stage(model.pattern, i + 1);
    // skip (and flag) stages whose window misses even the interior type
    if (th.margin(model.zeta) < 0.0) {
      StraightnessEntry e;
      e.theta = th.bounds;
      e.theta_prime = thp.bounds;
      e.delta = 1.0;
      e.eps = 0.0;
      e.ell = std::numeric_limits<double>::infinity();
      by_stage[static_cast<std::size_t>(i)] = e;
      continue;
    }
    try {
      const StraightnessFit fit =
          fit_straightness(model, th, thp, 1.0, opt, rng);
      StraightnessEntry e;
      e.theta = th.bounds;
      e.theta_prime = thp.bounds;
      e.delta = 1.0;
      e.eps = fit.eps;
      e.ell = fit.ell;
      e.spacing_c = fit.spacing_c;
      by_stage[static_cast<std::size_t>(i)] = e;
      cal.straightness.push_back(e);
    } catch (const NoConvergence&) {
      // no passing cell at this window pair: leave the stage without entries
      StraightnessEntry e;
      e.theta = th.bounds;
      e.theta_prime = thp.bounds;
      e.delta = 1.0;
      e.ell = std::numeric_limits<double>::infinity();
      by_stage[static_cast<std::size_t>(i)] = e;
    }
  }

  // promotion entries for the stage data (D_i, L_i, A) = (i, i, 0) plus the
  // chained entries backing the promoted re-checks
  int prev_S = 2;
  for (int i = 1; i <= opt.stage_max; ++i) {
    const ThetaSpec th = ThetaSpec::stage(model.pattern, i);
    const ThetaSpec thp = ThetaSpec::stage(model.pattern, i + 1);
    const ThetaSpec ths = ThetaSpec::stage(model.pattern, i + 2);
    const StraightnessEntry& next_st = by_stage[static_cast<std::size_t>(i + 1)];
    if (!(next_st.ell < std::numeric_limits<double>::infinity())) continue;
    if (th.margin(model.zeta) < 0.0) continue;  // empty stage window
    try {
      PromotionEntry e =
          fit_promotion(model, th, thp, ths, static_cast<double>(i),
                        static_cast<double>(i), 0.0, next_st, opt, rng, false);
      e.S = std::max(e.S, prev_S);
      prev_S = e.S;

      const StraightnessEntry& next_st2 =
          by_stage[static_cast<std::size_t>(i + 2)];
      if (!(next_st2.ell < std::numeric_limits<double>::infinity()))
        continue;  // promoted re-check would have no thresholds; skip stage
      const ThetaSpec tht = ThetaSpec::stage(model.pattern, i + 3);
      PromotionEntry ch =
          fit_promotion(model, thp, ths, tht, e.D_prime, e.L_prime, e.A_prime,
                        next_st2, opt, rng, true);
      cal.promotion.push_back(e);
      cal.promotion.push_back(ch);
    } catch (const NoConvergence&) {
      continue;  // stage not coverable by the synthetic families
    }
  }

  // recompute the id from the final content
  const std::string body = cal.to_toml();
  cal = Calibration::from_toml(body);
  return cal;
}

}  // namespace morsekit
