#include "core/morse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace morsekit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

QuasiReport quasigeodesic_check(const DiscretePath& path, double L, double A,
                                const Tolerances& tol) {
  path.validate();
  if (L < 1.0) throw InvalidInput("quasi-isometry constant L must be >= 1");
  QuasiReport rep;
  rep.lower_margin = kInf;
  rep.upper_margin = kInf;
  const int n = static_cast<int>(path.samples.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dt = static_cast<double>(j - i);
      const double d = riem_distance(path.samples[i], path.samples[j]);
      const double lo = d - (dt / L - A);
      const double hi = (L * dt + A) - d;
      if (lo < rep.lower_margin) {
        rep.lower_margin = lo;
        if (lo < -tol.quasi) {
          rep.witness_t1 = path.t_start + i;
          rep.witness_t2 = path.t_start + j;
        }
      }
      if (hi < rep.upper_margin) {
        rep.upper_margin = hi;
        if (hi < -tol.quasi) {
          rep.witness_t1 = path.t_start + i;
          rep.witness_t2 = path.t_start + j;
        }
      }
      rep.fitted_L = std::max(rep.fitted_L, d / dt);
    }
  }
  // smallest additive constant for the fitted multiplicative one
  double a_fit = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double dt = static_cast<double>(j - i);
      const double d = riem_distance(path.samples[i], path.samples[j]);
      a_fit = std::max(a_fit, dt / rep.fitted_L - d);
    }
  rep.fitted_A = a_fit;
  rep.pass = rep.lower_margin >= -tol.quasi && rep.upper_margin >= -tol.quasi;
  return rep;
}

Certificate morse_check(const DiscretePath& path, const MorseDatum& m,
                        const ThetaSpec& theta_prime, const PromotionEntry& cal,
                        const std::string& calibration_id,
                        const ModelConfig& model) {
  path.validate();
  m.validate(model.n);
  theta_prime.validate(model.n);
  if (m.theta.inclusion_margin(theta_prime) <= 0.0)
    throw InvalidInput("morse_check needs theta strictly inside theta_prime");

  Certificate cert;
  cert.kind = "morse_path";
  cert.datum = m;
  cert.theta_prime = theta_prime;
  cert.tol = model.tol;
  cert.calibration_id = calibration_id;

  const QuasiReport qg = quasigeodesic_check(path, m.L, m.A, model.tol);
  cert.diagnostics["qg_lower_margin"] = qg.lower_margin;
  cert.diagnostics["qg_upper_margin"] = qg.upper_margin;
  cert.diagnostics["fitted_L"] = qg.fitted_L;
  cert.diagnostics["fitted_A"] = qg.fitted_A;

  const double budget = m.D + cal.dist_slack;
  cert.diagnostics["diamond_budget"] = budget;
  cert.diagnostics["pair_threshold"] = cal.pair_threshold;

  double worst_diamond = kInf;
  long pairs_checked = 0, points_checked = 0;
  bool diamonds_ok = true;
  const int n = static_cast<int>(path.samples.size());
  for (int i = 0; i < n && diamonds_ok; ++i) {
    for (int j = i + 2; j < n && diamonds_ok; ++j) {
      if (riem_distance(path.samples[i], path.samples[j]) < cal.pair_threshold)
        continue;  // short pairs are exempt from the diamond test
      ++pairs_checked;
      for (int t = i + 1; t < j; ++t) {
        ++points_checked;
        const DiamondDistance dist = diamond_distance_upper(
            path.samples[i], path.samples[j], path.samples[t], theta_prime,
            model.finsler_type, model.tol, budget);
        const double margin = budget - dist.upper;
        if (margin < worst_diamond) {
          worst_diamond = margin;
          if (margin < 0) {
            cert.witness = "pair (" + std::to_string(path.t_start + i) + "," +
                           std::to_string(path.t_start + j) + ") sample " +
                           std::to_string(path.t_start + t);
          }
        }
        if (!dist.tips_regular || margin < 0) {
          diamonds_ok = false;
          break;
        }
      }
    }
  }
  cert.diagnostics["diamond_margin"] = worst_diamond;
  cert.diagnostics["pairs_checked"] = static_cast<double>(pairs_checked);
  cert.diagnostics["points_checked"] = static_cast<double>(points_checked);
  cert.pass = qg.pass && diamonds_ok;
  if (!qg.pass && cert.witness.empty())
    cert.witness = "quasi-isometry bound at (" + std::to_string(qg.witness_t1) +
                   "," + std::to_string(qg.witness_t2) + ")";
  return cert;
}

Certificate local_morse_check(const DiscretePath& path, const MorseDatum& m,
                              int S, const ThetaSpec& theta_prime,
                              const PromotionEntry& cal,
                              const std::string& calibration_id,
                              const ModelConfig& model) {
  if (S < 2) throw InvalidInput("local scale S must be >= 2");
  path.validate();
  const int len = path.t_end() - path.t_start;

  Certificate cert;
  cert.kind = "local_morse";
  cert.datum = m;
  cert.theta_prime = theta_prime;
  cert.scale = S;
  cert.tol = model.tol;
  cert.calibration_id = calibration_id;

  if (len <= S) {
    cert = morse_check(path, m, theta_prime, cal, calibration_id, model);
    cert.kind = "local_morse";
    cert.scale = S;
    cert.diagnostics["windows_checked"] = 1;
    cert.diagnostics["degenerate_domain"] = 1;  // shorter than the window
    return cert;
  }

  double worst_diamond = kInf, worst_lo = kInf, worst_hi = kInf;
  long windows = 0;
  bool pass = true;
  for (int t0 = path.t_start; t0 + S <= path.t_end(); ++t0) {
    const DiscretePath w = path.window(t0, t0 + S);
    const Certificate c =
        morse_check(w, m, theta_prime, cal, calibration_id, model);
    ++windows;
    worst_diamond = std::min(worst_diamond, c.diagnostics.at("diamond_margin"));
    worst_lo = std::min(worst_lo, c.diagnostics.at("qg_lower_margin"));
    worst_hi = std::min(worst_hi, c.diagnostics.at("qg_upper_margin"));
    if (!c.pass) {
      pass = false;
      cert.witness = "window [" + std::to_string(t0) + "," +
                     std::to_string(t0 + S) + "]: " + c.witness;
      break;
    }
  }
  cert.diagnostics["windows_checked"] = static_cast<double>(windows);
  cert.diagnostics["diamond_margin"] = worst_diamond;
  cert.diagnostics["qg_lower_margin"] = worst_lo;
  cert.diagnostics["qg_upper_margin"] = worst_hi;
  cert.pass = pass;
  return cert;
}

Certificate certify_local_to_global(const DiscretePath& path,
                                    const MorseDatum& m,
                                    const ThetaSpec& theta_prime,
                                    const Calibration& cal,
                                    const ModelConfig& model) {
  const PromotionEntry& entry =
      cal.need_promotion(m.theta, theta_prime, m.D, m.L, m.A);

  Certificate local = local_morse_check(path, m, entry.S, theta_prime, entry,
                                        cal.id, model);
  if (!local.pass) return local;

  MorseDatum promoted;
  promoted.theta = theta_prime;
  promoted.D = entry.D_prime;
  promoted.L = entry.L_prime;
  promoted.A = entry.A_prime;

  ThetaSpec theta_second;
  theta_second.pattern = theta_prime.pattern;
  theta_second.bounds = entry.theta_second;

  const PromotionEntry& chained = cal.need_promotion(
      theta_prime, theta_second, promoted.D, promoted.L, promoted.A);
  Certificate global = morse_check(path, promoted, theta_second, chained,
                                   cal.id, model);
  if (!global.pass)
    throw CalibrationContradiction(
        "promoted datum failed the direct global check (" + global.witness +
        "); calibration " + cal.id + " is inconsistent for this datum");

  Certificate cert = global;
  cert.kind = "morse_path";
  cert.scale = entry.S;
  cert.promoted = promoted;
  cert.datum = m;
  cert.diagnostics["local_diamond_margin"] =
      local.diagnostics.at("diamond_margin");
  cert.diagnostics["local_windows"] = local.diagnostics.at("windows_checked");
  cert.pass = true;
  return cert;
}

FlagChain estimate_end(const DiscretePath& path, int tail,
                       const ModelConfig& model, double stability_tol) {
  path.validate();
  if (tail < 2) throw InvalidInput("tail must be >= 2");
  const int t_hi = path.t_end();
  if (t_hi - path.t_start < tail)
    throw InvalidInput("tail exceeds the path domain");
  const FlagChain far =
      flag_of_segment(path.samples.front(), path.at(t_hi), model.pattern, model.tol);
  // flag convergence check: the half-tail estimate must already agree.
  // Perturbed paths converge at a geometric rate, so the drift threshold is
  // a convergence tolerance, not the flag-equality tolerance.
  const int t_mid = path.t_start + std::max(1, (t_hi - path.t_start) / 2);
  const FlagChain half =
      flag_of_segment(path.samples.front(), path.at(t_mid), model.pattern, model.tol);
  const double drift = flag_distance(far, half);
  if (drift > stability_tol)
    throw NoConvergence("end flag unstable between half and full tail (drift " +
                        std::to_string(drift) + "); tail too short");
  return far;
}

FinslerApproximation finsler_approximate(const DiscretePath& path,
                                         const MorseDatum& m,
                                         const ThetaSpec& theta_prime,
                                         double S, const Calibration& cal,
                                         const ModelConfig& model) {
  path.validate();
  const PromotionEntry& entry =
      cal.need_promotion(m.theta, theta_prime, m.D, m.L, m.A);
  const SPDPoint& x_minus = path.samples.front();
  const SPDPoint& x_plus = path.samples.back();
  if (riem_distance(x_minus, x_plus) < std::max(entry.pair_threshold, S))
    throw InvalidInput("endpoints not separated enough for the approximation");

  const FlagChain tau_plus =
      flag_of_segment(x_minus, x_plus, model.pattern, model.tol);
  const FlagChain tau_minus =
      flag_of_segment(x_plus, x_minus, model.pattern, model.tol);
  const ParallelSet pset = parallel_set(tau_minus, tau_plus, model.tol);

  // project every sample, then choose the subsample step so the projected
  // vertices stay >= S apart under the fitted quasi-isometry lower bound
  std::vector<SPDPoint> proj(path.samples.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < path.samples.size(); ++i) {
    const ProjectionResult r =
        project_to_parallel_set(path.samples[i], pset, model.tol);
    proj[i] = r.point;
    dmax = std::max(dmax, r.distance);
  }
  const int step = std::max(
      1, static_cast<int>(std::ceil(m.L * (S + m.A + 2.0 * dmax))));

  FinslerApproximation out;
  out.sup_distance = dmax;
  std::vector<int> picks;
  for (int t = 0; t + step < static_cast<int>(path.samples.size()); t += step)
    picks.push_back(t);
  picks.push_back(static_cast<int>(path.samples.size()) - 1);
  if (picks.size() < 2)
    throw InvalidInput("domain too short for the requested spacing");
  for (int t : picks) {
    out.vertices.times.push_back(path.t_start + t);
    out.vertices.points.push_back(proj[static_cast<std::size_t>(t)]);
  }
  const StraightnessEntry& st =
      cal.need_straightness(m.theta, theta_prime, 1.0);
  out.straightness = is_straight_spaced(out.vertices, theta_prime, st.eps, S,
                                        model.zeta, model.tol);
  return out;
}

}  // namespace morsekit
