#include "core/recognize.hpp"

#include <algorithm>
#include <cmath>

#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/words.hpp"

namespace morsekit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void Representation::validate(const ModelConfig& model) const {
  if (rank < 1) throw InvalidInput("representation rank must be >= 1");
  if (static_cast<int>(generators.size()) != rank)
    throw InvalidInput("representation needs one generator per rank");
  for (const auto& g : generators)
    if (g.n() != model.n) throw InvalidInput("generator size mismatch");
  if (basepoint.n() != model.n) throw InvalidInput("basepoint size mismatch");
  // spot-check associativity / inverse consistency on the first generator
  const Isometry& g = generators.front();
  const Mat should_be_id = g.matrix() * g.inverse().matrix();
  if ((should_be_id - Mat::Identity(model.n, model.n)).norm() > 1e-8)
    throw InvalidInput("generator inverse inconsistency");
}

StageSchedule StageSchedule::from_calibration(const Calibration& cal,
                                              const ModelConfig& model,
                                              int budget_stages) {
  StageSchedule sched;
  int prev_S = 2;
  for (int i = 1; i <= budget_stages; ++i) {
    const ThetaSpec th = ThetaSpec::stage(model.pattern, i);
    const ThetaSpec thp = ThetaSpec::stage(model.pattern, i + 1);
    const PromotionEntry* e = cal.find_promotion(
        th, thp, static_cast<double>(i), static_cast<double>(i), 0.0);
    if (!e) continue;  // empty or uncalibrated window
    StageParams p;
    p.stage = i;
    p.theta = th;
    p.theta_next = thp;
    p.eps = e->eps;
    p.ell = e->ell;
    p.S = std::max(prev_S, e->S);
    prev_S = p.S;
    p.D = static_cast<double>(i);
    p.L = static_cast<double>(i);
    p.A = 0.0;
    sched.stages.push_back(p);
  }
  if (sched.stages.empty())
    throw CalibrationMissing("calibration provides no usable stages");
  return sched;
}

void StageSchedule::validate(int n) const {
  int prev_stage = 0, prev_S = 0;
  for (const auto& p : stages) {
    p.theta.validate(n);
    p.theta_next.validate(n);
    if (p.theta.inclusion_margin(p.theta_next) <= 0.0)
      throw InvalidInput("stage windows must be strictly nested");
    if (p.stage <= prev_stage) throw InvalidInput("stages must increase");
    if (p.S < prev_S) throw InvalidInput("stage scales must be nondecreasing");
    prev_stage = p.stage;
    prev_S = p.S;
  }
}

DiscretePath orbit_path(const Representation& rep, const std::vector<int>& word,
                        const ModelConfig& model) {
  DiscretePath path;
  path.samples.push_back(rep.basepoint);
  Isometry prefix = Isometry::identity(model.n);
  for (int letter : word) {
    const int idx = letter / 2;
    const Isometry& g = rep.generators[static_cast<std::size_t>(idx)];
    prefix = prefix * ((letter % 2) ? g.inverse() : g);
    path.samples.push_back(apply_isometry(prefix, rep.basepoint));
  }
  return path;
}

namespace {

// Lazy chunked sweep over the stage words.  Each chunk is evaluated in
// parallel but consumed in lexicographic order, so the first failure (and
// the number of paths checked before it) does not depend on scheduling.
template <typename CheckFn, typename FailFn>
long sweep_words(const Representation& rep, int len, long max_paths,
                 int threads, const CheckFn& check, const FailFn& on_fail,
                 bool* all_pass) {
  WordStream stream(rep.rank, len);
  std::vector<std::vector<int>> chunk;
  long checked = 0;
  *all_pass = true;
  const long chunk_size = 128;
  for (;;) {
    chunk.clear();
    std::vector<int> w;
    while (static_cast<long>(chunk.size()) < chunk_size && stream.next(w))
      chunk.push_back(w);
    if (chunk.empty()) break;
    // plain bytes: vector<bool> packs bits and would race across threads
    std::vector<char> ok(chunk.size(), 0);
    parallel_for(static_cast<long>(chunk.size()), threads, [&](long i) {
      ok[static_cast<std::size_t>(i)] = check(chunk[static_cast<std::size_t>(i)]) ? 1 : 0;
    });
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      ++checked;
      if (!ok[i]) {
        on_fail(chunk[i]);
        *all_pass = false;
        return checked;
      }
    }
    if (checked > max_paths)
      throw ResourceExhausted("stage enumeration passed " +
                              std::to_string(checked) +
                              " paths, over the cap of " +
                              std::to_string(max_paths));
  }
  return checked;
}

StageSummary run_stage(const Representation& rep, const StageParams& p,
                       const ModelConfig& model, const RecognizeOptions& opt) {
  StageSummary sum;
  sum.stage = p.stage;
  sum.angle_margin = kInf;
  sum.spacing_margin = kInf;
  sum.regularity_margin = kInf;

  std::mutex mu;
  auto check = [&](const std::vector<int>& w) {
    const DiscretePath path = orbit_path(rep, w, model);
    const StraightnessReport r =
        quadruple_condition(path, p.theta, p.eps, p.ell, p.S, model.zeta,
                            model.tol, opt.exhaustive_quadruples);
    std::lock_guard<std::mutex> lock(mu);
    sum.angle_margin = std::min(sum.angle_margin, r.angle_margin);
    sum.spacing_margin = std::min(sum.spacing_margin, r.spacing_margin);
    sum.regularity_margin = std::min(sum.regularity_margin, r.regularity_margin);
    return r.straight;
  };
  auto on_fail = [&](const std::vector<int>& w) {
    sum.witness_word = word_name(w, rep.rank);
  };
  bool all_pass = false;
  sum.paths_checked = sweep_words(rep, 3 * p.S, opt.max_paths, opt.threads,
                                  check, on_fail, &all_pass);
  sum.quadruples_pass = all_pass;
  return sum;
}

}  // namespace

RecognitionOutcome recognize(const Representation& rep,
                             const StageSchedule& schedule, int budget_stages,
                             const Calibration& cal, const ModelConfig& model,
                             const RecognizeOptions& opt) {
  rep.validate(model);
  schedule.validate(model.n);
  if (budget_stages < 1) throw InvalidInput("stage budget must be >= 1");

  RecognitionOutcome out;
  for (const StageParams& p : schedule.stages) {
    if (p.stage > budget_stages) break;
    out.stage = p.stage;
    StageSummary sum = run_stage(rep, p, model, opt);
    out.paths_checked += sum.paths_checked;

    if (sum.quadruples_pass) {
      // promote: calibrated local-to-global check on every enumerated path;
      // a datum too tight for the orbit is not an error, just no certificate
      // at this stage
      MorseDatum m;
      m.theta = p.theta;
      m.D = p.D;
      m.L = p.L;
      m.A = p.A;
      auto check = [&](const std::vector<int>& w) {
        const DiscretePath path = orbit_path(rep, w, model);
        return certify_local_to_global(path, m, p.theta_next, cal, model).pass;
      };
      auto on_fail = [&](const std::vector<int>& w) {
        sum.witness_word = word_name(w, rep.rank);
      };
      bool promoted_all = false;
      out.paths_checked += sweep_words(rep, 3 * p.S, opt.max_paths, opt.threads,
                                       check, on_fail, &promoted_all);
      sum.promotion_pass = promoted_all;
      if (promoted_all) {
        out.status = RecognitionOutcome::Status::certified;
        out.summaries.push_back(sum);
        // certificate rebuilt from the lexicographically first word so the
        // emitted outcome does not depend on thread scheduling
        WordStream stream(rep.rank, 3 * p.S);
        std::vector<int> w0;
        stream.next(w0);
        Certificate cert = certify_local_to_global(orbit_path(rep, w0, model),
                                                   m, p.theta_next, cal, model);
        cert.kind = "recognized";
        cert.scale = p.stage;
        out.certificate = cert;
        return out;
      }
    }
    out.summaries.push_back(sum);
  }
  out.status = RecognitionOutcome::Status::budget_exhausted;
  return out;
}

PerturbReport perturb_and_recheck(const Representation& rep,
                                  const StageParams& stage, double delta,
                                  double datum_relax, std::uint64_t seed,
                                  const Calibration& cal,
                                  const ModelConfig& model,
                                  const RecognizeOptions& opt) {
  rep.validate(model);
  Rng rng(seed);
  Representation pert = rep;
  for (auto& g : pert.generators) {
    Mat gm = g.matrix();
    for (int i = 0; i < gm.rows(); ++i)
      for (int j = 0; j < gm.cols(); ++j)
        gm(i, j) += rng.uniform(-delta, delta);
    if (std::abs(gm.determinant()) < 0.5)
      throw InvalidInput("perturbation left the group (determinant collapse)");
    g = Isometry::rescaled(gm);
  }

  // baseline and perturbed stage margins at relaxed thresholds
  const double eps_relaxed =
      stage.eps + 2.0 * std::atan2(datum_relax, std::max(stage.ell, 1e-9));
  const double ell_relaxed = std::max(0.0, stage.ell - 2.0 * datum_relax);
  const MorseDatum relaxed_datum = [&] {
    MorseDatum m;
    m.theta = stage.theta;
    m.D = stage.D;
    m.L = stage.L;
    m.A = stage.A;
    return m.relaxed(datum_relax);
  }();
  const PromotionEntry& entry = cal.need_promotion(
      stage.theta, stage.theta_next, stage.D, stage.L, stage.A);

  PerturbReport rep_out;
  rep_out.angle_margin = kInf;
  rep_out.spacing_margin = kInf;
  rep_out.regularity_margin = kInf;
  rep_out.diamond_margin = kInf;
  double base_angle = kInf, base_spacing = kInf;
  bool pass = true;

  const auto words = reduced_words(rep.rank, 3 * stage.S);
  for (const auto& w : words) {
    const DiscretePath base_path = orbit_path(rep, w, model);
    const DiscretePath pert_path = orbit_path(pert, w, model);
    const StraightnessReport base_r =
        quadruple_condition(base_path, stage.theta, stage.eps, stage.ell,
                            stage.S, model.zeta, model.tol);
    const StraightnessReport pert_r =
        quadruple_condition(pert_path, stage.theta, eps_relaxed, ell_relaxed,
                            stage.S, model.zeta, model.tol, false);
    base_angle = std::min(base_angle, base_r.angle_margin);
    base_spacing = std::min(base_spacing, base_r.spacing_margin);
    rep_out.angle_margin = std::min(rep_out.angle_margin, pert_r.angle_margin);
    rep_out.spacing_margin =
        std::min(rep_out.spacing_margin, pert_r.spacing_margin);
    rep_out.regularity_margin =
        std::min(rep_out.regularity_margin, pert_r.regularity_margin);
    const Certificate c = morse_check(pert_path, relaxed_datum,
                                      stage.theta_next, entry, cal.id, model);
    rep_out.diamond_margin =
        std::min(rep_out.diamond_margin, c.diagnostics.at("diamond_margin"));
    if (!pert_r.straight || !c.pass) {
      if (pass) rep_out.witness_word = word_name(w, rep.rank);
      pass = false;
    }
  }
  (void)opt;
  rep_out.pass = pass;
  rep_out.angle_delta = rep_out.angle_margin - base_angle;
  rep_out.spacing_delta = rep_out.spacing_margin - base_spacing;
  return rep_out;
}

}  // namespace morsekit
