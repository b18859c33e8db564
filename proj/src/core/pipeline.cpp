#include "core/pipeline.hpp"

#include <cmath>
#include <sstream>

namespace morsekit {

PipeStatus classify_error(const std::exception& e) {
  if (dynamic_cast<const CalibrationMissing*>(&e) ||
      dynamic_cast<const CalibrationContradiction*>(&e))
    return PipeStatus::calibration;
  if (dynamic_cast<const ResourceExhausted*>(&e)) return PipeStatus::resource;
  return PipeStatus::error;
}

Json model_to_json(const ModelConfig& m) {
  Json j;
  j["n"] = m.n;
  j["pattern"] = m.pattern;
  Json zeta = Json::array(), fin = Json::array();
  for (int i = 0; i < m.n; ++i) {
    zeta.push_back(m.zeta(i));
    fin.push_back(m.finsler_type(i));
  }
  j["zeta"] = zeta;
  j["finsler_type"] = fin;
  j["tolerances"] = to_json(m.tol);
  return j;
}

ModelConfig model_from_json(const Json& j) {
  ModelConfig m = ModelConfig::standard(
      j.at("n").get<int>(), j.at("pattern").get<std::vector<int>>());
  if (j.contains("zeta")) {
    Vec z(m.n);
    int i = 0;
    for (const auto& v : j.at("zeta")) z(i++) = v.get<double>();
    m.zeta = z;
  }
  if (j.contains("finsler_type")) {
    Vec z(m.n);
    int i = 0;
    for (const auto& v : j.at("finsler_type")) z(i++) = v.get<double>();
    m.finsler_type = z;
  }
  if (j.contains("tolerances")) m.tol = tolerances_from_json(j.at("tolerances"));
  m.validate();
  return m;
}

namespace {

struct DatumSpec {
  MorseDatum datum;
  ThetaSpec theta_prime;
};

DatumSpec resolve_datum(const ModelConfig& model, const Json& spec) {
  DatumSpec out;
  if (spec.is_null()) {
    out.datum.theta = ThetaSpec::stage(model.pattern, 2);
    out.datum.D = 2.0;
    out.datum.L = 2.0;
    out.datum.A = 0.0;
    out.theta_prime = ThetaSpec::stage(model.pattern, 3);
    return out;
  }
  out.datum = datum_from_json(spec);
  if (spec.contains("theta_prime")) {
    out.theta_prime = theta_from_json(spec.at("theta_prime"));
  } else {
    out.theta_prime.pattern = out.datum.theta.pattern;
    for (double b : out.datum.theta.bounds)
      out.theta_prime.bounds.push_back(0.5 * b);
  }
  return out;
}

std::string certify_margins_csv(const DiscretePath& path,
                                const Certificate& cert) {
  std::ostringstream csv;
  csv << "t,step_distance\n";
  for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
    csv << (path.t_start + static_cast<int>(i)) << ","
        << riem_distance(path.samples[i], path.samples[i + 1]) << "\n";
  }
  csv << "\nmetric,value\n";
  for (const auto& [k, v] : cert.diagnostics) csv << k << "," << v << "\n";
  return csv.str();
}

}  // namespace

PipeResult run_certify_path(const ModelConfig& model, const Calibration& cal,
                            const Json& path_json, const Json& datum_spec,
                            int local_scale, bool promote) {
  PipeResult res;
  const DiscretePath path = path_from_json(path_json, model.tol);
  const DatumSpec spec = resolve_datum(model, datum_spec);

  Certificate cert;
  if (promote) {
    try {
      cert = certify_local_to_global(path, spec.datum, spec.theta_prime, cal,
                                     model);
    } catch (const CalibrationContradiction& e) {
      res.status = PipeStatus::calibration;
      res.message = e.what();
      return res;
    }
  } else if (local_scale > 0) {
    const PromotionEntry& entry =
        cal.need_promotion(spec.datum.theta, spec.theta_prime, spec.datum.D,
                           spec.datum.L, spec.datum.A);
    cert = local_morse_check(path, spec.datum, local_scale, spec.theta_prime,
                             entry, cal.id, model);
  } else {
    const PromotionEntry& entry =
        cal.need_promotion(spec.datum.theta, spec.theta_prime, spec.datum.D,
                           spec.datum.L, spec.datum.A);
    cert = morse_check(path, spec.datum, spec.theta_prime, entry, cal.id, model);
  }

  Json wrapper;
  wrapper["command"] = "certify-path";
  wrapper["model"] = model_to_json(model);
  Json input;
  input["path"] = to_json(path);
  input["datum"] = to_json(spec.datum);
  input["theta_prime"] = to_json(spec.theta_prime);
  input["local_scale"] = local_scale;
  input["promote"] = promote;
  wrapper["input"] = input;
  wrapper["certificate"] = to_json(cert);
  res.document = wrapper;
  res.csv = certify_margins_csv(path, cert);
  res.status = cert.pass ? PipeStatus::ok : PipeStatus::rejected;
  return res;
}

PipeResult run_schottky(const ModelConfig& model, const Calibration& cal,
                        const Isometry& alpha, const Isometry& beta,
                        const SchottkyOptions& opt) {
  PipeResult res;
  const AxialPair pair = generic_pair(alpha, beta, model);
  Json wrapper;
  wrapper["command"] = "schottky";
  wrapper["model"] = model_to_json(model);
  Json input;
  input["alpha"] = to_json(alpha);
  input["beta"] = to_json(beta);
  input["budget"] = opt.budget;
  input["max_word_length"] = opt.max_word_length;
  input["independent"] = opt.independent;
  input["stage_window"] = opt.stage_window;
  wrapper["input"] = input;
  wrapper["pair"] = to_json(pair);

  if (!pair.generic) {
    res.status = PipeStatus::nongeneric;
    res.document = wrapper;
    res.message = "generator pair is not generic (margin " +
                  std::to_string(pair.genericity_margin) + ")";
    return res;
  }

  const ThetaSpec theta = ThetaSpec::stage(model.pattern, opt.stage_window);
  const ThetaSpec theta_prime =
      ThetaSpec::stage(model.pattern, opt.stage_window + 1);
  // filter thresholds from the promotion table (the straightness-lemma rows
  // are far stricter than finite orbits can exhibit at desk scale)
  const PromotionEntry& entry = cal.need_promotion(
      theta, theta_prime, opt.stage_window, opt.stage_window, 0.0);
  const double eps = entry.eps, ell = entry.ell;

  const SPDPoint base = SPDPoint::identity(model.n);
  const PowerSearchResult found = search_powers(
      pair, base, theta, eps, ell, opt.budget, opt.independent, model);

  // sweep diagnostics for plotting
  std::ostringstream csv;
  csv << "m,n,spacing_margin,regularity_margin,angle_margin,pass\n";
  for (int p = 1; p <= std::min(opt.budget, found.found ? 2 * found.m : opt.budget);
       p = (p < 4 ? p + 1 : p + std::max(1, p / 2))) {
    try {
      const QuadrupleTestReport r = quadruple_test(
          midpoint_quadruple(pair, p, p, base), base, theta, eps, ell,
          model.zeta, model.tol);
      csv << p << "," << p << "," << r.spacing_margin << ","
          << r.regularity_margin << "," << r.angle_margin << "," << r.pass
          << "\n";
    } catch (const Error&) {
      csv << p << "," << p << ",range,range,range,0\n";
      break;  // beyond the representable power range
    }
  }
  res.csv = csv.str();

  if (!found.found) {
    wrapper["search"] = to_json(found.best);
    res.document = wrapper;
    res.status = PipeStatus::budget_exhausted;
    res.message = "power search exhausted the budget";
    return res;
  }

  // pilot fit of the quasi-isometry constants, then full verification
  SchottkyCertificate sc;
  sc.m = found.m;
  sc.n = found.n;
  sc.theta = theta;
  sc.eps = eps;
  sc.ell = ell;
  sc.quadruple_report = found.best;
  sc.max_word_length = opt.max_word_length;
  sc.calibration_id = cal.id;

  MorseDatum pilot;
  pilot.theta = theta;
  pilot.D = 0.5;
  pilot.L = 1e6;  // fit-only pass
  pilot.A = 1e6;
  const WordVerification pilot_run = verify_words(
      pair, found.m, found.n, base, std::min(opt.pilot_length, opt.max_word_length),
      pilot, theta_prime, eps, ell, entry, cal.id, model, opt.threads);

  MorseDatum datum;
  datum.theta = theta;
  datum.L = std::max(1.0, pilot_run.fitted_L * 1.1);
  datum.A = pilot_run.fitted_A * 1.5 + 1.0;
  const double pilot_dist =
      pilot.D + entry.dist_slack - pilot_run.diamond_margin;
  datum.D = std::max(0.5, pilot_dist * 1.5 + 0.3);
  sc.datum = datum;

  sc.word_verification =
      verify_words(pair, found.m, found.n, base, opt.max_word_length, datum,
                   theta_prime, eps, ell, entry, cal.id, model,
                   opt.threads);
  sc.pass = sc.word_verification.pass;

  wrapper["certificate"] = to_json(sc);
  res.document = wrapper;
  res.status = sc.pass ? PipeStatus::ok : PipeStatus::rejected;
  return res;
}

PipeResult run_recognize(const ModelConfig& model, const Calibration& cal,
                         const Representation& rep, int budget_stages,
                         long max_paths, int threads) {
  PipeResult res;
  const StageSchedule schedule =
      StageSchedule::from_calibration(cal, model, budget_stages);
  RecognizeOptions opt;
  opt.max_paths = max_paths;
  opt.threads = threads;
  const RecognitionOutcome outcome =
      recognize(rep, schedule, budget_stages, cal, model, opt);

  Json wrapper;
  wrapper["command"] = "recognize";
  wrapper["model"] = model_to_json(model);
  Json input;
  input["representation"] = to_json(rep);
  input["budget_stages"] = budget_stages;
  input["max_paths"] = max_paths;
  wrapper["input"] = input;
  wrapper["outcome"] = to_json(outcome);
  res.document = wrapper;

  std::ostringstream csv;
  csv << "stage,quadruples_pass,promotion_pass,angle_margin,spacing_margin,"
         "regularity_margin,paths_checked\n";
  for (const auto& s : outcome.summaries)
    csv << s.stage << "," << s.quadruples_pass << "," << s.promotion_pass
        << "," << s.angle_margin << "," << s.spacing_margin << ","
        << s.regularity_margin << "," << s.paths_checked << "\n";
  res.csv = csv.str();

  res.status = outcome.status == RecognitionOutcome::Status::certified
                   ? PipeStatus::ok
                   : PipeStatus::stages_exhausted;
  return res;
}

PipeResult run_replay(const Calibration& cal, const Json& wrapper) {
  PipeResult res;
  const std::string command = wrapper.at("command").get<std::string>();
  const ModelConfig model = model_from_json(wrapper.at("model"));

  PipeResult rerun;
  if (command == "certify-path") {
    const Json& input = wrapper.at("input");
    Json datum_spec = input.at("datum");
    datum_spec["theta_prime"] = input.at("theta_prime");
    rerun = run_certify_path(model, cal, input.at("path"), datum_spec,
                             input.at("local_scale").get<int>(),
                             input.at("promote").get<bool>());
  } else if (command == "schottky") {
    const Json& input = wrapper.at("input");
    SchottkyOptions opt;
    opt.budget = input.at("budget").get<int>();
    opt.max_word_length = input.at("max_word_length").get<int>();
    opt.independent = input.at("independent").get<bool>();
    opt.stage_window = input.at("stage_window").get<int>();
    rerun = run_schottky(model, cal,
                         isometry_from_json(input.at("alpha"), model.tol),
                         isometry_from_json(input.at("beta"), model.tol), opt);
  } else if (command == "recognize") {
    const Json& input = wrapper.at("input");
    rerun = run_recognize(
        model, cal,
        representation_from_json(input.at("representation"), model.tol),
        input.at("budget_stages").get<int>(),
        input.at("max_paths").get<long>(), 0);
  } else {
    throw InvalidInput("replay: unknown command '" + command + "'");
  }

  const char* payload_key =
      command == "recognize" ? "outcome" : "certificate";
  const bool match =
      wrapper.contains(payload_key) && rerun.document.contains(payload_key) &&
      canonical_dump(wrapper.at(payload_key)) ==
          canonical_dump(rerun.document.at(payload_key));
  Json doc;
  doc["command"] = "replay";
  doc["replayed_command"] = command;
  doc["match"] = match;
  doc["original_status"] = static_cast<int>(rerun.status);
  res.document = doc;
  res.status = match ? PipeStatus::ok : PipeStatus::rejected;
  res.message = match ? "verdict reproduced" : "replay mismatch";
  return res;
}

}  // namespace morsekit
