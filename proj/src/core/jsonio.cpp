#include "core/jsonio.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/toml_lite.hpp"

namespace morsekit {

namespace {

std::string fmt_number(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e308" : "-1e308";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void escape_into(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void dump_rec(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad = indent ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string pad_close = indent ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.cbegin(); it != j.cend(); ++it) {  // keys sorted by map order
        if (!first) out += ',';
        first = false;
        out += pad;
        escape_into(it.key(), out);
        out += indent ? ": " : ":";
        dump_rec(it.value(), out, indent, depth + 1);
      }
      out += pad_close;
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        out += pad;
        dump_rec(v, out, indent, depth + 1);
      }
      out += pad_close;
      out += ']';
      return;
    }
    case Json::value_t::string:
      escape_into(j.get_ref<const std::string&>(), out);
      return;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned: {
      out += j.dump();
      return;
    }
    case Json::value_t::number_float:
      out += fmt_number(j.get<double>());
      return;
    default:
      out += "null";
      return;
  }
}

double sanitized(double v) {
  if (std::isnan(v)) return 0.0;
  if (std::isinf(v)) return v > 0 ? 1e308 : -1e308;
  return v;
}

}  // namespace

std::string canonical_dump(const Json& j, int indent) {
  std::string out;
  dump_rec(j, out, indent, 0);
  out += '\n';
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("JSON parse error in ") + path + ": " + e.what());
  }
}

Json matrix_to_json(const Mat& m) {
  Json j;
  j["n"] = static_cast<int>(m.rows());
  Json entries = Json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int k = 0; k < m.cols(); ++k) entries.push_back(m(i, k));
  j["entries"] = entries;
  return j;
}

Mat matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("entries"))
    throw ParseError("matrix needs fields {n, entries}");
  const int n = j.at("n").get<int>();
  const auto& e = j.at("entries");
  if (!e.is_array() || static_cast<int>(e.size()) != n * n)
    throw ParseError("matrix entries must hold n*n values (row-major)");
  Mat m(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) m(i, k) = e.at(static_cast<std::size_t>(idx++)).get<double>();
  return m;
}

Json to_json(const SPDPoint& p) { return matrix_to_json(p.matrix()); }

SPDPoint spd_from_json(const Json& j, const Tolerances& tol) {
  return SPDPoint::from_matrix(matrix_from_json(j), tol.det_rel, tol.sym_rel);
}

Json to_json(const Isometry& g) { return matrix_to_json(g.matrix()); }

Isometry isometry_from_json(const Json& j, const Tolerances& tol) {
  return Isometry::from_matrix(matrix_from_json(j), tol.det_rel);
}

Json to_json(const FlagChain& f) {
  Json j;
  j["pattern"] = f.pattern;
  Json bases = Json::array();
  for (const Mat& q : f.basis) {
    Json b;
    b["rows"] = static_cast<int>(q.rows());
    b["cols"] = static_cast<int>(q.cols());
    Json entries = Json::array();
    for (int r = 0; r < q.rows(); ++r)
      for (int c = 0; c < q.cols(); ++c) entries.push_back(q(r, c));
    b["entries"] = entries;
    bases.push_back(b);
  }
  j["bases"] = bases;
  return j;
}

FlagChain flag_from_json(const Json& j) {
  FlagChain f;
  f.pattern = j.at("pattern").get<std::vector<int>>();
  for (const auto& b : j.at("bases")) {
    const int r = b.at("rows").get<int>(), c = b.at("cols").get<int>();
    Mat q(r, c);
    int idx = 0;
    const auto& e = b.at("entries");
    for (int i = 0; i < r; ++i)
      for (int k = 0; k < c; ++k) q(i, k) = e.at(static_cast<std::size_t>(idx++)).get<double>();
    f.basis.push_back(q);
  }
  f.validate();
  return f;
}

Json to_json(const ParallelSet& p) {
  Json j;
  j["minus"] = to_json(p.minus);
  j["plus"] = to_json(p.plus);
  j["transformer"] = to_json(p.transformer);
  j["block_dims"] = p.block_dims;
  return j;
}

Json to_json(const ThetaSpec& t) {
  Json j;
  j["pattern"] = t.pattern;
  j["bounds"] = t.bounds;
  return j;
}

ThetaSpec theta_from_json(const Json& j) {
  ThetaSpec t;
  t.pattern = j.at("pattern").get<std::vector<int>>();
  t.bounds = j.at("bounds").get<std::vector<double>>();
  return t;
}

Json to_json(const MorseDatum& m) {
  Json j;
  j["theta"] = to_json(m.theta);
  j["D"] = m.D;
  j["L"] = m.L;
  j["A"] = m.A;
  return j;
}

MorseDatum datum_from_json(const Json& j) {
  MorseDatum m;
  m.theta = theta_from_json(j.at("theta"));
  m.D = j.at("D").get<double>();
  m.L = j.at("L").get<double>();
  m.A = j.at("A").get<double>();
  return m;
}

Json to_json(const Tolerances& t) {
  Json j;
  j["eigengap"] = t.eigengap;
  j["projection"] = t.projection;
  j["flag"] = t.flag;
  j["transversality"] = t.transversality;
  j["finsler_gap"] = t.finsler_gap;
  j["angle"] = t.angle;
  j["det_rel"] = t.det_rel;
  j["sym_rel"] = t.sym_rel;
  j["quasi"] = t.quasi;
  j["projection_iters"] = t.projection_iters;
  return j;
}

Tolerances tolerances_from_json(const Json& j) {
  Tolerances t;
  auto get = [&](const char* k, double& slot) {
    if (j.contains(k)) slot = j.at(k).get<double>();
  };
  get("eigengap", t.eigengap);
  get("projection", t.projection);
  get("flag", t.flag);
  get("transversality", t.transversality);
  get("finsler_gap", t.finsler_gap);
  get("angle", t.angle);
  get("det_rel", t.det_rel);
  get("sym_rel", t.sym_rel);
  get("quasi", t.quasi);
  if (j.contains("projection_iters"))
    t.projection_iters = j.at("projection_iters").get<int>();
  return t;
}

Json to_json(const PointSequence& s) {
  Json j = Json::array();
  for (std::size_t i = 0; i < s.points.size(); ++i)
    j.push_back(Json::array({s.times[i], to_json(s.points[i])}));
  return j;
}

PointSequence sequence_from_json(const Json& j, const Tolerances& tol) {
  PointSequence s;
  for (const auto& item : j) {
    s.times.push_back(item.at(0).get<int>());
    s.points.push_back(spd_from_json(item.at(1), tol));
  }
  s.validate();
  return s;
}

Json to_json(const DiscretePath& p) {
  Json samples = Json::array();
  for (std::size_t i = 0; i < p.samples.size(); ++i)
    samples.push_back(Json::array(
        {p.t_start + static_cast<int>(i), to_json(p.samples[i])}));
  Json j;
  j["samples"] = samples;
  if (p.end_minus) j["end_minus"] = to_json(*p.end_minus);
  if (p.end_plus) j["end_plus"] = to_json(*p.end_plus);
  return j;
}

DiscretePath path_from_json(const Json& j, const Tolerances& tol) {
  const Json& samples = j.is_array() ? j : j.at("samples");
  DiscretePath p;
  bool first = true;
  int prev_t = 0;
  for (const auto& item : samples) {
    const int t = item.at(0).get<int>();
    if (first) {
      p.t_start = t;
      first = false;
    } else if (t != prev_t + 1) {
      throw ParseError("path sample times must be consecutive integers");
    }
    prev_t = t;
    p.samples.push_back(spd_from_json(item.at(1), tol));
  }
  if (!j.is_array()) {
    if (j.contains("end_minus")) p.end_minus = flag_from_json(j.at("end_minus"));
    if (j.contains("end_plus")) p.end_plus = flag_from_json(j.at("end_plus"));
  }
  p.validate();
  return p;
}

Json to_json(const StraightnessReport& r) {
  Json j;
  j["straight"] = r.straight;
  j["angle_margin"] = sanitized(r.angle_margin);
  j["spacing_margin"] = sanitized(r.spacing_margin);
  j["regularity_margin"] = sanitized(r.regularity_margin);
  j["witness_index"] = r.witness_index;
  j["checked_angles"] = r.checked_angles;
  j["checked_segments"] = r.checked_segments;
  return j;
}

Json to_json(const QuasiReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["lower_margin"] = sanitized(r.lower_margin);
  j["upper_margin"] = sanitized(r.upper_margin);
  j["fitted_L"] = sanitized(r.fitted_L);
  j["fitted_A"] = sanitized(r.fitted_A);
  j["witness_t1"] = r.witness_t1;
  j["witness_t2"] = r.witness_t2;
  return j;
}

Json to_json(const Certificate& c) {
  Json j;
  j["kind"] = c.kind;
  j["pass"] = c.pass;
  j["datum"] = to_json(c.datum);
  j["theta_prime"] = to_json(c.theta_prime);
  j["scale"] = c.scale;
  j["tolerances"] = to_json(c.tol);
  j["calibration_id"] = c.calibration_id;
  Json diag;
  for (const auto& [k, v] : c.diagnostics) diag[k] = sanitized(v);
  j["diagnostics"] = diag;
  j["witness"] = c.witness;
  if (c.promoted) j["promoted"] = to_json(*c.promoted);
  return j;
}

Certificate certificate_from_json(const Json& j) {
  Certificate c;
  c.kind = j.at("kind").get<std::string>();
  c.pass = j.at("pass").get<bool>();
  c.datum = datum_from_json(j.at("datum"));
  c.theta_prime = theta_from_json(j.at("theta_prime"));
  c.scale = j.at("scale").get<int>();
  c.tol = tolerances_from_json(j.at("tolerances"));
  c.calibration_id = j.at("calibration_id").get<std::string>();
  for (auto it = j.at("diagnostics").cbegin(); it != j.at("diagnostics").cend(); ++it)
    c.diagnostics[it.key()] = it.value().get<double>();
  c.witness = j.at("witness").get<std::string>();
  if (j.contains("promoted")) c.promoted = datum_from_json(j.at("promoted"));
  return c;
}

Json to_json(const Representation& r) {
  Json j;
  j["rank"] = r.rank;
  Json gens = Json::array();
  for (const auto& g : r.generators) gens.push_back(to_json(g));
  j["generators"] = gens;
  j["basepoint"] = to_json(r.basepoint);
  return j;
}

Representation representation_from_json(const Json& j, const Tolerances& tol) {
  Representation r;
  r.rank = j.at("rank").get<int>();
  for (const auto& g : j.at("generators"))
    r.generators.push_back(isometry_from_json(g, tol));
  r.basepoint = j.contains("basepoint")
                    ? spd_from_json(j.at("basepoint"), tol)
                    : SPDPoint::identity(r.generators.empty()
                                             ? 2
                                             : r.generators.front().n());
  return r;
}

Json to_json(const AxialPair& p) {
  Json j;
  j["generic"] = p.generic;
  j["genericity_margin"] = sanitized(p.genericity_margin);
  Json margins = Json::array();
  for (double m : p.pair_margins) margins.push_back(sanitized(m));
  j["pair_margins"] = margins;
  j["tau_a_plus"] = to_json(p.tau_a_plus);
  j["tau_a_minus"] = to_json(p.tau_a_minus);
  j["tau_b_plus"] = to_json(p.tau_b_plus);
  j["tau_b_minus"] = to_json(p.tau_b_minus);
  return j;
}

Json to_json(const QuadrupleTestReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["spacing_margin"] = sanitized(r.spacing_margin);
  j["regularity_margin"] = sanitized(r.regularity_margin);
  j["angle_margin"] = sanitized(r.angle_margin);
  j["witness"] = r.witness;
  return j;
}

Json to_json(const WordVerification& v) {
  Json j;
  j["pass"] = v.pass;
  j["words_checked"] = v.words_checked;
  j["fitted_L"] = sanitized(v.fitted_L);
  j["fitted_A"] = sanitized(v.fitted_A);
  j["straight_angle_margin"] = sanitized(v.straight_angle_margin);
  j["straight_spacing_margin"] = sanitized(v.straight_spacing_margin);
  j["straight_regularity_margin"] = sanitized(v.straight_regularity_margin);
  j["diamond_margin"] = sanitized(v.diamond_margin);
  j["qg_lower_margin"] = sanitized(v.qg_lower_margin);
  j["qg_upper_margin"] = sanitized(v.qg_upper_margin);
  j["lower_slope"] = sanitized(v.lower_slope);
  j["witness_word"] = v.witness_word;
  return j;
}

Json to_json(const SchottkyCertificate& c) {
  Json j;
  j["kind"] = "schottky";
  j["pass"] = c.pass;
  j["m"] = c.m;
  j["n"] = c.n;
  j["theta"] = to_json(c.theta);
  j["eps"] = c.eps;
  j["ell"] = c.ell;
  j["quadruple_report"] = to_json(c.quadruple_report);
  j["max_word_length"] = c.max_word_length;
  j["datum"] = to_json(c.datum);
  j["word_verification"] = to_json(c.word_verification);
  j["calibration_id"] = c.calibration_id;
  return j;
}

Json to_json(const StageSummary& s) {
  Json j;
  j["stage"] = s.stage;
  j["quadruples_pass"] = s.quadruples_pass;
  j["promotion_pass"] = s.promotion_pass;
  j["angle_margin"] = sanitized(s.angle_margin);
  j["spacing_margin"] = sanitized(s.spacing_margin);
  j["regularity_margin"] = sanitized(s.regularity_margin);
  j["paths_checked"] = s.paths_checked;
  j["witness_word"] = s.witness_word;
  return j;
}

Json to_json(const RecognitionOutcome& o) {
  Json j;
  j["status"] = o.status == RecognitionOutcome::Status::certified
                    ? "certified"
                    : "budget_exhausted";
  j["stage"] = o.stage;
  j["paths_checked"] = o.paths_checked;
  Json sums = Json::array();
  for (const auto& s : o.summaries) sums.push_back(to_json(s));
  j["stage_summaries"] = sums;
  if (o.certificate) j["certificate"] = to_json(*o.certificate);
  return j;
}

Json to_json(const PerturbReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["angle_margin"] = sanitized(r.angle_margin);
  j["spacing_margin"] = sanitized(r.spacing_margin);
  j["regularity_margin"] = sanitized(r.regularity_margin);
  j["diamond_margin"] = sanitized(r.diamond_margin);
  j["angle_delta"] = sanitized(r.angle_delta);
  j["spacing_delta"] = sanitized(r.spacing_delta);
  j["witness_word"] = r.witness_word;
  return j;
}

namespace {

Json toml_to_json(const toml::Document& doc) {
  Json j;
  auto put_table = [](Json& dst, const toml::Table& t) {
    for (const auto& [k, v] : t.values) {
      if (const auto* i = std::get_if<long long>(&v))
        dst[k] = *i;
      else if (const auto* d = std::get_if<double>(&v))
        dst[k] = *d;
      else if (const auto* s = std::get_if<std::string>(&v))
        dst[k] = *s;
      else
        dst[k] = std::get<std::vector<double>>(v);
    }
  };
  put_table(j, doc.root);
  for (const auto& [name, t] : doc.tables) {
    Json sub;
    put_table(sub, t);
    j[name] = sub;
  }
  for (const auto& [name, list] : doc.arrays) {
    Json arr = Json::array();
    for (const auto& t : list) {
      Json sub;
      put_table(sub, t);
      arr.push_back(sub);
    }
    j[name] = arr;
  }
  return j;
}

}  // namespace

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig cfg;
  const Json& m = j.contains("model") ? j.at("model") : j;
  const int n = m.at("n").get<int>();
  std::vector<int> pattern;
  for (const auto& v : m.at("pattern")) pattern.push_back(v.get<int>());
  cfg.model = ModelConfig::standard(n, pattern);
  if (m.contains("zeta")) {
    Vec z(n);
    int i = 0;
    for (const auto& v : m.at("zeta")) z(i++) = v.get<double>();
    cfg.model.zeta = z;
  }
  if (m.contains("finsler_type")) {
    Vec z(n);
    int i = 0;
    for (const auto& v : m.at("finsler_type")) z(i++) = v.get<double>();
    cfg.model.finsler_type = z;
  }
  if (m.contains("tolerances"))
    cfg.model.tol = tolerances_from_json(m.at("tolerances"));
  cfg.model.validate();
  if (j.contains("calibration_path"))
    cfg.calibration_path = j.at("calibration_path").get<std::string>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.extra = j;
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  const std::string text = read_text_file(path);
  // sniff: TOML configs start with a key or section, JSON with { or [
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i < text.size() && (text[i] == '{' || text[i] == '[' )) {
    if (text[i] == '{') {
      try {
        return from_json(Json::parse(text));
      } catch (const Json::parse_error& e) {
        throw ParseError(std::string("config parse error: ") + e.what());
      }
    }
  }
  return from_json(toml_to_json(toml::parse(text)));
}

}  // namespace morsekit
