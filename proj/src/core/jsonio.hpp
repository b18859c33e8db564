#pragma once

// JSON serialization for all exchangeable values, a canonical writer
// (sorted keys, %.17g floats) so emitted files are byte-stable, and the
// run configuration loader (JSON or TOML).

#include <json.hpp>
#include <optional>
#include <string>

#include "core/calibration.hpp"
#include "core/morse.hpp"
#include "core/recognize.hpp"
#include "core/schottky.hpp"

namespace morsekit {

using Json = nlohmann::json;

// canonical text: object keys sorted, numbers rendered with %.17g
std::string canonical_dump(const Json& j, int indent = 0);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);
Json parse_json_file(const std::string& path);

Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);

Json to_json(const SPDPoint& p);
SPDPoint spd_from_json(const Json& j, const Tolerances& tol);
Json to_json(const Isometry& g);
Isometry isometry_from_json(const Json& j, const Tolerances& tol);
Json to_json(const FlagChain& f);
FlagChain flag_from_json(const Json& j);
Json to_json(const ParallelSet& p);
Json to_json(const ThetaSpec& t);
ThetaSpec theta_from_json(const Json& j);
Json to_json(const MorseDatum& m);
MorseDatum datum_from_json(const Json& j);
Json to_json(const Tolerances& t);
Tolerances tolerances_from_json(const Json& j);

Json to_json(const PointSequence& s);
PointSequence sequence_from_json(const Json& j, const Tolerances& tol);
Json to_json(const DiscretePath& p);
DiscretePath path_from_json(const Json& j, const Tolerances& tol);

Json to_json(const StraightnessReport& r);
Json to_json(const QuasiReport& r);
Json to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j);

Json to_json(const Representation& r);
Representation representation_from_json(const Json& j, const Tolerances& tol);
Json to_json(const AxialPair& p);
Json to_json(const QuadrupleTestReport& r);
Json to_json(const WordVerification& v);
Json to_json(const SchottkyCertificate& c);
Json to_json(const StageSummary& s);
Json to_json(const RecognitionOutcome& o);
Json to_json(const PerturbReport& r);

// model + command parameters from a JSON or TOML config file
struct RunConfig {
  ModelConfig model;
  std::string calibration_path;
  std::uint64_t seed = 1;
  Json extra;  // command-specific blocks, already parsed

  static RunConfig load(const std::string& path);
  static RunConfig from_json(const Json& j);
};

}  // namespace morsekit
