#pragma once

#include <string>

#include <json.hpp>

#include "widthlab/ballwidths.hpp"
#include "widthlab/exponents.hpp"
#include "widthlab/lowerbounds.hpp"
#include "widthlab/multiscale.hpp"
#include "widthlab/rate_fit.hpp"

namespace widthlab::io {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "widthlab/1";

/// Extended reals: finite numbers or the string "inf" (also "Infinity").
double extended_from_json(const json& j, const std::string& field);
json extended_to_json(double x);

/// All parse failures raise Error(schema); parameter invariants are left to
/// the caller's validate().
SobolevProblem problem_from_json(const json& j);
json to_json(const SobolevProblem& p);

AbstractParams abstract_from_json(const json& j);
json to_json(const AbstractParams& a);

SpaceParams space_from_json(const json& j);
json to_json(const SpaceParams& s);

ExponentPair exponents_from_json(const json& j);
json to_json(const ExponentPair& e);

ExponentProfile profile_from_json(const json& j);
json to_json(const ExponentProfile& p);

HypothesisReport report_from_json(const json& j);
json to_json(const HypothesisReport& r);

json to_json(const Prediction& p);

BallSpec ball_from_json(const json& j);
json to_json(const BallSpec& b);
Body body_from_json(const json& j);
json to_json(const Body& b);

WidthEstimate estimate_from_json(const json& j);
json to_json(const WidthEstimate& e);

json to_json(const RateFit& f);
json to_json(const RankAllocation& a);
json to_json(const LowerBoundCurve& c);

/// Ensemble members: {"type": "bump", "t", "m", "index"?, "component"?,
/// "shape"?}, {"type": "bump_grid", "t_last", "m_last"}, {"type":
/// "polynomial", "coeffs", "a", "b"} or {"type": "zero"}. Bumps are scaled
/// into M; polynomials are taken as given.
Ensemble ensemble_from_json(const json& j, const SobolevProblem& p, const DomainSpec& dom,
                            const QuadratureSpec& quad);

/// Reads and parses a JSON file; Error(input) if missing, Error(schema) if
/// malformed.
json read_json_file(const std::string& path);

}  // namespace widthlab::io
