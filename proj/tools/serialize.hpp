#pragma once

#include "json_text.hpp"

#include "rellich/rellich.hpp"

#include <string>
#include <vector>

namespace rellich::cli {

Json to_json(const ProblemParams& p);
Json to_json(const SolverConfig& c);
Json to_json(const VerdictBudget& b);
Json to_json(const ParamFlags& f);
Json to_json(const MinimizeResult& r);  // without the profile samples
Json to_json(const GammaScan& g);
Json to_json(const QuotientOfU& u);
Json to_json(const PhaseVerdict& v);
Json to_json(const ContinuationRun& run);

PhaseVerdict verdict_from_json(const Json& j);

/// Header: n,alpha,q,lambda,verdict,criteria,s_upper,s_radial,margin.
/// Criteria are joined with ';'; absent numbers are empty fields.
std::string verdicts_to_csv(const std::vector<PhaseVerdict>& verdicts);

}  // namespace rellich::cli
