#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "upsr/bayes.hpp"
#include "upsr/frequentist.hpp"
#include "upsr/montecarlo.hpp"
#include "upsr/upsilon.hpp"

namespace upsr::cli {

/// Reports keep key order so text and JSON list fields the same way.
using Json = nlohmann::ordered_json;

Json to_json(const UpsilonParams& params);
Json to_json(const ApproxOrder& order);
Json to_json(const Interval& interval);
Json to_json(const NIGHyper& h);
Json to_json(const CoverageResult& r);

/// {method, inputs, statistic, threshold | interval, p_value, reject, alpha, sided, params, terms}.
Json inference_report(const InferenceResult& r, Json inputs);

/// Human-readable form of a report. A function of the JSON alone, so the text printed
/// by a command and the text rebuilt from its parsed --json output are identical.
std::string render_text(const Json& report);

/// Numbers are printed with 10 significant digits.
std::string format_number(double v);

} // namespace upsr::cli
