#pragma once

#include <json.hpp>

#include "sleec/checker.hpp"
#include "sleec/explain.hpp"

namespace sleec {

using Json = nlohmann::ordered_json;

/// `{severity, category, line, col, message, suggestion?}`
Json to_json(const Diagnostic& d);

/// `{kind, rules[], trace, scenario{}, message}`; trace is the formatted string or null.
Json to_json(const Verdict& v, const CheckConfig& cfg);

Json diagnostics_json(const std::vector<Diagnostic>& diags);
Json verdicts_json(const std::vector<Verdict>& verdicts, const CheckConfig& cfg);

/// Shape shared by `check --json` and the service's ruleset responses.
Json analysis_json(const std::vector<Diagnostic>& diags, const CheckReport& report, const CheckConfig& cfg);

Json to_json(const ExplanationReport& r);

/// `{kind, target_rule_id?, sleec_text?}` with kind spelled as in reports.
/// Throws std::invalid_argument on malformed input.
Suggestion suggestion_from_json(const Json& j);
Json to_json(const Suggestion& s);

}  // namespace sleec
