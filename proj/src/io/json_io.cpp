#include "sleec/json_io.hpp"

namespace sleec {

Json to_json(const Diagnostic& d) {
    Json j{
        {"severity", std::string(to_string(d.severity))},
        {"category", std::string(to_string(d.category))},
        {"line", d.span.line},
        {"col", d.span.col},
        {"offset", d.span.offset},
        {"length", d.span.length},
        {"message", d.message},
    };
    if (d.suggestion) j["suggestion"] = *d.suggestion;
    return j;
}

Json to_json(const Verdict& v, const CheckConfig& cfg) {
    Json scenario = Json::object();
    for (const auto& [m, value] : v.scenario) scenario[m] = value;
    return Json{
        {"kind", std::string(to_string(v.kind))},
        {"rules", v.rules},
        {"trace", v.trace ? Json(format_trace(*v.trace, cfg)) : Json(nullptr)},
        {"scenario", std::move(scenario)},
        {"message", v.message},
    };
}

Json diagnostics_json(const std::vector<Diagnostic>& diags) {
    Json out = Json::array();
    for (const auto& d : diags) out.push_back(to_json(d));
    return out;
}

Json verdicts_json(const std::vector<Verdict>& verdicts, const CheckConfig& cfg) {
    Json out = Json::array();
    for (const auto& v : verdicts) out.push_back(to_json(v, cfg));
    return out;
}

Json analysis_json(const std::vector<Diagnostic>& diags, const CheckReport& report, const CheckConfig& cfg) {
    return Json{
        {"diagnostics", diagnostics_json(diags)},
        {"verdicts", verdicts_json(report.verdicts, cfg)},
        {"warnings", report.warnings},
        {"partial", report.partial},
    };
}

Json to_json(const ExplanationReport& r) { return Json::parse(report_to_json(r)); }

Suggestion suggestion_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("suggestion must be a JSON object");
    auto str = [&](const char* key) -> std::string {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return {};
        if (!it->is_string()) throw std::invalid_argument(std::string("\"") + key + "\" must be a string");
        return it->get<std::string>();
    };
    Suggestion s;
    const std::string kind = str("kind");
    auto k = resolution_kind_from(kind);
    if (!k) throw std::invalid_argument("unknown suggestion kind '" + kind + "'");
    s.kind = *k;
    s.target_rule_id = str("target_rule_id");
    s.sleec_text = str("sleec_text");
    return s;
}

Json to_json(const Suggestion& s) {
    return Json{{"kind", std::string(to_string(s.kind))}, {"target_rule_id", s.target_rule_id}, {"sleec_text", s.sleec_text}};
}

}  // namespace sleec
