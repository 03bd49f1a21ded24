#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sleec/explain.hpp"
#include "sleec/json_io.hpp"

namespace py = pybind11;
using namespace sleec;

namespace {

CheckConfig config(std::optional<int> horizon, std::optional<int> max_env) {
    CheckConfig cfg;
    if (horizon) cfg.horizon_ticks = *horizon;
    if (max_env) cfg.max_env_events_per_instant = *max_env;
    return cfg;
}

/// Analysis that must be error-free and have a verdict at `index`.
std::pair<Analysis, Verdict> verdict_at(const std::string& text, std::size_t index, const CheckConfig& cfg) {
    Analysis a = analyze_text(text, cfg);
    if (index >= a.report.verdicts.size())
        throw py::index_error("verdict " + std::to_string(index) + " out of range; there are " +
                              std::to_string(a.report.verdicts.size()));
    Verdict v = a.report.verdicts[index];
    return {std::move(a), std::move(v)};
}

std::string check(const std::string& text, std::optional<int> horizon, std::optional<int> max_env) {
    const CheckConfig cfg = config(horizon, max_env);
    Analysis a;
    {
        py::gil_scoped_release release;
        a = analyze_text(text, cfg);
    }
    Json j = analysis_json(a.diagnostics, a.report, cfg);
    j["checked"] = a.checked;
    return j.dump();
}

std::string format_text(const std::string& text) {
    auto parsed = parse(text);
    if (!parsed.ok()) throw py::value_error(diagnostics_json(parsed.diagnostics).dump());
    return format(parsed.spec);
}

py::tuple prompt(const std::string& text, std::size_t verdict, const std::string& description) {
    const CheckConfig cfg;
    auto [a, v] = verdict_at(text, verdict, cfg);
    const std::string body = build_prompt(a.spec, v, description, cfg).text();
    return py::make_tuple(body, prompt_hash(body));
}

std::string explain(const std::string& text, std::size_t verdict, const std::string& description,
                    std::optional<std::string> fixtures_dir) {
    const CheckConfig cfg;
    auto [a, v] = verdict_at(text, verdict, cfg);
    LlmConfig llm;
    if (fixtures_dir) llm.fixtures_dir = *fixtures_dir;
    Explainer explainer(make_provider(llm), nullptr);
    return to_json(explainer.explain(a.spec, v, description, cfg).report).dump();
}

std::string parse_report_json(const std::string& raw) { return to_json(parse_report(raw)).dump(); }

std::string apply(const std::string& text, const std::string& suggestion_json) {
    const CheckConfig cfg;
    const Analysis a = analyze_text(text, cfg);
    if (has_errors(a.diagnostics)) throw py::value_error(diagnostics_json(a.diagnostics).dump());
    const SuggestionOutcome o = validate_suggestion(a.spec, suggestion_from_json(Json::parse(suggestion_json)), cfg);
    Json j = analysis_json(o.diagnostics, o.report, cfg);
    j["applied"] = o.applied;
    j["text"] = o.applied ? Json(o.text) : Json(nullptr);
    return j.dump();
}

}  // namespace

PYBIND11_MODULE(_sleec, m) {
    m.doc() = "Checker, formatter and explanation pipeline for SLEEC rulesets (JSON in, JSON out).";

    py::register_exception<ReportError>(m, "ReportError", PyExc_ValueError);

    m.def("check", &check, py::arg("text"), py::arg("horizon") = py::none(), py::arg("max_env_events") = py::none());
    m.def("format", &format_text, py::arg("text"));
    m.def("prompt", &prompt, py::arg("text"), py::arg("verdict") = 0, py::arg("system_description") = "");
    m.def("explain", &explain, py::arg("text"), py::arg("verdict") = 0, py::arg("system_description") = "",
          py::arg("fixtures_dir") = py::none());
    m.def("parse_report", &parse_report_json, py::arg("raw"));
    m.def("apply_suggestion", &apply, py::arg("text"), py::arg("suggestion"));
    m.def("prompt_hash", [](const std::string& s) { return prompt_hash(s); }, py::arg("text"));
}
