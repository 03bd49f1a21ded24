#include <algorithm>

#include "sleec/explain.hpp"

namespace sleec {

namespace {

std::vector<std::string> split_ids(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && std::find(out.begin(), out.end(), cur) == out.end()) out.push_back(cur);
        cur.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\n') flush();
        else cur += c;
    }
    flush();
    return out;
}

Diagnostic error(DiagnosticCategory cat, std::string message) {
    return Diagnostic{Severity::Error, cat, {}, std::move(message), std::nullopt};
}

}  // namespace

Suggestion suggestion_from(const ExplanationReport& report, int which) {
    const ReportSuggestion& s = which == 2 ? report.suggestion2 : report.suggestion1;
    Suggestion out;
    out.kind = report.kind;
    out.target_rule_id = s.rule;
    if (report.kind != ResolutionKind::RemoveRule) out.sleec_text = s.text;
    return out;
}

SuggestionOutcome validate_suggestion(const Spec& spec, Suggestion s, const CheckConfig& cfg) {
    SuggestionOutcome out;
    const std::vector<std::string> targets = split_ids(s.target_rule_id);

    // An addition names the rule it introduces; every other kind names existing rules.
    if (s.kind != ResolutionKind::AddRule) {
        for (const auto& t : targets) {
            if (!spec.find_rule(t))
                out.diagnostics.push_back(error(DiagnosticCategory::Naming, "no rule named '" + t + "'"));
        }
    }
    const bool needs_target = s.kind != ResolutionKind::AddRule;
    if (needs_target && targets.empty() && s.kind != ResolutionKind::ModifyRule)
        out.diagnostics.push_back(error(DiagnosticCategory::Naming, "the suggestion does not say which rule to change"));
    if (s.kind == ResolutionKind::RemoveRule && !s.sleec_text.empty())
        out.diagnostics.push_back(error(DiagnosticCategory::Syntax, "a removal carries no rule text"));
    if (s.kind == ResolutionKind::CombineRule && targets.size() < 2)
        out.diagnostics.push_back(error(DiagnosticCategory::Naming, "combining needs at least two rules"));

    if (s.kind != ResolutionKind::RemoveRule) {
        auto parsed = parse_rule(s.sleec_text);
        out.diagnostics.insert(out.diagnostics.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
        if (!parsed.rule && !has_errors(parsed.diagnostics))
            out.diagnostics.push_back(error(DiagnosticCategory::Syntax, "the suggestion contains no rule"));
        s.parsed = parsed.rule;
    }
    if (s.kind == ResolutionKind::ModifyRule && targets.empty() && s.parsed) {
        if (!spec.find_rule(s.parsed->id))
            out.diagnostics.push_back(error(DiagnosticCategory::Naming, "no rule named '" + s.parsed->id + "'"));
    }
    if (s.kind == ResolutionKind::AddRule && s.parsed) {
        if (spec.find_rule(s.parsed->id))
            out.diagnostics.push_back(error(DiagnosticCategory::Naming, "a rule named '" + s.parsed->id + "' already exists"));
        if (!targets.empty() && (targets.size() > 1 || targets.front() != s.parsed->id))
            out.diagnostics.push_back(error(DiagnosticCategory::Naming, "the added rule is named '" + s.parsed->id +
                                                                            "', not '" + s.target_rule_id + "'"));
    }
    if (s.kind == ResolutionKind::ModifyRule && targets.size() > 1)
        out.diagnostics.push_back(error(DiagnosticCategory::Naming, "a modification replaces exactly one rule"));
    if (has_errors(out.diagnostics)) return out;

    Spec edited = spec;
    auto& rules = edited.rules;
    auto position = [&](const std::string& id) {
        return std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return r.id == id; });
    };
    switch (s.kind) {
        case ResolutionKind::AddRule:
            rules.push_back(*s.parsed);
            break;
        case ResolutionKind::RemoveRule:
            for (const auto& t : targets) rules.erase(position(t));
            break;
        case ResolutionKind::ModifyRule:
            *position(targets.empty() ? s.parsed->id : targets.front()) = *s.parsed;
            break;
        case ResolutionKind::CombineRule: {
            const auto at = std::min_element(targets.begin(), targets.end(), [&](const auto& a, const auto& b) {
                return position(a) < position(b);
            });
            const std::string keep = *at;
            for (const auto& t : targets)
                if (t != keep) rules.erase(position(t));
            *position(keep) = *s.parsed;
            break;
        }
    }

    // Re-analyse the canonical text so spans in any diagnostics point into it.
    const std::string text = format(edited);
    Analysis a = analyze_text(text, cfg);
    out.diagnostics = std::move(a.diagnostics);
    if (has_errors(out.diagnostics)) return out;
    out.applied = true;
    out.spec = std::move(a.spec);
    out.text = text;
    out.report = std::move(a.report);
    return out;
}

}  // namespace sleec
