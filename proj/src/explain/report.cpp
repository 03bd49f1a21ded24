#include <array>

#include <json.hpp>

#include "sleec/explain.hpp"

namespace sleec {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 3> kConflictCategories{"deadlock", "divergence", "naming"};
constexpr std::array<std::pair<ResolutionKind, std::string_view>, 4> kKinds{{
    {ResolutionKind::AddRule, "add rule"},
    {ResolutionKind::CombineRule, "combine rule"},
    {ResolutionKind::RemoveRule, "remove rule"},
    {ResolutionKind::ModifyRule, "modify rule"},
}};

constexpr std::string_view kConflictKey = "Conflicting Rules";
constexpr std::string_view kRedundancyKey = "Redundant Rules";

std::string excerpt(std::string_view s, std::size_t max = 120) {
    std::string out(s.substr(0, max));
    if (s.size() > max) out += "...";
    return out;
}

[[noreturn]] void format_error(const std::string& msg) { throw ReportError(ReportError::Kind::Format, msg); }

/// First balanced `{...}` in `raw` that parses as a JSON object.
std::optional<ordered_json> first_object(std::string_view raw) {
    for (std::size_t start = raw.find('{'); start != std::string_view::npos; start = raw.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false, escaped = false;
        for (std::size_t i = start; i < raw.size(); ++i) {
            const char c = raw[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}' && --depth == 0) {
                auto parsed = ordered_json::parse(raw.substr(start, i - start + 1), nullptr, false);
                if (!parsed.is_discarded() && parsed.is_object()) return parsed;
                break;
            }
        }
    }
    return std::nullopt;
}

void only_keys(const ordered_json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
    for (const auto& [k, _] : obj.items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            format_error("unexpected field \"" + k + "\" in " + std::string(where));
    }
}

const ordered_json& object_field(const ordered_json& obj, std::string_view where, const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end()) format_error("missing field \"" + key + "\" in " + std::string(where));
    if (!it->is_object()) format_error("field \"" + key + "\" in " + std::string(where) + " must be an object, got " +
                                       excerpt(it->dump()));
    return *it;
}

std::string string_field(const ordered_json& obj, std::string_view where, const std::string& key,
                         bool allow_null = false) {
    auto it = obj.find(key);
    if (it == obj.end()) format_error("missing field \"" + key + "\" in " + std::string(where));
    if (allow_null && it->is_null()) return {};
    if (!it->is_string())
        format_error("field \"" + key + "\" in " + std::string(where) + " must be a string, got " + excerpt(it->dump()));
    return it->get<std::string>();
}

ReportSuggestion suggestion(const ordered_json& res, const std::string& key) {
    const auto& s = object_field(res, "Resolution", key);
    only_keys(s, key, {"Rule", "Text", "Justification"});
    return {string_field(s, key, "Rule"), string_field(s, key, "Text"), string_field(s, key, "Justification")};
}

}  // namespace

std::string_view to_string(ResolutionKind kind) {
    for (const auto& [k, text] : kKinds)
        if (k == kind) return text;
    return "modify rule";
}

std::optional<ResolutionKind> resolution_kind_from(std::string_view text) {
    for (const auto& [k, name] : kKinds)
        if (name == text) return k;
    return std::nullopt;
}

bool is_conflict_category(std::string_view text) {
    return std::find(kConflictCategories.begin(), kConflictCategories.end(), text) != kConflictCategories.end();
}

std::string report_to_json(const ExplanationReport& r, int indent) {
    auto sug = [](const ReportSuggestion& s) {
        return ordered_json{{"Rule", s.rule}, {"Text", s.text}, {"Justification", s.justification}};
    };
    ordered_json body{
        {"Error",
         {{"Rule1", r.rule1},
          {"Rule2", r.rule2.value_or("")},
          {"Scenario", r.scenario},
          {"Category", r.category},
          {"Justification", r.justification}}},
        {"Resolution",
         {{"Kind", std::string(to_string(r.kind))}, {"Suggestion1", sug(r.suggestion1)}, {"Suggestion2", sug(r.suggestion2)}}},
    };
    ordered_json doc;
    doc[std::string(r.redundancy ? kRedundancyKey : kConflictKey)] = std::move(body);
    return doc.dump(indent);
}

ExplanationReport parse_report(std::string_view raw) {
    auto doc = first_object(raw);
    if (!doc) format_error("no JSON object found in response: " + excerpt(raw));

    ExplanationReport r;
    const ordered_json* body = nullptr;
    if (doc->contains(kConflictKey)) {
        only_keys(*doc, "the report", {kConflictKey});
        body = &object_field(*doc, "the report", std::string(kConflictKey));
    } else if (doc->contains(kRedundancyKey)) {
        only_keys(*doc, "the report", {kRedundancyKey});
        body = &object_field(*doc, "the report", std::string(kRedundancyKey));
        r.redundancy = true;
    } else {
        format_error("expected a \"Conflicting Rules\" or \"Redundant Rules\" object, got " + excerpt(doc->dump()));
    }
    only_keys(*body, "the report", {"Error", "Resolution"});

    const auto& err = object_field(*body, "the report", "Error");
    only_keys(err, "Error", {"Rule1", "Rule2", "Scenario", "Category", "Justification"});
    r.rule1 = string_field(err, "Error", "Rule1");
    if (r.rule1.empty()) format_error("field \"Rule1\" in Error must name a rule");
    if (auto rule2 = string_field(err, "Error", "Rule2", true); !rule2.empty()) r.rule2 = rule2;
    r.scenario = string_field(err, "Error", "Scenario");
    r.category = string_field(err, "Error", "Category");
    r.justification = string_field(err, "Error", "Justification");
    const bool category_ok = r.redundancy ? r.category == "redundancy" : is_conflict_category(r.category);
    if (!category_ok) {
        throw ReportError(ReportError::Kind::Enumeration,
                          "\"Category\" must be " +
                              std::string(r.redundancy ? "\"redundancy\"" : "one of deadlock, divergence, naming") +
                              ", got \"" + excerpt(r.category) + "\"");
    }

    const auto& res = object_field(*body, "the report", "Resolution");
    only_keys(res, "Resolution", {"Kind", "Suggestion1", "Suggestion2"});
    const std::string kind = string_field(res, "Resolution", "Kind");
    auto k = resolution_kind_from(kind);
    if (!k) {
        throw ReportError(ReportError::Kind::Enumeration,
                          "\"Kind\" must be one of add rule, combine rule, remove rule, modify rule, got \"" +
                              excerpt(kind) + "\"");
    }
    r.kind = *k;
    r.suggestion1 = suggestion(res, "Suggestion1");
    r.suggestion2 = suggestion(res, "Suggestion2");
    return r;
}

void check_references(const ExplanationReport& report, const Spec& spec) {
    for (const auto* id : {&report.rule1, report.rule2 ? &*report.rule2 : nullptr}) {
        if (id && !spec.find_rule(*id))
            throw ReportError(ReportError::Kind::Reference, "the report names rule \"" + excerpt(*id) +
                                                                "\", which is not in the ruleset");
    }
}

}  // namespace sleec
