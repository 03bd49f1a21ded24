#include <sstream>

#include "sleec/explain.hpp"

namespace sleec {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string joined(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
    return out;
}

std::string instructions_for(const Verdict& v) {
    std::ostringstream os;
    os << "The checker reported a " << to_string(v.kind) << " problem: " << v.message << "\n";
    os << "Rules involved: " << joined(v.rules) << "\n";
    os << "Category: " << to_string(v.kind) << "\n\n";
    if (v.kind == VerdictKind::Redundancy) {
        os << "Explain in plain language why the rule adds nothing to the ruleset, then propose two different "
              "resolutions.\n";
        os << "\"Category\" must be exactly \"redundancy\".\n";
    } else {
        os << "Explain in plain language the scenario in which the rules cannot all be followed, then propose two "
              "different resolutions.\n";
        os << "\"Category\" must be exactly one of: deadlock, divergence, naming.\n";
    }
    os << "\"Kind\" must be exactly one of: add rule, combine rule, remove rule, modify rule. Both suggestions use "
          "that kind.\n";
    os << "Each \"Text\" must be one complete rule in the SLEEC DSL, for example "
          "\"R3 when UserFallen then CallSupport within 2 minutes\", using only the definitions above.\n";
    os << "Reply with a single JSON object that fills in this template:\n";
    return os.str();
}

}  // namespace

std::string PromptBundle::system_message() const {
    return "You help non-technical stakeholders understand and resolve problems in normative rules written in the "
           "SLEEC DSL. Answer with a single JSON object and nothing else.";
}

std::string PromptBundle::text() const {
    std::string out;
    out += "## (1) SLEEC rules and definitions\n" + rules + "\n";
    out += "## (2) Semantics (pseudo-CSP, one process per rule)\n" + semantics + "\n";
    out += "## (3) Counterexample\n" + traces + "\n\n";
    out += "## (4) System description\n" + description + "\n\n";
    out += "## Task\n" + instructions + output_template;
    return out;
}

PromptBundle build_prompt(const Spec& spec, const Verdict& verdict, std::string_view system_description,
                          const CheckConfig& cfg) {
    PromptBundle b;
    const Spec context = select_context(spec, verdict);
    b.rules = format(context);
    b.semantics = render_pseudo_csp(context.rules, tick_scale(spec));
    b.traces = verdict.trace ? format_trace(*verdict.trace, cfg) : "No counterexample trace. " + verdict.message;
    b.description = trim(system_description);
    if (b.description.empty()) {
        b.description = std::string(kMissingDescription);
        b.warnings.push_back("no system description given; the explanation relies on the rules alone");
    }
    b.instructions = instructions_for(verdict);
    b.output_template =
        std::string(verdict.kind == VerdictKind::Redundancy ? redundancy_template() : conflict_template());
    return b;
}

}  // namespace sleec
