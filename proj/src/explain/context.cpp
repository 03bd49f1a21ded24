#include <algorithm>
#include <set>
#include <sstream>

#include "sleec/explain.hpp"

namespace sleec {

namespace {

void rule_events(const Rule& r, std::set<std::string>& out) {
    out.insert(r.trigger_event);
    out.insert(r.response.event);
    for (const auto& d : r.defeaters)
        if (d.response) out.insert(d.response->event);
}

void rule_measures(const Rule& r, std::set<std::string>& out) {
    auto add = [&](const std::string& m, const SourceSpan&) { out.insert(m); };
    if (r.trigger_condition) for_each_measure(*r.trigger_condition, add);
    for (const auto& d : r.defeaters) for_each_measure(*d.condition, add);
}

void rule_identifiers(const Rule& r, std::set<std::string>& out) {
    auto add = [&](const Comparison& c) {
        if (c.rhs.is_identifier()) out.insert(c.rhs.identifier());
    };
    if (r.trigger_condition) for_each_comparison(*r.trigger_condition, add);
    for (const auto& d : r.defeaters) for_each_comparison(*d.condition, add);
}

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
    return std::any_of(a.begin(), a.end(), [&](const auto& x) { return b.count(x) > 0; });
}

int precedence(const Condition& c) {
    if (std::holds_alternative<Disjunction>(c.node())) return 1;
    if (std::holds_alternative<Conjunction>(c.node())) return 2;
    return 3;
}

std::string guard(const Condition& cond) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolAtom>) {
                return n.measure;
            } else if constexpr (std::is_same_v<T, Comparison>) {
                return n.measure + std::string(op_text(n.op)) +
                       (n.rhs.is_identifier() ? n.rhs.identifier() : std::to_string(n.rhs.integer()));
            } else if constexpr (std::is_same_v<T, Negation>) {
                const std::string inner = guard(*n.operand);
                return precedence(*n.operand) < 3 ? "not (" + inner + ")" : "not " + inner;
            } else {
                const int p = precedence(cond);
                auto side = [&](const Condition& c, bool parens) { return parens ? "(" + guard(c) + ")" : guard(c); };
                return side(*n.lhs, precedence(*n.lhs) < p) + (p == 1 ? " or " : " and ") +
                       side(*n.rhs, precedence(*n.rhs) <= p);
            }
        },
        cond.node());
}

std::string response(const Response& r, const TickScale& scale) {
    std::string out = r.polarity == Polarity::MustNot ? "not " + r.event : r.event;
    if (r.deadline) out += " within " + std::to_string(scale.ticks(*r.deadline)) + " tock";
    return out;
}

}  // namespace

Spec select_context(const Spec& spec, const Verdict& verdict) {
    std::set<std::string> events, measures;
    if (verdict.trace) {
        for (const auto& e : *verdict.trace) {
            if (e.kind == TraceEntry::Kind::Event) events.insert(e.name);
            if (e.kind == TraceEntry::Kind::Measure) measures.insert(e.name);
        }
    }
    Spec out;
    std::set<std::string> used_events, used_measures, used_ids;
    for (const auto& r : spec.rules) {
        std::set<std::string> re, rm;
        rule_events(r, re);
        rule_measures(r, rm);
        const bool named = std::find(verdict.rules.begin(), verdict.rules.end(), r.id) != verdict.rules.end();
        if (!named && !intersects(re, events) && !intersects(rm, measures)) continue;
        out.rules.push_back(r);
        used_events.insert(re.begin(), re.end());
        used_measures.insert(rm.begin(), rm.end());
        rule_identifiers(r, used_ids);
    }
    for (const auto& e : spec.events)
        if (used_events.count(e.name)) out.events.push_back(e);
    for (const auto& m : spec.measures)
        if (used_measures.count(m.name)) out.measures.push_back(m);
    for (const auto& c : spec.constants)
        if (used_ids.count(c.name)) out.constants.push_back(c);
    return out;
}

std::string render_pseudo_csp(const std::vector<Rule>& rules, const TickScale& scale) {
    std::ostringstream os;
    for (const auto& r : rules) {
        os << r.id << " = " << r.trigger_event;
        if (r.trigger_condition) os << " & " << guard(*r.trigger_condition);
        os << " -> ";
        for (auto d = r.defeaters.rbegin(); d != r.defeaters.rend(); ++d) {
            os << '(' << guard(*d->condition) << " & " << (d->response ? response(*d->response, scale) : "SKIP")
               << ") [] ";
        }
        os << response(r.response, scale) << '\n';
    }
    return os.str();
}

}  // namespace sleec
