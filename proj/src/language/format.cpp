#include <sstream>

#include "sleec/language.hpp"

namespace sleec {

namespace {

int precedence(const Condition& c) {
    if (std::holds_alternative<Disjunction>(c.node())) return 1;
    if (std::holds_alternative<Conjunction>(c.node())) return 2;
    return 3;
}

void write_condition(std::ostream& os, const Condition& cond);

void write_child(std::ostream& os, const Condition& child, bool parens) {
    if (parens) os << '(';
    write_condition(os, child);
    if (parens) os << ')';
}

void write_condition(std::ostream& os, const Condition& cond) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolAtom>) {
                os << n.measure;
            } else if constexpr (std::is_same_v<T, Comparison>) {
                os << n.measure << ' ' << op_text(n.op) << ' ';
                if (n.rhs.is_identifier()) {
                    os << n.rhs.identifier();
                } else {
                    os << n.rhs.integer();
                }
            } else if constexpr (std::is_same_v<T, Negation>) {
                os << "not ";
                write_child(os, *n.operand, precedence(*n.operand) < 3);
            } else {
                const int p = precedence(cond);
                // binary operators parse left-associatively; a right operand at the
                // same level only arises from explicit parentheses
                write_child(os, *n.lhs, precedence(*n.lhs) < p);
                os << (p == 1 ? " or " : " and ");
                write_child(os, *n.rhs, precedence(*n.rhs) <= p);
            }
        },
        cond.node());
}

void write_rule(std::ostream& os, const Rule& r, std::string_view defeater_sep) {
    os << r.id << " when " << r.trigger_event;
    if (r.trigger_condition) {
        os << " and ";
        // a top-level `or` is parenthesised so it does not read as part of the trigger
        write_child(os, *r.trigger_condition, precedence(*r.trigger_condition) < 2);
    }
    os << " then " << format_response(r.response);
    for (const auto& d : r.defeaters) {
        os << defeater_sep << "unless " << format_condition(*d.condition);
        if (d.response) os << " then " << format_response(*d.response);
    }
}

}  // namespace

std::string format_condition(const Condition& cond) {
    std::ostringstream os;
    write_condition(os, cond);
    return os.str();
}

std::string format_response(const Response& response) {
    std::string out;
    if (response.polarity == Polarity::MustNot) out += "not ";
    out += response.event;
    if (response.deadline) {
        out += " within " + std::to_string(response.deadline->amount) + " " +
               std::string(unit_name(response.deadline->unit, response.deadline->amount));
    }
    return out;
}

std::string format_rule(const Rule& rule) {
    std::ostringstream os;
    write_rule(os, rule, " ");
    return os.str();
}

std::string format(const Spec& spec) {
    std::ostringstream os;
    os << "def_start\n";
    for (const auto& e : spec.events) os << "  event " << e.name << '\n';
    for (const auto& m : spec.measures) {
        os << "  measure " << m.name << ": ";
        switch (m.kind) {
            case MeasureKind::Boolean: os << "boolean"; break;
            case MeasureKind::Numeric: os << "numeric"; break;
            case MeasureKind::Scale: {
                os << "scale(";
                for (std::size_t i = 0; i < m.scale.size(); ++i) os << (i ? ", " : "") << m.scale[i];
                os << ')';
                break;
            }
        }
        os << '\n';
    }
    for (const auto& c : spec.constants) os << "  constant " << c.name << " = " << c.value << '\n';
    os << "def_end\nrule_start\n";
    for (const auto& r : spec.rules) {
        os << "  ";
        write_rule(os, r, "\n    ");
        os << '\n';
    }
    os << "rule_end\n";
    return os.str();
}

}  // namespace sleec
