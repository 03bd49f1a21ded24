#include "sleec/ast.hpp"

#include <algorithm>

namespace sleec {

std::int64_t seconds_per(TimeUnit unit) {
    switch (unit) {
        case TimeUnit::Seconds: return 1;
        case TimeUnit::Minutes: return 60;
        case TimeUnit::Hours: return 3600;
        case TimeUnit::Days: return 86400;
    }
    return 1;
}

std::string_view unit_name(TimeUnit unit, std::int64_t amount) {
    const bool one = amount == 1;
    switch (unit) {
        case TimeUnit::Seconds: return one ? "second" : "seconds";
        case TimeUnit::Minutes: return one ? "minute" : "minutes";
        case TimeUnit::Hours: return one ? "hour" : "hours";
        case TimeUnit::Days: return one ? "day" : "days";
    }
    return "minutes";
}

std::string_view op_text(CompareOp op) {
    switch (op) {
        case CompareOp::Lt: return "<";
        case CompareOp::Gt: return ">";
        case CompareOp::Le: return "<=";
        case CompareOp::Ge: return ">=";
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "<>";
    }
    return "=";
}

ConditionPtr Condition::atom(std::string measure, SourceSpan span) {
    return std::make_shared<const Condition>(BoolAtom{std::move(measure), span});
}

ConditionPtr Condition::compare(std::string measure, CompareOp op, Operand rhs, SourceSpan span) {
    return std::make_shared<const Condition>(Comparison{std::move(measure), op, std::move(rhs), span});
}

ConditionPtr Condition::negate(ConditionPtr operand) {
    return std::make_shared<const Condition>(Negation{std::move(operand)});
}

ConditionPtr Condition::conjoin(ConditionPtr lhs, ConditionPtr rhs) {
    return std::make_shared<const Condition>(Conjunction{std::move(lhs), std::move(rhs)});
}

ConditionPtr Condition::disjoin(ConditionPtr lhs, ConditionPtr rhs) {
    return std::make_shared<const Condition>(Disjunction{std::move(lhs), std::move(rhs)});
}

bool operator==(const Condition& a, const Condition& b) {
    if (a.node_.index() != b.node_.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node_);
            if constexpr (std::is_same_v<T, BoolAtom>) {
                return x.measure == y.measure;
            } else if constexpr (std::is_same_v<T, Comparison>) {
                return x.measure == y.measure && x.op == y.op && x.rhs == y.rhs;
            } else if constexpr (std::is_same_v<T, Negation>) {
                return same_condition(x.operand, y.operand);
            } else {
                return same_condition(x.lhs, y.lhs) && same_condition(x.rhs, y.rhs);
            }
        },
        a.node_);
}

bool same_condition(const ConditionPtr& a, const ConditionPtr& b) {
    if (!a || !b) return !a && !b;
    return *a == *b;
}

namespace {
template <typename T>
const T* find_named(const std::vector<T>& items, std::string_view name) {
    auto it = std::find_if(items.begin(), items.end(), [&](const T& d) { return d.name == name; });
    return it == items.end() ? nullptr : &*it;
}
}  // namespace

const EventDef* Spec::find_event(std::string_view name) const { return find_named(events, name); }
const MeasureDef* Spec::find_measure(std::string_view name) const { return find_named(measures, name); }
const ConstantDef* Spec::find_constant(std::string_view name) const { return find_named(constants, name); }

const Rule* Spec::find_rule(std::string_view id) const {
    auto it = std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return r.id == id; });
    return it == rules.end() ? nullptr : &*it;
}

}  // namespace sleec
