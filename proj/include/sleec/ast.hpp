#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace sleec {

/// Location of a node or token in the source text. Lines and columns are 1-based.
struct SourceSpan {
    std::size_t offset = 0;
    std::size_t length = 0;
    int line = 1;
    int col = 1;
};

enum class TimeUnit { Seconds, Minutes, Hours, Days };

/// Seconds per unit; used to pick the tick base and convert deadlines.
std::int64_t seconds_per(TimeUnit unit);
std::string_view unit_name(TimeUnit unit, std::int64_t amount);

struct TimeValue {
    std::int64_t amount = 1;
    TimeUnit unit = TimeUnit::Minutes;

    friend bool operator==(const TimeValue&, const TimeValue&) = default;
};

enum class Polarity { Must, MustNot };

struct Response {
    Polarity polarity = Polarity::Must;
    std::string event;
    std::optional<TimeValue> deadline;
    SourceSpan event_span;

    friend bool operator==(const Response& a, const Response& b) {
        return a.polarity == b.polarity && a.event == b.event && a.deadline == b.deadline;
    }
};

enum class CompareOp { Lt, Gt, Le, Ge, Eq, Ne };

std::string_view op_text(CompareOp op);

/// Right-hand side of a comparison: an integer literal or an identifier naming
/// a constant or a scale literal.
struct Operand {
    std::variant<std::int64_t, std::string> value;
    SourceSpan span;

    bool is_identifier() const { return std::holds_alternative<std::string>(value); }
    const std::string& identifier() const { return std::get<std::string>(value); }
    std::int64_t integer() const { return std::get<std::int64_t>(value); }

    friend bool operator==(const Operand& a, const Operand& b) { return a.value == b.value; }
};

class Condition;
using ConditionPtr = std::shared_ptr<const Condition>;

struct BoolAtom {
    std::string measure;
    SourceSpan span;
};

struct Comparison {
    std::string measure;
    CompareOp op = CompareOp::Eq;
    Operand rhs;
    SourceSpan span;
};

struct Negation {
    ConditionPtr operand;
};

struct Conjunction {
    ConditionPtr lhs, rhs;
};

struct Disjunction {
    ConditionPtr lhs, rhs;
};

/// Immutable boolean expression over measures. Children are shared, so copies are cheap.
class Condition {
public:
    using Node = std::variant<BoolAtom, Comparison, Negation, Conjunction, Disjunction>;

    explicit Condition(Node node) : node_(std::move(node)) {}

    static ConditionPtr atom(std::string measure, SourceSpan span = {});
    static ConditionPtr compare(std::string measure, CompareOp op, Operand rhs, SourceSpan span = {});
    static ConditionPtr negate(ConditionPtr operand);
    static ConditionPtr conjoin(ConditionPtr lhs, ConditionPtr rhs);
    static ConditionPtr disjoin(ConditionPtr lhs, ConditionPtr rhs);

    const Node& node() const { return node_; }

    /// Structural equality; spans are ignored.
    friend bool operator==(const Condition& a, const Condition& b);

private:
    Node node_;
};

bool same_condition(const ConditionPtr& a, const ConditionPtr& b);

/// Calls `fn(name, span)` for every measure mentioned in the condition.
template <typename Fn>
void for_each_measure(const Condition& cond, Fn&& fn) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolAtom>) {
                fn(n.measure, n.span);
            } else if constexpr (std::is_same_v<T, Comparison>) {
                fn(n.measure, n.span);
            } else if constexpr (std::is_same_v<T, Negation>) {
                for_each_measure(*n.operand, fn);
            } else {
                for_each_measure(*n.lhs, fn);
                for_each_measure(*n.rhs, fn);
            }
        },
        cond.node());
}

/// Calls `fn(comparison)` for every comparison in the condition.
template <typename Fn>
void for_each_comparison(const Condition& cond, Fn&& fn) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Comparison>) {
                fn(n);
            } else if constexpr (std::is_same_v<T, Negation>) {
                for_each_comparison(*n.operand, fn);
            } else if constexpr (std::is_same_v<T, Conjunction> || std::is_same_v<T, Disjunction>) {
                for_each_comparison(*n.lhs, fn);
                for_each_comparison(*n.rhs, fn);
            }
        },
        cond.node());
}

struct Defeater {
    ConditionPtr condition;
    /// Absent: the base obligation is dropped.
    std::optional<Response> response;

    friend bool operator==(const Defeater& a, const Defeater& b) {
        return same_condition(a.condition, b.condition) && a.response == b.response;
    }
};

struct Rule {
    std::string id;
    std::string trigger_event;
    ConditionPtr trigger_condition;  // may be null
    Response response;
    std::vector<Defeater> defeaters;
    SourceSpan span;
    SourceSpan trigger_span;

    friend bool operator==(const Rule& a, const Rule& b) {
        return a.id == b.id && a.trigger_event == b.trigger_event &&
               same_condition(a.trigger_condition, b.trigger_condition) && a.response == b.response &&
               a.defeaters == b.defeaters;
    }
};

struct EventDef {
    std::string name;
    SourceSpan span;

    friend bool operator==(const EventDef& a, const EventDef& b) { return a.name == b.name; }
};

enum class MeasureKind { Boolean, Numeric, Scale };

struct MeasureDef {
    std::string name;
    MeasureKind kind = MeasureKind::Boolean;
    std::vector<std::string> scale;  // ordered literals, Scale only
    SourceSpan span;

    friend bool operator==(const MeasureDef& a, const MeasureDef& b) {
        return a.name == b.name && a.kind == b.kind && a.scale == b.scale;
    }
};

struct ConstantDef {
    std::string name;
    std::int64_t value = 0;
    SourceSpan span;

    friend bool operator==(const ConstantDef& a, const ConstantDef& b) {
        return a.name == b.name && a.value == b.value;
    }
};

/// A parsed SLEEC document. Equality is structural and ignores source locations.
struct Spec {
    std::vector<EventDef> events;
    std::vector<MeasureDef> measures;
    std::vector<ConstantDef> constants;
    std::vector<Rule> rules;

    const EventDef* find_event(std::string_view name) const;
    const MeasureDef* find_measure(std::string_view name) const;
    const ConstantDef* find_constant(std::string_view name) const;
    const Rule* find_rule(std::string_view id) const;

    friend bool operator==(const Spec&, const Spec&) = default;
};

}  // namespace sleec
