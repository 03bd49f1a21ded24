#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sleec/ast.hpp"

namespace sleec {

using Tick = std::int64_t;

/// Raised when a spec cannot be compiled into a bounded model.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr Tick kMaxDeadlineTicks = 1'000'000;

struct TickScale {
    /// Smallest unit used by any `within` clause; minutes when there are none.
    TimeUnit base_unit = TimeUnit::Minutes;
    /// Base-response deadline of each rule that has one, in ticks.
    std::map<std::string, Tick> ticks_per_deadline;

    Tick ticks(const TimeValue& t) const;
};

/// Throws ConfigError when a deadline exceeds kMaxDeadlineTicks at the chosen base unit.
TickScale tick_scale(const Spec& spec);

/// Finite value set of one measure. Values are encoded as integers: booleans as
/// 1/0, scale literals by declaration index, numerics by their representative.
struct MeasureDomain {
    std::string measure;
    MeasureKind kind = MeasureKind::Boolean;
    std::vector<std::int64_t> values;  // canonical enumeration order
    std::vector<std::string> labels;   // printed form, parallel to values
};

struct AbstractDomain {
    /// Referenced measures only, in declaration order.
    std::vector<MeasureDomain> measures;

    const MeasureDomain* find(std::string_view measure) const;
};

/// Booleans take {true, false}; scales their literals; numerics one
/// representative per interval cut out by the thresholds they are compared with.
AbstractDomain abstract_domains(const Spec& spec);

struct Obligation {
    std::size_t rule = 0;
    Polarity polarity = Polarity::Must;
    std::size_t event = 0;
    Tick activated_at = 0;
    Tick deadline_at = 0;

    friend bool operator==(const Obligation&, const Obligation&) = default;
    friend auto operator<=>(const Obligation&, const Obligation&) = default;
};

/// Measure values indexed by Model measure index.
using Valuation = std::vector<std::int64_t>;

struct WorldStep {
    std::vector<std::size_t> fired_events;
    Valuation valuation;
};

struct Configuration {
    Tick clock = 0;
    std::vector<Obligation> active;
    int instantaneous_depth = 0;
};

struct TraceEntry {
    enum class Kind { Event, Measure, Tock };

    Kind kind = Kind::Tock;
    std::string name;   // event or measure name
    std::string value;  // measure value label

    static TraceEntry event(std::string name) { return {Kind::Event, std::move(name), {}}; }
    static TraceEntry measure(std::string name, std::string value) {
        return {Kind::Measure, std::move(name), std::move(value)};
    }
    static TraceEntry tock() { return {Kind::Tock, {}, {}}; }

    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

using Trace = std::vector<TraceEntry>;

/// Index-based compilation of a typechecked Spec. Immutable after construction.
class Model {
public:
    struct Response {
        Polarity polarity = Polarity::Must;
        std::size_t event = 0;
        Tick ticks = 0;  // 0: immediate
    };

    struct Defeater {
        int condition = -1;
        std::optional<Response> response;
    };

    struct Rule {
        std::string id;
        std::size_t trigger = 0;
        int trigger_condition = -1;  // -1: none
        Response response;
        std::vector<Defeater> defeaters;
        std::vector<std::size_t> measures_read;  // sorted
    };

    explicit Model(const Spec& spec);

    const Spec& spec() const { return spec_; }
    const TickScale& ticks() const { return ticks_; }
    const AbstractDomain& domain() const { return domain_; }

    std::size_t event_count() const { return spec_.events.size(); }
    std::size_t measure_count() const { return spec_.measures.size(); }
    std::size_t rule_count() const { return rules_.size(); }

    const std::string& event_name(std::size_t e) const { return spec_.events[e].name; }
    const std::string& measure_name(std::size_t m) const { return spec_.measures[m].name; }
    std::optional<std::size_t> event_index(std::string_view name) const;
    std::optional<std::size_t> measure_index(std::string_view name) const;
    std::optional<std::size_t> rule_index(std::string_view id) const;

    const Rule& rule(std::size_t r) const { return rules_[r]; }
    const std::vector<std::size_t>& rules_triggered_by(std::size_t event) const { return by_trigger_[event]; }

    /// Domain of measure `m`, or null when no rule reads it.
    const MeasureDomain* domain_of(std::size_t m) const;
    std::string value_label(std::size_t m, std::int64_t value) const;
    std::optional<std::int64_t> parse_value(std::size_t m, std::string_view label) const;

    /// A valuation assigning every referenced measure its first domain value.
    Valuation default_valuation() const;

    bool holds(int condition, const Valuation& v) const;

private:
    struct Node {
        enum class Op { Atom, Compare, Not, And, Or } op = Op::Atom;
        std::size_t measure = 0;
        CompareOp cmp = CompareOp::Eq;
        std::int64_t operand = 0;
        int lhs = -1, rhs = -1;
    };

    int compile(const Condition& cond);
    Response compile(const sleec::Response& r) const;

    Spec spec_;
    TickScale ticks_;
    AbstractDomain domain_;
    std::vector<int> domain_index_;  // measure -> index into domain_.measures, -1 if unread
    std::vector<Rule> rules_;
    std::vector<std::vector<std::size_t>> by_trigger_;
    std::vector<Node> nodes_;
};

/// Truth of a condition under a valuation; scale comparisons follow declaration order.
bool evaluate_condition(const Model& model, const Condition& cond, const Valuation& valuation);

/// Convenience overload over printed values, e.g. {"emergencyLevel": "L1"}.
bool evaluate_condition(const Model& model, const Condition& cond,
                        const std::map<std::string, std::string>& valuation);

/// Obligation created by `rule` in `step`, if any. The last defeater whose
/// condition holds decides the response; a defeater without a response cancels it.
std::optional<Obligation> activate(const Model& model, std::size_t rule, const WorldStep& step, Tick clock);

/// Result of replaying a trace with sequential event semantics.
struct ReplayResult {
    Configuration final_state;
    /// Obligations that were broken along the way (empty for a well-formed witness).
    std::vector<std::string> violations;
};

ReplayResult replay(const Model& model, const Trace& trace);

/// A Must obligation due now whose event is forbidden by active prohibitions.
struct BlockedObligation {
    std::size_t event = 0;
    std::vector<std::size_t> must_rules;
    std::vector<std::size_t> forbidding_rules;
};

std::vector<BlockedObligation> blocked_obligations(const Configuration& state);

}  // namespace sleec
