#include "sleec/semantics.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace sleec {

Tick TickScale::ticks(const TimeValue& t) const {
    const std::int64_t factor = seconds_per(t.unit) / seconds_per(base_unit);
    if (factor <= 0 || t.amount > kMaxDeadlineTicks / factor) {
        throw ConfigError("deadline 'within " + std::to_string(t.amount) + " " +
                          std::string(unit_name(t.unit, t.amount)) + "' exceeds " +
                          std::to_string(kMaxDeadlineTicks) + " ticks at base unit " +
                          std::string(unit_name(base_unit, 2)) + "; use coarser time units");
    }
    return t.amount * factor;
}

namespace {

template <typename Fn>
void for_each_response(const Spec& spec, Fn&& fn) {
    for (const auto& r : spec.rules) {
        fn(r, r.response);
        for (const auto& d : r.defeaters)
            if (d.response) fn(r, *d.response);
    }
}

}  // namespace

TickScale tick_scale(const Spec& spec) {
    TickScale scale;
    bool any = false;
    for_each_response(spec, [&](const Rule&, const Response& resp) {
        if (!resp.deadline) return;
        if (!any || seconds_per(resp.deadline->unit) < seconds_per(scale.base_unit)) scale.base_unit = resp.deadline->unit;
        any = true;
    });
    for_each_response(spec, [&](const Rule& rule, const Response& resp) {
        if (!resp.deadline) return;
        const Tick t = scale.ticks(*resp.deadline);
        if (&resp == &rule.response) scale.ticks_per_deadline[rule.id] = t;
    });
    return scale;
}

const MeasureDomain* AbstractDomain::find(std::string_view measure) const {
    for (const auto& m : measures)
        if (m.measure == measure) return &m;
    return nullptr;
}

namespace {

std::int64_t saturating_add(std::int64_t a, std::int64_t b) {
    if (b > 0 && a > std::numeric_limits<std::int64_t>::max() - b) return std::numeric_limits<std::int64_t>::max();
    if (b < 0 && a < std::numeric_limits<std::int64_t>::min() - b) return std::numeric_limits<std::int64_t>::min();
    return a + b;
}

std::vector<std::int64_t> interval_representatives(const std::set<std::int64_t>& thresholds) {
    if (thresholds.empty()) return {0};
    std::vector<std::int64_t> reps;
    reps.push_back(saturating_add(*thresholds.begin(), -1));
    for (auto it = thresholds.begin(); it != thresholds.end(); ++it) {
        reps.push_back(*it);
        auto next = std::next(it);
        const std::int64_t above = saturating_add(*it, 1);
        if (next == thresholds.end() || above < *next) reps.push_back(above);
    }
    reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
    return reps;
}

}  // namespace

AbstractDomain abstract_domains(const Spec& spec) {
    std::set<std::string> referenced;
    std::map<std::string, std::set<std::int64_t>> thresholds;
    auto scan = [&](const ConditionPtr& c) {
        if (!c) return;
        for_each_measure(*c, [&](const std::string& name, SourceSpan) { referenced.insert(name); });
        for_each_comparison(*c, [&](const Comparison& cmp) {
            if (!cmp.rhs.is_identifier()) {
                thresholds[cmp.measure].insert(cmp.rhs.integer());
            } else if (const ConstantDef* k = spec.find_constant(cmp.rhs.identifier())) {
                thresholds[cmp.measure].insert(k->value);
            }
        });
    };
    for (const auto& r : spec.rules) {
        scan(r.trigger_condition);
        for (const auto& d : r.defeaters) scan(d.condition);
    }

    AbstractDomain domain;
    for (const auto& m : spec.measures) {
        if (!referenced.count(m.name)) continue;
        MeasureDomain d;
        d.measure = m.name;
        d.kind = m.kind;
        switch (m.kind) {
            case MeasureKind::Boolean:
                d.values = {1, 0};
                d.labels = {"true", "false"};
                break;
            case MeasureKind::Scale:
                for (std::size_t i = 0; i < m.scale.size(); ++i) {
                    d.values.push_back(static_cast<std::int64_t>(i));
                    d.labels.push_back(m.scale[i]);
                }
                break;
            case MeasureKind::Numeric:
                d.values = interval_representatives(thresholds[m.name]);
                for (auto v : d.values) d.labels.push_back(std::to_string(v));
                break;
        }
        domain.measures.push_back(std::move(d));
    }
    return domain;
}

// ---------------------------------------------------------------------------

Model::Model(const Spec& spec)
    : spec_(spec), ticks_(tick_scale(spec)), domain_(abstract_domains(spec)) {
    domain_index_.assign(spec_.measures.size(), -1);
    for (std::size_t m = 0; m < spec_.measures.size(); ++m) {
        for (std::size_t d = 0; d < domain_.measures.size(); ++d)
            if (domain_.measures[d].measure == spec_.measures[m].name) domain_index_[m] = static_cast<int>(d);
    }
    by_trigger_.resize(spec_.events.size());
    for (std::size_t i = 0; i < spec_.rules.size(); ++i) {
        const sleec::Rule& src = spec_.rules[i];
        Rule r;
        r.id = src.id;
        auto trig = event_index(src.trigger_event);
        if (!trig) throw ConfigError("rule '" + src.id + "' is triggered by undefined event '" + src.trigger_event + "'");
        r.trigger = *trig;
        std::set<std::size_t> read;
        auto note = [&](const ConditionPtr& c) {
            if (!c) return;
            for_each_measure(*c, [&](const std::string& name, SourceSpan) {
                if (auto m = measure_index(name)) read.insert(*m);
            });
        };
        if (src.trigger_condition) r.trigger_condition = compile(*src.trigger_condition);
        note(src.trigger_condition);
        r.response = compile(src.response);
        for (const auto& d : src.defeaters) {
            Defeater cd;
            cd.condition = compile(*d.condition);
            if (d.response) cd.response = compile(*d.response);
            note(d.condition);
            r.defeaters.push_back(cd);
        }
        r.measures_read.assign(read.begin(), read.end());
        by_trigger_[r.trigger].push_back(i);
        rules_.push_back(std::move(r));
    }
}

Model::Response Model::compile(const sleec::Response& r) const {
    Response out;
    out.polarity = r.polarity;
    auto ev = event_index(r.event);
    if (!ev) throw ConfigError("response refers to undefined event '" + r.event + "'");
    out.event = *ev;
    out.ticks = r.deadline ? ticks_.ticks(*r.deadline) : 0;
    return out;
}

int Model::compile(const Condition& cond) {
    Node node;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolAtom>) {
                node.op = Node::Op::Atom;
                node.measure = measure_index(n.measure).value();
            } else if constexpr (std::is_same_v<T, Comparison>) {
                node.op = Node::Op::Compare;
                node.measure = measure_index(n.measure).value();
                node.cmp = n.op;
                const MeasureDef& m = spec_.measures[node.measure];
                if (!n.rhs.is_identifier()) {
                    node.operand = n.rhs.integer();
                } else if (m.kind == MeasureKind::Scale) {
                    auto it = std::find(m.scale.begin(), m.scale.end(), n.rhs.identifier());
                    if (it == m.scale.end())
                        throw ConfigError("'" + n.rhs.identifier() + "' is not a value of '" + m.name + "'");
                    node.operand = it - m.scale.begin();
                } else if (const ConstantDef* k = spec_.find_constant(n.rhs.identifier())) {
                    node.operand = k->value;
                } else {
                    throw ConfigError("undefined constant '" + n.rhs.identifier() + "'");
                }
            } else if constexpr (std::is_same_v<T, Negation>) {
                node.op = Node::Op::Not;
                node.lhs = compile(*n.operand);
            } else {
                node.op = std::is_same_v<T, Conjunction> ? Node::Op::And : Node::Op::Or;
                node.lhs = compile(*n.lhs);
                node.rhs = compile(*n.rhs);
            }
        },
        cond.node());
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size() - 1);
}

bool Model::holds(int condition, const Valuation& v) const {
    const Node& n = nodes_[static_cast<std::size_t>(condition)];
    switch (n.op) {
        case Node::Op::Atom: return v[n.measure] != 0;
        case Node::Op::Not: return !holds(n.lhs, v);
        case Node::Op::And: return holds(n.lhs, v) && holds(n.rhs, v);
        case Node::Op::Or: return holds(n.lhs, v) || holds(n.rhs, v);
        case Node::Op::Compare: {
            const std::int64_t x = v[n.measure];
            switch (n.cmp) {
                case CompareOp::Lt: return x < n.operand;
                case CompareOp::Gt: return x > n.operand;
                case CompareOp::Le: return x <= n.operand;
                case CompareOp::Ge: return x >= n.operand;
                case CompareOp::Eq: return x == n.operand;
                case CompareOp::Ne: return x != n.operand;
            }
        }
    }
    return false;
}

std::optional<std::size_t> Model::event_index(std::string_view name) const {
    for (std::size_t i = 0; i < spec_.events.size(); ++i)
        if (spec_.events[i].name == name) return i;
    return std::nullopt;
}

std::optional<std::size_t> Model::measure_index(std::string_view name) const {
    for (std::size_t i = 0; i < spec_.measures.size(); ++i)
        if (spec_.measures[i].name == name) return i;
    return std::nullopt;
}

std::optional<std::size_t> Model::rule_index(std::string_view id) const {
    for (std::size_t i = 0; i < rules_.size(); ++i)
        if (rules_[i].id == id) return i;
    return std::nullopt;
}

const MeasureDomain* Model::domain_of(std::size_t m) const {
    const int d = domain_index_[m];
    return d < 0 ? nullptr : &domain_.measures[static_cast<std::size_t>(d)];
}

std::string Model::value_label(std::size_t m, std::int64_t value) const {
    const MeasureDef& def = spec_.measures[m];
    switch (def.kind) {
        case MeasureKind::Boolean: return value ? "true" : "false";
        case MeasureKind::Scale:
            if (value >= 0 && static_cast<std::size_t>(value) < def.scale.size())
                return def.scale[static_cast<std::size_t>(value)];
            return std::to_string(value);
        case MeasureKind::Numeric: return std::to_string(value);
    }
    return std::to_string(value);
}

std::optional<std::int64_t> Model::parse_value(std::size_t m, std::string_view label) const {
    const MeasureDef& def = spec_.measures[m];
    switch (def.kind) {
        case MeasureKind::Boolean:
            if (label == "true") return 1;
            if (label == "false") return 0;
            return std::nullopt;
        case MeasureKind::Scale: {
            auto it = std::find(def.scale.begin(), def.scale.end(), label);
            if (it == def.scale.end()) return std::nullopt;
            return it - def.scale.begin();
        }
        case MeasureKind::Numeric:
            try {
                std::size_t used = 0;
                const std::string s(label);
                const long long v = std::stoll(s, &used);
                if (used != s.size()) return std::nullopt;
                return v;
            } catch (const std::exception&) {
                return std::nullopt;
            }
    }
    return std::nullopt;
}

Valuation Model::default_valuation() const {
    Valuation v(spec_.measures.size(), 0);
    for (std::size_t m = 0; m < v.size(); ++m)
        if (const MeasureDomain* d = domain_of(m)) v[m] = d->values.front();
    return v;
}

// ---------------------------------------------------------------------------

namespace {

bool eval_ast(const Model& model, const Condition& cond, const Valuation& v) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolAtom>) {
                return v.at(model.measure_index(n.measure).value()) != 0;
            } else if constexpr (std::is_same_v<T, Comparison>) {
                const std::size_t m = model.measure_index(n.measure).value();
                const MeasureDef& def = model.spec().measures[m];
                std::int64_t rhs = 0;
                if (!n.rhs.is_identifier()) {
                    rhs = n.rhs.integer();
                } else if (def.kind == MeasureKind::Scale) {
                    rhs = model.parse_value(m, n.rhs.identifier()).value();
                } else {
                    rhs = model.spec().find_constant(n.rhs.identifier())->value;
                }
                const std::int64_t x = v.at(m);
                switch (n.op) {
                    case CompareOp::Lt: return x < rhs;
                    case CompareOp::Gt: return x > rhs;
                    case CompareOp::Le: return x <= rhs;
                    case CompareOp::Ge: return x >= rhs;
                    case CompareOp::Eq: return x == rhs;
                    case CompareOp::Ne: return x != rhs;
                }
                return false;
            } else if constexpr (std::is_same_v<T, Negation>) {
                return !eval_ast(model, *n.operand, v);
            } else if constexpr (std::is_same_v<T, Conjunction>) {
                return eval_ast(model, *n.lhs, v) && eval_ast(model, *n.rhs, v);
            } else {
                return eval_ast(model, *n.lhs, v) || eval_ast(model, *n.rhs, v);
            }
        },
        cond.node());
}

}  // namespace

bool evaluate_condition(const Model& model, const Condition& cond, const Valuation& valuation) {
    return eval_ast(model, cond, valuation);
}

bool evaluate_condition(const Model& model, const Condition& cond,
                        const std::map<std::string, std::string>& valuation) {
    Valuation v = model.default_valuation();
    for (const auto& [name, label] : valuation) {
        auto m = model.measure_index(name);
        if (!m) throw ConfigError("unknown measure '" + name + "'");
        auto value = model.parse_value(*m, label);
        if (!value) throw ConfigError("'" + label + "' is not a value of measure '" + name + "'");
        v[*m] = *value;
    }
    return eval_ast(model, cond, v);
}

std::optional<Obligation> activate(const Model& model, std::size_t rule, const WorldStep& step, Tick clock) {
    const Model::Rule& r = model.rule(rule);
    if (std::find(step.fired_events.begin(), step.fired_events.end(), r.trigger) == step.fired_events.end())
        return std::nullopt;
    if (r.trigger_condition >= 0 && !model.holds(r.trigger_condition, step.valuation)) return std::nullopt;
    const Model::Response* chosen = &r.response;
    for (const auto& d : r.defeaters) {
        if (!model.holds(d.condition, step.valuation)) continue;
        chosen = d.response ? &*d.response : nullptr;
    }
    if (!chosen) return std::nullopt;
    return Obligation{rule, chosen->polarity, chosen->event, clock, clock + chosen->ticks};
}

// ---------------------------------------------------------------------------

namespace {

bool forbidden(const Configuration& state, std::size_t event) {
    return std::any_of(state.active.begin(), state.active.end(), [&](const Obligation& o) {
        return o.polarity == Polarity::MustNot && o.event == event && o.activated_at <= state.clock &&
               state.clock <= o.deadline_at;
    });
}

}  // namespace

ReplayResult replay(const Model& model, const Trace& trace) {
    ReplayResult out;
    Configuration& st = out.final_state;
    std::size_t i = 0;
    while (i < trace.size()) {
        // measures are sampled once per instant, so gather the instant's observations first
        Valuation v = model.default_valuation();
        std::size_t end = i;
        while (end < trace.size() && trace[end].kind != TraceEntry::Kind::Tock) {
            const TraceEntry& e = trace[end];
            if (e.kind == TraceEntry::Kind::Measure) {
                auto m = model.measure_index(e.name);
                auto value = m ? model.parse_value(*m, e.value) : std::nullopt;
                if (!value) {
                    out.violations.push_back("unknown observation " + e.name + "." + e.value);
                } else {
                    v[*m] = *value;
                }
            }
            ++end;
        }
        st.instantaneous_depth = 0;
        for (; i < end; ++i) {
            const TraceEntry& e = trace[i];
            if (e.kind != TraceEntry::Kind::Event) continue;
            auto ev = model.event_index(e.name);
            if (!ev) {
                out.violations.push_back("unknown event " + e.name);
                continue;
            }
            if (forbidden(st, *ev))
                out.violations.push_back(e.name + " occurred while forbidden at tock " + std::to_string(st.clock));
            std::erase_if(st.active, [&](const Obligation& o) {
                return o.polarity == Polarity::Must && o.event == *ev;
            });
            WorldStep step{{*ev}, v};
            for (std::size_t r : model.rules_triggered_by(*ev)) {
                if (auto ob = activate(model, r, step, st.clock)) {
                    if (std::find(st.active.begin(), st.active.end(), *ob) == st.active.end()) st.active.push_back(*ob);
                }
            }
            ++st.instantaneous_depth;
        }
        if (i < trace.size()) {  // Tock
            for (const auto& o : st.active) {
                if (o.polarity == Polarity::Must && o.deadline_at <= st.clock)
                    out.violations.push_back("tock with " + model.event_name(o.event) + " due for rule " +
                                             model.rule(o.rule).id);
            }
            ++st.clock;
            std::erase_if(st.active, [&](const Obligation& o) { return o.deadline_at < st.clock; });
            ++i;
        }
    }
    std::sort(st.active.begin(), st.active.end());
    return out;
}

std::vector<BlockedObligation> blocked_obligations(const Configuration& state) {
    std::map<std::size_t, BlockedObligation> by_event;
    for (const auto& o : state.active) {
        if (o.polarity != Polarity::Must || o.deadline_at != state.clock || !forbidden(state, o.event)) continue;
        auto& b = by_event[o.event];
        b.event = o.event;
        b.must_rules.push_back(o.rule);
    }
    for (auto& [event, b] : by_event) {
        for (const auto& o : state.active)
            if (o.polarity == Polarity::MustNot && o.event == event && o.activated_at <= state.clock &&
                state.clock <= o.deadline_at)
                b.forbidding_rules.push_back(o.rule);
        for (auto* v : {&b.must_rules, &b.forbidding_rules}) {
            std::sort(v->begin(), v->end());
            v->erase(std::unique(v->begin(), v->end()), v->end());
        }
    }
    std::vector<BlockedObligation> out;
    for (auto& [e, b] : by_event) out.push_back(std::move(b));
    return out;
}

}  // namespace sleec
