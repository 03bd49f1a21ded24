#include "explorer.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace sleec::detail {

namespace {

/// Compact obligation used inside the search. Activation times are dropped:
/// every stored obligation was activated at or before the current tick.
struct Ob {
    std::uint32_t event = 0;
    std::uint8_t must = 0;
    Tick deadline = 0;
    std::uint32_t rule = 0;

    friend bool operator==(const Ob&, const Ob&) = default;
    friend auto operator<=>(const Ob&, const Ob&) = default;
};

using Obs = std::vector<Ob>;
using Key = std::vector<std::int64_t>;

struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto x : k) {
            h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

/// Keeps only what can still matter: for each event the earliest-due Musts, and
/// for each (event, rule) the longest prohibition.
void normalize(Obs& obs) {
    std::sort(obs.begin(), obs.end());
    obs.erase(std::unique(obs.begin(), obs.end()), obs.end());
    Obs out;
    out.reserve(obs.size());
    for (std::size_t i = 0; i < obs.size();) {
        std::size_t j = i;
        while (j < obs.size() && obs[j].event == obs[i].event && obs[j].must == obs[i].must) ++j;
        if (obs[i].must) {
            const Tick first = obs[i].deadline;
            for (std::size_t k = i; k < j && obs[k].deadline == first; ++k) out.push_back(obs[k]);
        } else {
            std::map<std::uint32_t, Tick> longest;
            for (std::size_t k = i; k < j; ++k) longest[obs[k].rule] = std::max(longest[obs[k].rule], obs[k].deadline);
            for (const auto& [rule, d] : longest) out.push_back({obs[i].event, 0, d, rule});
        }
        i = j;
    }
    std::sort(out.begin(), out.end());
    obs = std::move(out);
}

bool forbidden(const Obs& obs, std::size_t event) {
    return std::any_of(obs.begin(), obs.end(), [&](const Ob& o) { return !o.must && o.event == event; });
}

void discharge(Obs& obs, std::size_t event) {
    std::erase_if(obs, [&](const Ob& o) { return o.must && o.event == event; });
}

void append_obs(Key& key, const Obs& obs) {
    for (const auto& o : obs) {
        key.push_back(o.event);
        key.push_back(o.must);
        key.push_back(o.deadline);
        key.push_back(o.rule);
    }
}

struct Witness {
    std::vector<std::size_t> agent_events;  // this instant, from the node onwards
    Trace tail;                             // starts at the instant's tock
    std::size_t event = 0;
};

using AgentOutcome = std::map<Signature, Witness>;
using InstantOutcome = std::map<Signature, Finding>;

class Explorer {
public:
    Explorer(const Model& model, const CheckConfig& cfg, Budget& budget)
        : model_(model), cfg_(cfg), budget_(budget) {
        for (std::size_t e = 0; e < model_.event_count(); ++e)
            if (!model_.rules_triggered_by(e).empty()) triggers_.push_back(e);
    }

    /// The environment first fixes the scenario, then plays the instants.
    InstantOutcome run() {
        InstantOutcome out;
        for (const Valuation& v : distinct_scenarios(model_, std::vector<bool>(model_.rule_count(), true))) {
            instant_memo_.clear();
            agent_memo_.clear();
            v_ = &v;
            for (const auto& [sig, f] : solve_instant(0, {}))
                if (auto it = out.find(sig); it == out.end() || f.trace.size() < it->second.trace.size()) out[sig] = f;
        }
        return out;
    }

private:
    // --- environment -------------------------------------------------------

    const InstantOutcome& solve_instant(Tick clock, const Obs& obs) {
        budget_.poll<BudgetExceeded>();
        Key key{clock};
        append_obs(key, obs);
        if (auto it = instant_memo_.find(key); it != instant_memo_.end()) return it->second;

        InstantOutcome out;
        const std::size_t max_k = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg_.max_env_events_per_instant, 0)),
                                                        triggers_.size());
        for (std::size_t k = 0; k <= max_k; ++k) {
            for_each_combination(k, [&](const std::vector<std::size_t>& fired) {
                for (auto e : fired)
                    if (forbidden(obs, e)) return;
                env_move(clock, obs, fired, *v_, out);
            });
        }
        return instant_memo_.emplace(std::move(key), std::move(out)).first->second;
    }

    void env_move(Tick clock, const Obs& obs, const std::vector<std::size_t>& fired, const Valuation& v,
                  InstantOutcome& out) {
        Obs st = obs;
        std::vector<std::size_t> immediate;
        WorldStep step{{0}, v};
        for (auto e : fired) {
            if (forbidden(st, e)) return;
            occur(st, e, clock, step, immediate);
        }
        normalize(st);
        const AgentOutcome& agent = solve_agent(clock, st, 0, v, immediate);
        for (const auto& [sig, w] : agent) {
            Trace t = compose(fired, v, w);
            auto it = out.find(sig);
            if (it == out.end() || t.size() < it->second.trace.size()) out[sig] = Finding{std::move(t), w.event};
        }
    }

    Trace compose(const std::vector<std::size_t>& fired, const Valuation& v, const Witness& w) const {
        Trace t;
        std::vector<bool> read(model_.measure_count(), false);
        auto note = [&](std::size_t e) {
            for (auto r : model_.rules_triggered_by(e))
                for (auto m : model_.rule(r).measures_read) read[m] = true;
        };
        for (auto e : fired) {
            t.push_back(TraceEntry::event(model_.event_name(e)));
            note(e);
        }
        for (auto e : w.agent_events) note(e);
        for (std::size_t m = 0; m < read.size(); ++m)
            if (read[m]) t.push_back(TraceEntry::measure(model_.measure_name(m), model_.value_label(m, v[m])));
        for (auto e : w.agent_events) t.push_back(TraceEntry::event(model_.event_name(e)));
        t.insert(t.end(), w.tail.begin(), w.tail.end());
        return t;
    }

    // --- agent -------------------------------------------------------------

    const AgentOutcome& solve_agent(Tick clock, const Obs& obs, int steps, const Valuation& v,
                                    const std::vector<std::size_t>& immediate) {
        budget_.poll<BudgetExceeded>();
        Key key{clock, steps};
        append_obs(key, obs);
        key.push_back(-1);
        key.insert(key.end(), immediate.begin(), immediate.end());
        if (auto it = agent_memo_.find(key); it != agent_memo_.end()) return it->second;
        AgentOutcome result = agent_outcome(clock, obs, steps, v, immediate);
        return agent_memo_.emplace(std::move(key), std::move(result)).first->second;
    }

    AgentOutcome agent_outcome(Tick clock, const Obs& obs, int steps, const Valuation& v,
                               const std::vector<std::size_t>& immediate) {
        // A Must due now on a forbidden event can never be met: prohibitions do not lift within an instant.
        AgentOutcome blocked;
        bool due = false;
        for (const auto& o : obs) {
            if (!o.must || o.deadline != clock) continue;
            due = true;
            if (!forbidden(obs, o.event)) continue;
            Signature sig{VerdictKind::Deadlock, {}};
            for (const auto& p : obs)
                if (p.event == o.event && (!p.must || p.deadline == clock)) sig.rules.push_back(p.rule);
            std::sort(sig.rules.begin(), sig.rules.end());
            sig.rules.erase(std::unique(sig.rules.begin(), sig.rules.end()), sig.rules.end());
            blocked.emplace(std::move(sig), Witness{{}, {}, o.event});
        }
        if (!blocked.empty()) return blocked;

        std::optional<AgentOutcome> first;
        auto lost = [&](AgentOutcome o) {
            if (o.empty()) return false;
            if (!first) first = std::move(o);
            return true;
        };

        // Option 0: let time pass.
        if (!due) {
            if (clock >= cfg_.horizon_ticks) return {};
            Obs next;
            for (const auto& o : obs)
                if (o.must || o.deadline > clock) next.push_back(o);
            const InstantOutcome& later = solve_instant(clock + 1, next);
            AgentOutcome o;
            for (const auto& [sig, f] : later) {
                Witness w{{}, {TraceEntry::tock()}, f.event};
                w.tail.insert(w.tail.end(), f.trace.begin(), f.trace.end());
                o.emplace(sig, std::move(w));
            }
            if (!lost(std::move(o))) return {};
        }

        // Options 1..n: perform one obligated event now.
        std::vector<std::size_t> pending;
        for (const auto& o : obs)
            if (o.must && !forbidden(obs, o.event)) pending.push_back(o.event);
        pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
        for (auto e : pending) {
            if (steps + 1 > cfg_.cascade_cap) {
                Signature sig{VerdictKind::Divergence, immediate};
                for (const auto& o : obs)
                    if (o.must && o.deadline == clock) sig.rules.push_back(o.rule);
                std::sort(sig.rules.begin(), sig.rules.end());
                sig.rules.erase(std::unique(sig.rules.begin(), sig.rules.end()), sig.rules.end());
                lost(AgentOutcome{{sig, Witness{{e}, {}, e}}});
                continue;
            }
            Obs st = obs;
            std::vector<std::size_t> imm = immediate;
            WorldStep step{{0}, v};
            occur(st, e, clock, step, imm);
            normalize(st);
            AgentOutcome o = solve_agent(clock, st, steps + 1, v, imm);
            for (auto& [sig, w] : o) w.agent_events.insert(w.agent_events.begin(), e);
            if (!lost(std::move(o))) return {};
        }
        return first ? std::move(*first) : AgentOutcome{};
    }

    // --- shared ------------------------------------------------------------

    /// One occurrence of `e`: discharge Musts on it, then activate the rules it triggers.
    void occur(Obs& st, std::size_t e, Tick clock, WorldStep& step, std::vector<std::size_t>& immediate) const {
        discharge(st, e);
        step.fired_events[0] = e;
        for (auto r : model_.rules_triggered_by(e)) {
            auto ob = activate(model_, r, step, clock);
            if (!ob) continue;
            const bool must = ob->polarity == Polarity::Must;
            st.push_back({static_cast<std::uint32_t>(ob->event), static_cast<std::uint8_t>(must), ob->deadline_at,
                          static_cast<std::uint32_t>(r)});
            if (must && ob->deadline_at == clock) {
                auto it = std::lower_bound(immediate.begin(), immediate.end(), r);
                if (it == immediate.end() || *it != r) immediate.insert(it, r);
            }
        }
    }

    template <typename Fn>
    void for_each_combination(std::size_t k, Fn&& fn) const {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        std::vector<std::size_t> picked(k);
        while (true) {
            for (std::size_t i = 0; i < k; ++i) picked[i] = triggers_[idx[i]];
            fn(picked);
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == triggers_.size() - k + i - 1) --i;
            if (i == 0) return;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }

    const Model& model_;
    const CheckConfig& cfg_;
    Budget& budget_;
    std::vector<std::size_t> triggers_;
    const Valuation* v_ = nullptr;
    std::unordered_map<Key, InstantOutcome, KeyHash> instant_memo_;
    std::unordered_map<Key, AgentOutcome, KeyHash> agent_memo_;
};

}  // namespace

std::vector<Valuation> distinct_scenarios(const Model& model, const std::vector<bool>& rules) {
    std::vector<int> conditions;
    for (std::size_t r = 0; r < model.rule_count(); ++r) {
        if (!rules[r]) continue;
        const auto& rule = model.rule(r);
        if (rule.trigger_condition >= 0) conditions.push_back(rule.trigger_condition);
        for (const auto& d : rule.defeaters) conditions.push_back(d.condition);
    }
    std::vector<std::size_t> measures;
    for (std::size_t m = 0; m < model.measure_count(); ++m)
        if (model.domain_of(m)) measures.push_back(m);

    std::vector<Valuation> out;
    std::set<std::vector<bool>> seen;
    Valuation v = model.default_valuation();
    std::vector<std::size_t> digit(measures.size(), 0);
    while (true) {
        std::vector<bool> truth;
        truth.reserve(conditions.size());
        for (int c : conditions) truth.push_back(model.holds(c, v));
        if (seen.insert(std::move(truth)).second) out.push_back(v);
        // odometer, last measure fastest
        std::size_t i = measures.size();
        while (i > 0) {
            const std::size_t m = measures[i - 1];
            const auto& values = model.domain_of(m)->values;
            if (++digit[i - 1] < values.size()) {
                v[m] = values[digit[i - 1]];
                break;
            }
            digit[i - 1] = 0;
            v[m] = values.front();
            --i;
        }
        if (i == 0) break;
    }
    return out;
}

ExplorationResult explore(const Model& model, const CheckConfig& cfg, Budget& budget) {
    ExplorationResult result;
    try {
        Explorer explorer(model, cfg, budget);
        result.findings = explorer.run();
    } catch (const BudgetExceeded&) {
        result.partial = true;
    }
    return result;
}

}  // namespace sleec::detail
