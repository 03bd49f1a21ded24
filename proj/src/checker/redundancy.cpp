#include <algorithm>
#include <set>

#include "explorer.hpp"

namespace sleec::detail {

namespace {

// Behaviours here are a scenario valuation plus a sequence of instants, each an
// unordered set of events. Within an instant, a response to a trigger counts as
// "after" it whenever it is a different event.

struct Pending {
    std::uint32_t event = 0;
    std::uint8_t must = 0;
    std::uint32_t rule = 0;
    Tick deadline = 0;

    friend auto operator<=>(const Pending&, const Pending&) = default;
};

using State = std::vector<Pending>;

void normalize(State& st) {
    std::sort(st.begin(), st.end());
    State out;
    for (std::size_t i = 0; i < st.size();) {
        std::size_t j = i;
        while (j < st.size() && st[j].event == st[i].event && st[j].must == st[i].must && st[j].rule == st[i].rule) ++j;
        // Musts: the earliest deadline is the binding one; prohibitions: the latest.
        out.push_back(st[i].must ? st[i] : st[j - 1]);
        i = j;
    }
    st = std::move(out);
}

class BehaviourSearch {
public:
    BehaviourSearch(const Model& model, const std::vector<bool>& others, std::size_t target, const CheckConfig& cfg,
                    Budget& budget)
        : model_(model), others_(others), target_(target), cfg_(cfg), budget_(budget) {
        std::vector<bool> in(model_.event_count(), false);
        for (std::size_t r = 0; r < model_.rule_count(); ++r) {
            if (!involved(r)) continue;
            const auto& rule = model_.rule(r);
            in[rule.trigger] = true;
            in[rule.response.event] = true;
            for (const auto& d : rule.defeaters)
                if (d.response) in[d.response->event] = true;
        }
        for (std::size_t e = 0; e < in.size(); ++e)
            if (in[e]) events_.push_back(e);
        // every subset of these events is tried in each instant
        if (events_.size() > 16) throw ConfigError("too many events for redundancy analysis");
    }

    bool run() {
        std::vector<bool> involved_rules(model_.rule_count());
        for (std::size_t r = 0; r < involved_rules.size(); ++r) involved_rules[r] = involved(r);
        for (const Valuation& v : distinct_scenarios(model_, involved_rules)) {
            seen_.clear();
            v_ = v;
            if (visit(0, {})) return true;
        }
        return false;
    }

private:
    bool involved(std::size_t r) const { return r == target_ || others_[r]; }

    /// True when the target can be broken from `st` at `clock` without breaking any other rule.
    bool visit(Tick clock, const State& st) {
        budget_.poll<BudgetExceeded>();
        if (!seen_.insert({clock, st}).second) return false;
        const std::size_t n = events_.size();
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            std::vector<bool> present(model_.event_count(), false);
            std::vector<std::size_t> fired;
            for (std::size_t i = 0; i < n; ++i)
                if (mask >> i & 1) {
                    present[events_[i]] = true;
                    fired.push_back(events_[i]);
                }
            if (instant(clock, st, fired, present)) return true;
        }
        return false;
    }

    bool instant(Tick clock, const State& st, const std::vector<std::size_t>& fired, const std::vector<bool>& present) {
        std::vector<bool> broken(model_.rule_count(), false);
        State next;
        for (const auto& p : st) {
            if (!present[p.event]) {
                next.push_back(p);
            } else if (!p.must) {
                broken[p.rule] = true;
                next.push_back(p);
            }
        }
        WorldStep step{{0}, v_};
        for (auto e : fired) {
            step.fired_events[0] = e;
            for (auto r : model_.rules_triggered_by(e)) {
                if (!involved(r)) continue;
                auto ob = activate(model_, r, step, clock);
                if (!ob) continue;
                const bool must = ob->polarity == Polarity::Must;
                const bool follows = ob->event != e && present[ob->event];
                if (follows) {
                    if (!must) broken[r] = true;
                    else continue;
                }
                next.push_back({static_cast<std::uint32_t>(ob->event), static_cast<std::uint8_t>(must),
                                static_cast<std::uint32_t>(r), ob->deadline_at});
            }
        }
        State carried;
        for (const auto& p : next) {
            if (p.must && p.deadline <= clock) broken[p.rule] = true;
            else if (p.must || p.deadline > clock) carried.push_back(p);
        }
        for (std::size_t r = 0; r < broken.size(); ++r)
            if (broken[r] && others_[r]) return false;
        if (broken[target_]) return true;
        if (clock >= cfg_.horizon_ticks) return false;
        normalize(carried);
        return visit(clock + 1, carried);
    }

    const Model& model_;
    const std::vector<bool>& others_;
    std::size_t target_;
    const CheckConfig& cfg_;
    Budget& budget_;
    std::vector<std::size_t> events_;
    Valuation v_;
    std::set<std::pair<Tick, State>> seen_;
};

}  // namespace

bool violation_reachable(const Model& model, const std::vector<bool>& others, std::size_t target,
                         const CheckConfig& cfg, Budget& budget) {
    return BehaviourSearch(model, others, target, cfg, budget).run();
}

}  // namespace sleec::detail
