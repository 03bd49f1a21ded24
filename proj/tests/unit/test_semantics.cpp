#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <random>

using namespace sleec;
using sleec::test::load;
using sleec::test::read_fixture;

namespace {

Spec r1_r2() { return load(read_fixture("fixtures/r1_r2.sleec")); }

std::size_t event(const Model& m, std::string_view name) { return *m.event_index(name); }

WorldStep fire(const Model& m, std::string_view ev, const std::map<std::string, std::string>& values) {
    WorldStep step{{event(m, ev)}, m.default_valuation()};
    for (const auto& [measure, label] : values) {
        const auto idx = *m.measure_index(measure);
        step.valuation[idx] = *m.parse_value(idx, label);
    }
    return step;
}

}  // namespace

TEST_SUITE("ticks") {
    TEST_CASE("minutes only") {
        const TickScale s = tick_scale(r1_r2());
        CHECK(s.base_unit == TimeUnit::Minutes);
        CHECK(s.ticks_per_deadline.at("R1") == 2);
        CHECK(s.ticks_per_deadline.at("R2") == 2);
    }

    TEST_CASE("seconds and minutes convert to seconds") {
        const TickScale s = tick_scale(load(read_fixture("fixtures/corpus/mixed_units.sleec")));
        CHECK(s.base_unit == TimeUnit::Seconds);
        CHECK(s.ticks_per_deadline.at("Alarm") == 90);
        CHECK(s.ticks_per_deadline.at("Notify") == 120);
    }

    TEST_CASE("conversion table") {
        // seconds per unit, computed independently
        const std::pair<TimeUnit, std::int64_t> table[] = {
            {TimeUnit::Seconds, 1}, {TimeUnit::Minutes, 60}, {TimeUnit::Hours, 3600}, {TimeUnit::Days, 86400}};
        for (auto [unit, secs] : table) CHECK(seconds_per(unit) == secs);
        TickScale s;
        s.base_unit = TimeUnit::Minutes;
        CHECK(s.ticks(TimeValue{3, TimeUnit::Hours}) == 180);
        CHECK(s.ticks(TimeValue{1, TimeUnit::Days}) == 1440);
    }

    TEST_CASE("no deadlines") {
        const TickScale s = tick_scale(load("def_start\n  event A\n  event B\ndef_end\nrule_start\n  R when A then B\nrule_end\n"));
        CHECK(s.base_unit == TimeUnit::Minutes);
        CHECK(s.ticks_per_deadline.empty());
    }

    TEST_CASE("deadline beyond a million ticks is a configuration error") {
        const Spec spec = load(
            "def_start\n  event A\n  event B\ndef_end\nrule_start\n"
            "  Fast when A then B within 1 second\n  Slow when A then B within 12 days\nrule_end\n");
        CHECK_THROWS_AS(tick_scale(spec), ConfigError);
    }
}

TEST_SUITE("domains") {
    TEST_CASE("scale and boolean domains are the declared values") {
        const AbstractDomain d = abstract_domains(r1_r2());
        REQUIRE(d.measures.size() == 1);
        CHECK(d.measures[0].labels == std::vector<std::string>{"L1", "L2", "L3", "L4", "L5"});
        const AbstractDomain almi = abstract_domains(load(read_fixture("fixtures/almi.sleec")));
        const MeasureDomain* b = almi.find("userDistressed");
        REQUIRE(b);
        CHECK(b->labels == std::vector<std::string>{"true", "false"});
    }

    TEST_CASE("numeric compared against constant 5") {
        const Spec spec = load(
            "def_start\n  event E\n  measure n: numeric\n  constant k = 5\ndef_end\n"
            "rule_start\n  R when E and n < k then E within 1 minute\nrule_end\n");
        const AbstractDomain domain = abstract_domains(spec);
        const MeasureDomain* d = domain.find("n");
        REQUIRE(d);
        CHECK(d->values == std::vector<std::int64_t>{4, 5, 6});
    }

    TEST_CASE("comparisons are constant between representatives") {
        // Every integer around the thresholds must behave like some representative.
        const Spec spec = load(
            "def_start\n  event E\n  measure n: numeric\n  constant k = 5\ndef_end\n"
            "rule_start\n  R when E and (n < k or n >= 9) and n <> 7 then E within 1 minute\nrule_end\n");
        const Model model(spec);
        const AbstractDomain domain = abstract_domains(spec);
        const auto& values = domain.find("n")->values;
        const auto& cond = *spec.rules[0].trigger_condition;
        auto truth = [&](std::int64_t x) { return evaluate_condition(model, cond, {{"n", std::to_string(x)}}); };
        for (std::int64_t x = values.front() - 20; x <= values.back() + 20; ++x) {
            bool matched = false;
            for (auto v : values) matched |= truth(v) == truth(x);
            CHECK(matched);
        }
        // each threshold is separated from its neighbours
        for (std::int64_t t : {5, 7, 9}) CHECK(std::find(values.begin(), values.end(), t) != values.end());
    }

    TEST_CASE("unreferenced measures have no domain") {
        const Model m(load(
            "def_start\n  event E\n  measure used: boolean\n  measure unused: boolean\ndef_end\n"
            "rule_start\n  R when E and used then E within 1 minute\nrule_end\n"));
        CHECK(m.domain_of(*m.measure_index("used")));
        CHECK(!m.domain_of(*m.measure_index("unused")));
    }
}

TEST_SUITE("conditions") {
    TEST_CASE("strict scale comparison") {
        const Spec spec = r1_r2();
        const Model m(spec);
        const auto& guard = *spec.find_rule("R2")->trigger_condition;
        CHECK(evaluate_condition(m, guard, {{"emergencyLevel", "L1"}}));
        CHECK_FALSE(evaluate_condition(m, guard, {{"emergencyLevel", "L2"}}));
    }

    TEST_CASE("a and not b truth table") {
        const Spec spec = load(
            "def_start\n  event E\n  measure a: boolean\n  measure b: boolean\ndef_end\n"
            "rule_start\n  R when E and a and not b then E within 1 minute\nrule_end\n");
        const Model m(spec);
        const auto& cond = *spec.rules[0].trigger_condition;
        for (bool a : {false, true})
            for (bool b : {false, true}) {
                const bool expected = a && !b;
                CHECK(evaluate_condition(m, cond, {{"a", a ? "true" : "false"}, {"b", b ? "true" : "false"}}) == expected);
            }
    }
}

TEST_SUITE("activation") {
    TEST_CASE("R1 at L1 requires the call within 2 ticks") {
        const Model m(r1_r2());
        const auto ob = activate(m, *m.rule_index("R1"), fire(m, "DetectUserFallen", {{"emergencyLevel", "L1"}}), 0);
        REQUIRE(ob);
        CHECK(ob->polarity == Polarity::Must);
        CHECK(ob->event == event(m, "CallEmergencySupport"));
        CHECK(ob->deadline_at == 2);
    }

    TEST_CASE("R1 at L5 requires the call immediately") {
        const Model m(r1_r2());
        const auto ob = activate(m, *m.rule_index("R1"), fire(m, "DetectUserFallen", {{"emergencyLevel", "L5"}}), 3);
        REQUIRE(ob);
        CHECK(ob->activated_at == 3);
        CHECK(ob->deadline_at == 3);
    }

    TEST_CASE("no trigger, no obligation") {
        const Model m(r1_r2());
        CHECK(!activate(m, *m.rule_index("R1"), fire(m, "CallEmergencySupport", {}), 0));
    }

    TEST_CASE("false guard, no obligation") {
        const Model m(r1_r2());
        CHECK(!activate(m, *m.rule_index("R2"), fire(m, "DetectUserFallen", {{"emergencyLevel", "L3"}}), 0));
    }

    TEST_CASE("a response-less defeater cancels") {
        const Model m(load(read_fixture("fixtures/almi.sleec")));
        CHECK(!activate(m, *m.rule_index("Rule2"), fire(m, "UserFallen", {{"emergencyLevel", "low"}}), 0));
        CHECK(activate(m, *m.rule_index("Rule2"), fire(m, "UserFallen", {{"emergencyLevel", "high"}}), 0));
    }

    TEST_CASE("the last matching defeater wins") {
        // Independent check over every valuation: compute the expected response by hand.
        const Spec spec = load(
            "def_start\n  event E\n  event F\n  event G\n  event H\n  measure a: boolean\n  measure b: boolean\ndef_end\n"
            "rule_start\n  R when E then F within 3 minutes\n    unless a then G within 1 minute\n    unless b then H\nrule_end\n");
        const Model m(spec);
        for (bool a : {false, true})
            for (bool b : {false, true}) {
                const auto ob = activate(m, 0, fire(m, "E", {{"a", a ? "true" : "false"}, {"b", b ? "true" : "false"}}), 0);
                REQUIRE(ob);
                const char* expected = b ? "H" : a ? "G" : "F";
                CHECK(ob->event == event(m, expected));
                CHECK(ob->deadline_at == (b ? 0 : a ? 1 : 3));
            }
    }

    TEST_CASE("activation is pure") {
        const Model m(load(read_fixture("fixtures/almi.sleec")));
        std::mt19937 rng(5);
        for (int i = 0; i < 200; ++i) {
            WorldStep step{{static_cast<std::size_t>(rng() % m.event_count())}, m.default_valuation()};
            for (std::size_t k = 0; k < m.measure_count(); ++k)
                if (const auto* d = m.domain_of(k)) step.valuation[k] = d->values[rng() % d->values.size()];
            for (std::size_t r = 0; r < m.rule_count(); ++r) CHECK(activate(m, r, step, 4) == activate(m, r, step, 4));
        }
    }
}

TEST_SUITE("replay") {
    TEST_CASE("the two-rule witness ends blocked") {
        const Model m(r1_r2());
        const Trace t{TraceEntry::event("DetectUserFallen"), TraceEntry::measure("emergencyLevel", "L1"),
                      TraceEntry::tock(), TraceEntry::tock()};
        const ReplayResult r = replay(m, t);
        CHECK(r.violations.empty());
        CHECK(r.final_state.clock == 2);
        const auto blocked = blocked_obligations(r.final_state);
        REQUIRE(blocked.size() == 1);
        CHECK(blocked[0].event == event(m, "CallEmergencySupport"));
        CHECK(blocked[0].must_rules == std::vector<std::size_t>{0});
        CHECK(blocked[0].forbidding_rules == std::vector<std::size_t>{1});
    }

    TEST_CASE("a compliant trace is clean") {
        const Model m(r1_r2());
        const Trace t{TraceEntry::event("DetectUserFallen"), TraceEntry::measure("emergencyLevel", "L3"),
                      TraceEntry::tock(), TraceEntry::event("CallEmergencySupport"), TraceEntry::tock()};
        const ReplayResult r = replay(m, t);
        CHECK(r.violations.empty());
        CHECK(blocked_obligations(r.final_state).empty());
    }

    TEST_CASE("missing a deadline is a violation") {
        const Model m(r1_r2());
        const Trace t{TraceEntry::event("DetectUserFallen"), TraceEntry::measure("emergencyLevel", "L3"),
                      TraceEntry::tock(), TraceEntry::tock(), TraceEntry::tock()};
        CHECK(!replay(m, t).violations.empty());
    }
}
