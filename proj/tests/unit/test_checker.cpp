#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "sleec/json_io.hpp"

using namespace sleec;
using sleec::test::load;
using sleec::test::read_fixture;

namespace {

const CheckConfig kDefault{};

std::string abc_spec(const std::string& rules) {
    return "def_start\n  event A\n  event B\n  event C\ndef_end\nrule_start\n" + rules + "rule_end\n";
}

}  // namespace

TEST_SUITE("deadlock") {
    TEST_CASE("the fall conflict between R1 and R2") {
        const CheckReport r = check_consistency(load(read_fixture("fixtures/r1_r2.sleec")), kDefault);
        REQUIRE(r.verdicts.size() == 1);
        const Verdict& v = r.verdicts[0];
        CHECK(v.kind == VerdictKind::Deadlock);
        CHECK(v.rules == std::vector<std::string>{"R1", "R2"});
        REQUIRE(v.trace);
        CHECK(format_trace(*v.trace, kDefault) == "<DetectUserFallen, emergencyLevel.L1, tock, tock>");
        CHECK(v.scenario == std::map<std::string, std::string>{{"emergencyLevel", "L1"}});
        CHECK(v.message == "R1 requires CallEmergencySupport by tick 2 while R2 forbids it");
        CHECK(r.warnings.empty());
        CHECK(!r.partial);
    }

    TEST_CASE("R1 alone is consistent") {
        Spec spec = load(read_fixture("fixtures/r1_r2.sleec"));
        spec.rules.pop_back();
        CHECK(check_consistency(spec, kDefault).verdicts.empty());
    }

    TEST_CASE("ALMI: Rule2 against Rule4") {
        const CheckReport r = check_consistency(load(read_fixture("fixtures/almi.sleec")), kDefault);
        REQUIRE(r.verdicts.size() == 1);
        CHECK(r.verdicts[0].rules == std::vector<std::string>{"Rule2", "Rule4"});
        CHECK(format_trace(*r.verdicts[0].trace, kDefault) ==
              "<UserFallen, userDistressed.false, userConsents.false, emergencyLevel.medium, heartRate.119, tock, tock>");
    }

    TEST_CASE("guarding R1 away from L1 resolves the conflict") {
        CHECK(run_checks(load(read_fixture("fixtures/corpus/r1_guarded.sleec")), kDefault).verdicts.empty());
    }

    TEST_CASE("an immediate Must against a running prohibition") {
        const CheckReport r = check_consistency(
            load(abc_spec("  P when A then not B within 3 minutes\n  Q when C then B\n")), kDefault);
        REQUIRE(r.verdicts.size() == 1);
        CHECK(r.verdicts[0].rules == std::vector<std::string>{"P", "Q"});
        // A first, then C in the next instant: B is due at once but still forbidden
        CHECK(format_trace(*r.verdicts[0].trace, kDefault) == "<A, tock, C>");
    }

    TEST_CASE("a retrigger renews the prohibition just as the Must falls due") {
        // B is forbidden through tick 1; firing A again at tick 2 forbids it through tick 3.
        const CheckReport r = check_consistency(
            load(abc_spec("  P when A then not B within 1 minute\n  Q when A then B within 2 minutes\n")), kDefault);
        REQUIRE(r.verdicts.size() == 1);
        CHECK(format_trace(*r.verdicts[0].trace, kDefault) == "<A, tock, tock, A>");
        CHECK(r.verdicts[0].message == "Q requires B by tick 2 while P forbids it");
    }

    TEST_CASE("a horizon shorter than a deadline is reported") {
        CheckConfig cfg;
        cfg.horizon_ticks = 1;
        const CheckReport r = check_consistency(load(read_fixture("fixtures/r1_r2.sleec")), cfg);
        CHECK(r.verdicts.empty());
        REQUIRE(r.warnings.size() == 1);
        CHECK(r.warnings[0].find("shorter than the longest deadline") != std::string::npos);
    }

    TEST_CASE("results are deterministic") {
        const Spec spec = load(read_fixture("fixtures/almi.sleec"));
        const auto a = verdicts_json(run_checks(spec, kDefault).verdicts, kDefault).dump();
        const auto b = verdicts_json(run_checks(spec, kDefault).verdicts, kDefault).dump();
        CHECK(a == b);
    }

    TEST_CASE("an exhausted budget marks the report partial") {
        CheckConfig cfg;
        cfg.horizon_ticks = 400;
        cfg.max_env_events_per_instant = 3;
        cfg.budget = std::chrono::milliseconds(1);
        const CheckReport r = run_checks(load(read_fixture("fixtures/almi.sleec")), cfg);
        CHECK(r.partial);
    }
}

TEST_SUITE("divergence") {
    TEST_CASE("immediate ping-pong") {
        const CheckReport r = detect_divergence(load(read_fixture("fixtures/corpus/divergence.sleec")), kDefault);
        REQUIRE(r.verdicts.size() == 1);
        CHECK(r.verdicts[0].kind == VerdictKind::Divergence);
        CHECK(r.verdicts[0].rules == std::vector<std::string>{"P", "Q"});
        CHECK(format_trace(*r.verdicts[0].trace, kDefault) == "<A, B, A>");
    }

    TEST_CASE("acyclic triggers") {
        CHECK(detect_divergence(load(abc_spec("  P when A then B\n  Q when B then C\n")), kDefault).verdicts.empty());
    }

    TEST_CASE("time passes between delayed firings") {
        const Spec spec = load(abc_spec("  P when A then B within 1 minute\n  Q when B then A within 1 minute\n"));
        CHECK(detect_divergence(spec, kDefault).verdicts.empty());
    }

    TEST_CASE("a self-triggering immediate rule") {
        const CheckReport r = detect_divergence(load(abc_spec("  Loop when A then A\n")), kDefault);
        REQUIRE(r.verdicts.size() == 1);
        CHECK(r.verdicts[0].rules == std::vector<std::string>{"Loop"});
    }
}

TEST_SUITE("redundancy") {
    TEST_CASE("a looser deadline is implied by a tighter one") {
        const auto v = detect_redundancy(load(read_fixture("fixtures/corpus/redundant_deadlines.sleec")), kDefault);
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == VerdictKind::Redundancy);
        CHECK(v[0].rules == std::vector<std::string>{"Q2", "Q1"});
        CHECK(!is_blocking(v[0]));
    }

    TEST_CASE("disjoint triggers") {
        CHECK(detect_redundancy(load(abc_spec("  P when A then B within 1 minute\n  Q when C then B within 1 minute\n")),
                                kDefault)
                  .empty());
    }

    TEST_CASE("duplicates give one verdict") {
        const auto v = detect_redundancy(
            load(abc_spec("  P when A then B within 2 minutes\n  Q when A then B within 2 minutes\n")), kDefault);
        REQUIRE(v.size() == 1);
        CHECK(v[0].rules == std::vector<std::string>{"Q", "P"});
    }

    TEST_CASE("an unsatisfiable guard makes a rule vacuous") {
        const Spec spec = load(
            "def_start\n  event A\n  event B\n  measure m: scale(lo, hi)\ndef_end\nrule_start\n"
            "  P when A and m < lo then B within 1 minute\nrule_end\n");
        const auto v = detect_redundancy(spec, kDefault);
        REQUIRE(v.size() == 1);
        CHECK(v[0].rules == std::vector<std::string>{"P"});
        CHECK(v[0].message.find("can never be violated") != std::string::npos);
    }

    TEST_CASE("run_checks reports redundancy only for conflict-free rulesets") {
        const CheckReport conflicted = run_checks(load(read_fixture("fixtures/r1_r2.sleec")), kDefault);
        for (const auto& v : conflicted.verdicts) CHECK(v.kind != VerdictKind::Redundancy);
        const CheckReport clean = run_checks(load(read_fixture("fixtures/corpus/redundant_deadlines.sleec")), kDefault);
        REQUIRE(clean.verdicts.size() == 1);
        CHECK(clean.verdicts[0].kind == VerdictKind::Redundancy);
    }
}

TEST_SUITE("traces") {
    TEST_CASE("empty trace") { CHECK(format_trace({}, kDefault) == "<>"); }

    TEST_CASE("long runs of tocks are elided") {
        const Trace t(5, TraceEntry::tock());
        CHECK(format_trace(t, kDefault) == "<tock, ..., tock>");
        CheckConfig full;
        full.elide_tocks = false;
        CHECK(format_trace(t, full) == "<tock, tock, tock, tock, tock>");
        CHECK(format_trace(Trace(3, TraceEntry::tock()), kDefault) == "<tock, tock, tock>");
    }

    TEST_CASE("events and observations") {
        const Trace t{TraceEntry::event("DetectUserFallen"), TraceEntry::measure("emergencyLevel", "L1"),
                      TraceEntry::tock(), TraceEntry::tock()};
        CHECK(format_trace(t, kDefault) == "<DetectUserFallen, emergencyLevel.L1, tock, tock>");
    }
}

TEST_SUITE("analysis") {
    TEST_CASE("typos become naming verdicts") {
        const Analysis a = analyze_text(read_fixture("fixtures/corpus/typo.sleec"), kDefault);
        CHECK(!a.checked);
        REQUIRE(a.report.verdicts.size() == 1);
        CHECK(a.report.verdicts[0].kind == VerdictKind::Naming);
        CHECK(a.report.verdicts[0].rules == std::vector<std::string>{"R1"});
    }

    TEST_CASE("syntax errors still report names in the parsed part") {
        const Analysis a = analyze_text(
            "def_start\n  event A\ndef_end\nrule_start\n  R1 when Aa then A\n  R2 when A then\nrule_end\n", kDefault);
        bool syntax = false, naming = false;
        for (const auto& d : a.diagnostics) {
            syntax |= d.category == DiagnosticCategory::Syntax;
            naming |= d.category == DiagnosticCategory::Naming;
        }
        CHECK(syntax);
        CHECK(naming);
    }

    TEST_CASE("oversized deadlines surface as a diagnostic") {
        const Analysis a = analyze_text(
            "def_start\n  event A\n  event B\ndef_end\nrule_start\n"
            "  Fast when A then B within 1 second\n  Slow when A then B within 12 days\nrule_end\n",
            kDefault);
        CHECK(has_errors(a.diagnostics));
        CHECK(!a.checked);
    }

    TEST_CASE("verdict JSON shape") {
        const CheckReport r = run_checks(load(read_fixture("fixtures/r1_r2.sleec")), kDefault);
        const Json j = to_json(r.verdicts.at(0), kDefault);
        CHECK(j["kind"] == "deadlock");
        CHECK(j["rules"] == Json::array({"R1", "R2"}));
        CHECK(j["trace"] == "<DetectUserFallen, emergencyLevel.L1, tock, tock>");
        CHECK(j["scenario"]["emergencyLevel"] == "L1");
        CHECK(j["message"].is_string());
    }
}
