#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

using namespace sleec;
using sleec::test::load;
using sleec::test::read_fixture;

namespace {

std::vector<TokenKind> kinds(std::string_view text) {
    std::vector<TokenKind> out;
    for (const auto& t : tokenize(text).tokens) out.push_back(t.kind);
    return out;
}

const char* const kR1R2Defs =
    "def_start\n"
    "  event DetectUserFallen\n"
    "  event CallEmergencySupport\n"
    "  measure emergencyLevel: scale(L1, L2, L3, L4, L5)\n"
    "def_end\n";

std::string with_rules(const std::string& rules) { return std::string(kR1R2Defs) + "rule_start\n" + rules + "rule_end\n"; }

}  // namespace

TEST_SUITE("lexer") {
    TEST_CASE("keywords and identifiers") {
        CHECK(kinds("when DetectUserFallen then") ==
              std::vector{TokenKind::When, TokenKind::Identifier, TokenKind::Then, TokenKind::End});
        CHECK(kinds("def_start def_end") == std::vector{TokenKind::DefStart, TokenKind::DefEnd, TokenKind::End});
    }

    TEST_CASE("deadline tokens carry amount and unit") {
        const auto lex = tokenize("within 2 minutes");
        REQUIRE(lex.tokens.size() == 4);
        CHECK(lex.tokens[0].kind == TokenKind::Within);
        CHECK(lex.tokens[1].kind == TokenKind::Integer);
        CHECK(lex.tokens[1].integer == 2);
        CHECK(lex.tokens[2].kind == TokenKind::Unit);
        CHECK(lex.tokens[2].unit == TimeUnit::Minutes);
    }

    TEST_CASE("comments are skipped and spans are 1-based") {
        const auto lex = tokenize("// note\n  event X");
        CHECK(lex.diagnostics.empty());
        REQUIRE(lex.tokens.size() == 3);
        CHECK(lex.tokens[0].span.line == 2);
        CHECK(lex.tokens[0].span.col == 3);
    }

    TEST_CASE("unknown characters are reported with their position") {
        const auto lex = tokenize("event $X");
        REQUIRE(lex.diagnostics.size() == 1);
        CHECK(lex.diagnostics[0].category == DiagnosticCategory::Syntax);
        CHECK(lex.diagnostics[0].span.col == 7);
    }

    TEST_CASE("comparison operators") {
        CHECK(kinds("< > <= >= = <>") == std::vector{TokenKind::Less, TokenKind::Greater, TokenKind::LessEq,
                                                     TokenKind::GreaterEq, TokenKind::Equal, TokenKind::NotEqual,
                                                     TokenKind::End});
    }
}

TEST_SUITE("parser") {
    TEST_CASE("R1 parses into trigger, deadline and one defeater") {
        const Spec spec = load(read_fixture("fixtures/r1_r2.sleec"));
        const Rule* r1 = spec.find_rule("R1");
        REQUIRE(r1);
        CHECK(r1->trigger_event == "DetectUserFallen");
        CHECK(!r1->trigger_condition);
        CHECK(r1->response.polarity == Polarity::Must);
        CHECK(r1->response.event == "CallEmergencySupport");
        CHECK(r1->response.deadline == TimeValue{2, TimeUnit::Minutes});
        REQUIRE(r1->defeaters.size() == 1);
        CHECK(format_condition(*r1->defeaters[0].condition) == "emergencyLevel > L4");
        REQUIRE(r1->defeaters[0].response);
        CHECK(r1->defeaters[0].response->event == "CallEmergencySupport");
        CHECK(!r1->defeaters[0].response->deadline);
    }

    TEST_CASE("R2 carries a guard and a prohibition") {
        const Spec spec = load(read_fixture("fixtures/r1_r2.sleec"));
        const Rule* r2 = spec.find_rule("R2");
        REQUIRE(r2);
        REQUIRE(r2->trigger_condition);
        CHECK(format_condition(*r2->trigger_condition) == "emergencyLevel < L2");
        CHECK(r2->response.polarity == Polarity::MustNot);
    }

    TEST_CASE("empty blocks") {
        const auto r = parse("def_start def_end rule_start rule_end");
        CHECK(r.ok());
        CHECK(r.spec.events.empty());
        CHECK(r.spec.rules.empty());
    }

    TEST_CASE("ALMI fixture has 7 events, 7 measures and 1 constant") {
        const Spec spec = load(read_fixture("fixtures/almi.sleec"));
        CHECK(spec.events.size() == 7);
        CHECK(spec.measures.size() == 7);
        CHECK(spec.constants.size() == 1);
        CHECK(spec.rules.size() == 5);
    }

    TEST_CASE("defeater order is preserved") {
        const Spec spec = load(read_fixture("fixtures/corpus/mixed_units.sleec"));
        const Rule* n = spec.find_rule("Notify");
        REQUIRE(n);
        REQUIRE(n->defeaters.size() == 2);
        CHECK(!n->defeaters[0].response);
        CHECK(n->defeaters[1].response);
    }

    TEST_CASE("recovery reports errors in several rules") {
        const auto r = parse(with_rules("  A when DetectUserFallen then\n"
                                        "  B when DetectUserFallen then CallEmergencySupport\n"
                                        "  C when then CallEmergencySupport\n"));
        CHECK(!r.ok());
        int errors = 0;
        for (const auto& d : r.diagnostics) errors += d.severity == Severity::Error;
        CHECK(errors >= 2);
        REQUIRE(r.spec.find_rule("B"));
        CHECK(r.diagnostics[0].span.line == 8);  // detected at the next rule id
    }

    TEST_CASE("prohibitions need a deadline") {
        const auto r = parse(with_rules("  R when DetectUserFallen then not CallEmergencySupport\n"));
        CHECK(!r.ok());
    }

    TEST_CASE("parse_rule handles a single rule and rejects truncation") {
        CHECK(parse_rule("R3 when DetectUserFallen then CallEmergencySupport within 1 minute").rule);
        const auto bad = parse_rule("when DetectUserFallen then");
        CHECK(!bad.rule);
        CHECK(has_errors(bad.diagnostics));
    }
}

TEST_SUITE("names") {
    TEST_CASE("near-miss event gets a suggestion") {
        const auto parsed = parse(read_fixture("fixtures/corpus/typo.sleec"));
        const auto diags = analyze_names(parsed.spec);
        REQUIRE(diags.size() == 1);
        CHECK(diags[0].category == DiagnosticCategory::Naming);
        CHECK(diags[0].message.find("DetectUserFalen") != std::string::npos);
        CHECK(diags[0].suggestion == "DetectUserFallen");
    }

    TEST_CASE("suggestions follow edit distance one over defined names") {
        // Independent check: every suggestion is a defined name at distance <= 1 or a case-insensitive match.
        const char* typos[] = {"DetectUserFalen", "detectuserfallen", "CallEmergencySuport", "DetectUserFallenX"};
        for (const char* typo : typos) {
            const auto parsed = parse(with_rules(std::string("  R when ") + typo + " then CallEmergencySupport\n"));
            const auto diags = analyze_names(parsed.spec);
            REQUIRE(diags.size() == 1);
            REQUIRE(diags[0].suggestion);
            const std::string& s = *diags[0].suggestion;
            CHECK(parsed.spec.find_event(s));
            std::string a = typo, b = s;
            for (auto* x : {&a, &b})
                for (auto& c : *x) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            CHECK((edit_distance(typo, s) <= 1 || a == b));
        }
    }

    TEST_CASE("distant names get no suggestion") {
        const auto parsed = parse(with_rules("  R when Zzz then CallEmergencySupport\n"));
        const auto diags = analyze_names(parsed.spec);
        REQUIRE(diags.size() == 1);
        CHECK(!diags[0].suggestion);
    }

    TEST_CASE("clean spec") { CHECK(analyze_names(load(read_fixture("fixtures/almi.sleec"))).empty()); }

    TEST_CASE("duplicate definitions") {
        const auto parsed = parse("def_start\n  event MedicationDue\n  event MedicationDue\ndef_end\nrule_start\nrule_end\n");
        const auto diags = analyze_names(parsed.spec);
        REQUIRE(diags.size() == 1);
        CHECK(diags[0].message.find("duplicate definition") != std::string::npos);
    }

    TEST_CASE("edit distance") {
        CHECK(edit_distance("kitten", "sitting") == 3);
        CHECK(edit_distance("", "abc") == 3);
        CHECK(edit_distance("same", "same") == 0);
    }
}

TEST_SUITE("typecheck") {
    TEST_CASE("scale comparison against its own literal") {
        CHECK(typecheck(load(read_fixture("fixtures/r1_r2.sleec"))).empty());
    }

    TEST_CASE("integer against a scale") {
        const Spec spec = load(with_rules("  R when DetectUserFallen and emergencyLevel > 3 then CallEmergencySupport\n"));
        const auto diags = typecheck(spec);
        REQUIRE(!diags.empty());
        CHECK(diags[0].category == DiagnosticCategory::Type);
    }

    TEST_CASE("literal from another scale") {
        const Spec spec = load(with_rules("  R when DetectUserFallen and emergencyLevel > High then CallEmergencySupport\n"));
        CHECK(!typecheck(spec).empty());
    }

    TEST_CASE("boolean measure compared with a number") {
        const Spec spec = load(
            "def_start\n  event E\n  measure userOccupied: boolean\ndef_end\n"
            "rule_start\n  R when E and userOccupied < 2 then E within 1 minute\nrule_end\n");
        const auto diags = typecheck(spec);
        REQUIRE(!diags.empty());
        CHECK(diags[0].category == DiagnosticCategory::Type);
    }

    TEST_CASE("numeric measure against a constant") {
        CHECK(typecheck(load(read_fixture("fixtures/almi.sleec"))).empty());
    }
}

TEST_SUITE("format") {
    TEST_CASE("empty spec prints the skeleton") { CHECK(format(Spec{}) == "def_start\ndef_end\nrule_start\nrule_end\n"); }

    TEST_CASE("round trip over the corpus") {
        for (const char* path : sleec::test::kCorpus) {
            INFO(path);
            const auto first = parse(read_fixture(path));
            const std::string text = format(first.spec);
            const auto second = parse(text);
            CHECK(second.ok());
            CHECK(second.spec == first.spec);
            CHECK(format(second.spec) == text);
        }
    }

    TEST_CASE("R1 text survives a rule-level round trip") {
        const Spec spec = load(read_fixture("fixtures/r1_r2.sleec"));
        const std::string text = format_rule(*spec.find_rule("R1"));
        CHECK(text ==
              "R1 when DetectUserFallen then CallEmergencySupport within 2 minutes "
              "unless emergencyLevel > L4 then CallEmergencySupport");
        const auto again = parse_rule(text);
        REQUIRE(again.rule);
        CHECK(*again.rule == *spec.find_rule("R1"));
    }

    TEST_CASE("nested connectives keep their meaning") {
        const Spec spec = load(
            "def_start\n  event E\n  measure a: boolean\n  measure b: boolean\n  measure c: boolean\ndef_end\n"
            "rule_start\n  R when E and (a or b) and not (b and c) then E within 1 minute\nrule_end\n");
        const auto again = parse(format(spec));
        REQUIRE(again.ok());
        CHECK(again.spec == spec);
    }
}
