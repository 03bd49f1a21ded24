// One PASS/FAIL line per acceptance criterion. Usage: acceptance <path to sleec binary>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "oracle.hpp"
#include "sleec/service.hpp"

using namespace sleec;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned limits.
constexpr auto kR1R2Budget = std::chrono::seconds(1);
constexpr auto kAlmiBudget = std::chrono::seconds(5);
constexpr auto kOracleBudget = std::chrono::minutes(5);
constexpr int kOracleInstances = 250;
constexpr int kMinOracleInstances = 200;
constexpr int kReplayRandomSpecs = 200;

const std::string kRoot = SLEEC_SOURCE_DIR;

const char* const kFixtures[] = {
    "fixtures/r1_r2.sleec",
    "fixtures/almi.sleec",
    "fixtures/corpus/canonical.sleec",
    "fixtures/corpus/divergence.sleec",
    "fixtures/corpus/mixed_units.sleec",
    "fixtures/corpus/r1_guarded.sleec",
    "fixtures/corpus/redundant_deadlines.sleec",
    "fixtures/corpus/typo.sleec",
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string read(const std::string& rel) {
    std::ifstream in(kRoot + "/" + rel, std::ios::binary);
    expect(static_cast<bool>(in), "cannot read " + rel);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Spec load(const std::string& text) {
    auto parsed = parse(text);
    expect(parsed.ok() && analyze_names(parsed.spec).empty() && typecheck(parsed.spec).empty(),
           "fixture does not load cleanly");
    return parsed.spec;
}

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

/// Runs `cmd` and returns its stdout and exit status.
std::pair<std::string, int> run(const std::string& cmd) {
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    expect(p != nullptr, "cannot run " + cmd);
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
    const int status = pclose(p);
    return {out, WIFEXITED(status) ? WEXITSTATUS(status) : -1};
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("sleec-acceptance-" + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

bool blocking(const CheckReport& r) {
    for (const auto& v : r.verdicts)
        if (is_blocking(v)) return true;
    return false;
}

// ---- criteria ---------------------------------------------------------------

std::string r1_r2_reproduction() {
    const Spec spec = load(read("fixtures/r1_r2.sleec"));
    const CheckConfig cfg;
    const auto start = Clock::now();
    const CheckReport r = check_consistency(spec, cfg);
    const auto took = Clock::now() - start;
    expect(r.verdicts.size() == 1, "expected exactly one verdict, got " + std::to_string(r.verdicts.size()));
    const Verdict& v = r.verdicts[0];
    expect(v.kind == VerdictKind::Deadlock, "verdict is not a deadlock");
    expect(v.rules == std::vector<std::string>{"R1", "R2"}, "verdict does not name R1 and R2");
    expect(v.trace.has_value(), "no trace");
    const Trace& t = *v.trace;
    expect(!t.empty() && t.front().kind == TraceEntry::Kind::Event && t.front().name == "DetectUserFallen",
           "trace does not start with DetectUserFallen");
    bool below_l2 = false;
    // L1 is the only level strictly below L2
    for (const auto& e : t) below_l2 |= e.kind == TraceEntry::Kind::Measure && e.name == "emergencyLevel" && e.value == "L1";
    expect(below_l2, "no observation of emergencyLevel below L2");
    std::size_t tail = 0;
    while (tail < t.size() && t[t.size() - 1 - tail].kind == TraceEntry::Kind::Tock) ++tail;
    expect(tail == 2, "trace ends with " + std::to_string(tail) + " tocks");
    const std::string golden = "<DetectUserFallen, emergencyLevel.L1, tock, tock>";
    expect(format_trace(t, cfg) == golden, "trace " + format_trace(t, cfg) + " differs from " + golden);
    expect(took < kR1R2Budget, "took " + fixed(seconds(took)) + " s");
    return format_trace(t, cfg) + " in " + fixed(seconds(took)) + " s";
}

std::string almi_fixture() {
    const auto start = Clock::now();
    const Spec spec = load(read("fixtures/almi.sleec"));
    expect(spec.events.size() == 7 && spec.measures.size() == 7 && spec.constants.size() == 1,
           "definition counts are " + std::to_string(spec.events.size()) + "/" + std::to_string(spec.measures.size()) +
               "/" + std::to_string(spec.constants.size()));
    const CheckConfig cfg;
    const CheckReport r = check_consistency(spec, cfg);
    bool found = false;
    for (const auto& v : r.verdicts)
        found |= v.kind == VerdictKind::Deadlock && v.rules == std::vector<std::string>{"Rule2", "Rule4"};
    expect(found, "no deadlock between Rule2 and Rule4");
    const Json fix = Json::parse(read("fixtures/almi_fix.json"));
    const SuggestionOutcome o = validate_suggestion(spec, suggestion_from_json(fix), cfg);
    expect(o.applied, "the fix was not applied");
    expect(o.report.verdicts.empty(), "verdicts remain after the fix");
    const auto took = Clock::now() - start;
    expect(took < kAlmiBudget, "took " + fixed(seconds(took)) + " s");
    return "7/7/1, Rule2-Rule4 deadlock, fix clean in " + fixed(seconds(took)) + " s";
}

std::string oracle_equivalence() {
    std::mt19937 rng(8675309);
    const auto start = Clock::now();
    int agreed = 0, with_findings = 0;
    for (int i = 0; i < kOracleInstances; ++i) {
        const std::string text = oracle::random_spec(rng);
        const Spec spec = load(text);
        const CheckConfig cfg = oracle::corpus_config(i);
        const auto expected = oracle::brute_force_oracle(spec, cfg);
        expect(expected == oracle::checker_findings(spec, cfg), "disagreement on instance " + std::to_string(i) + ":\n" + text);
        ++agreed;
        with_findings += !expected.empty();
    }
    const auto took = Clock::now() - start;
    expect(agreed >= kMinOracleInstances, "only " + std::to_string(agreed) + " instances");
    expect(took < kOracleBudget, "took " + fixed(seconds(took)) + " s");
    return std::to_string(agreed) + "/" + std::to_string(kOracleInstances) + " agree (" + std::to_string(with_findings) +
           " with findings) in " + fixed(seconds(took)) + " s";
}

std::string witness_replay() {
    std::vector<std::string> corpus;
    for (const char* f : kFixtures) {
        const std::string text = read(f);
        auto parsed = parse(text);
        if (parsed.ok() && analyze_names(parsed.spec).empty()) corpus.push_back(text);
    }
    std::mt19937 rng(1234);
    for (int i = 0; i < kReplayRandomSpecs; ++i) corpus.push_back(oracle::random_spec(rng));
    int witnesses = 0;
    for (const auto& text : corpus) {
        const Spec spec = load(text);
        CheckConfig cfg;
        cfg.cascade_cap = 3;
        const Model model(spec);
        for (const auto& v : check_consistency(spec, cfg).verdicts) {
            expect(v.trace.has_value(), "deadlock without a trace");
            const ReplayResult r = replay(model, *v.trace);
            expect(r.violations.empty(), "witness " + format_trace(*v.trace, cfg) + " violates a rule before the end");
            const auto blocked = blocked_obligations(r.final_state);
            expect(!blocked.empty(), "witness " + format_trace(*v.trace, cfg) + " does not end blocked");
            for (const auto& b : blocked)
                expect(!b.must_rules.empty() && !b.forbidding_rules.empty(), "blocked obligation lacks a side");
            ++witnesses;
        }
    }
    expect(witnesses > 0, "no witnesses produced");
    return std::to_string(witnesses) + " witnesses over " + std::to_string(corpus.size()) + " rulesets, 0 failures";
}

std::string schema_fidelity() {
    // enumerations: exactly these strings
    for (const char* c : {"deadlock", "divergence", "naming"}) expect(is_conflict_category(c), std::string("rejected ") + c);
    for (const char* c : {"livelock", "Deadlock", "deadlock ", "conflict", "redundancy", ""})
        expect(!is_conflict_category(c), std::string("accepted category '") + c + "'");
    for (const char* k : {"add rule", "combine rule", "remove rule", "modify rule"})
        expect(resolution_kind_from(k).has_value(), std::string("rejected ") + k);
    for (const char* k : {"delete rule", "Add rule", "add", "modify", "merge rule", ""})
        expect(!resolution_kind_from(k).has_value(), std::string("accepted kind '") + k + "'");

    // reports from the mock pipeline over every verdict of the corpus
    TempDir dir;
    LlmConfig llm;
    llm.fixtures_dir = kRoot + "/fixtures/mock";
    Explainer explainer(make_provider(llm), nullptr);
    const std::string almi_desc = read("fixtures/almi_description.txt");
    std::vector<std::string> files;
    for (const char* f : kFixtures) {
        const Analysis a = analyze_text(read(f), CheckConfig{});
        for (const auto& v : a.report.verdicts) {
            for (const std::string& desc : {std::string(), almi_desc}) {
                const Explanation ex = explainer.explain(a.spec, v, desc, CheckConfig{});
                const auto path = dir.path / ("report" + std::to_string(files.size()) + ".json");
                std::ofstream(path) << report_to_json(ex.report);
                files.push_back(path.string());
                // strict parsing agrees with the schema on enumerations
                std::string bad = report_to_json(ex.report);
                const auto at = bad.find(to_string(ex.report.kind));
                bad.replace(at, to_string(ex.report.kind).size(), "rewrite rule");
                bool rejected = false;
                try {
                    parse_report(bad);
                } catch (const ReportError& e) {
                    rejected = e.kind() == ReportError::Kind::Enumeration;
                }
                expect(rejected, "a report with kind 'rewrite rule' was accepted");
            }
        }
    }
    expect(files.size() >= 8, "too few reports");
    std::string cmd = "python3 " + kRoot + "/tools/validate_report.py " + kRoot + "/schema/explanation_report.schema.json";
    for (const auto& f : files) cmd += " " + f;
    auto [out, status] = run(cmd + " 2>&1");
    expect(status == 0, "schema validation failed: " + out);
    return std::to_string(files.size()) + " reports valid; enumerations exact";
}

std::string suggestion_loop() {
    TempDir dir;
    ServiceOptions opts;
    opts.data_dir = dir.path;
    opts.llm.fixtures_dir = kRoot + "/fixtures/mock";
    SessionStore store(opts);
    const std::string id = store.create_session();
    store.submit_ruleset(id, read("fixtures/r1_r2.sleec"));
    // canned suggestions: the mock answer for this conflict carries the R1 guard and the R2 rewrite
    const ExplanationReport report = store.request_explanation(id, 0, 0, "").report;
    const Json remove_r2 = Json::parse(read("fixtures/suggestions/remove_r2.json"));
    const std::pair<std::string, Suggestion> canned[] = {
        {"remove R2", suggestion_from_json(remove_r2)},
        {"modify R2", suggestion_from(report, 2)},
        {"guard R1", suggestion_from(report, 1)},
    };
    expect(canned[1].second.target_rule_id == "R2" && canned[2].second.target_rule_id == "R1",
           "the mock answer does not target R2 and R1");
    for (const auto& [name, s] : canned) {
        const SubmitResult r = store.apply_suggestion(id, 0, s);
        expect(r.revision.has_value(), name + " produced no revision");
        expect(!has_errors(r.diagnostics) && !blocking(r.report), name + " left a conflict");
    }
    const std::size_t before = store.session(id).revisions.size();
    const SubmitResult truncated =
        store.apply_suggestion(id, 0, {ResolutionKind::ModifyRule, "R1", "when DetectUserFallen then", {}});
    expect(!truncated.revision && has_errors(truncated.diagnostics), "truncated suggestion was not rejected");
    expect(store.session(id).revisions.size() == before, "truncated suggestion added a revision");
    return "3 canned suggestions clean; truncated rejected with " + std::to_string(truncated.diagnostics.size()) +
           " diagnostic(s)";
}

std::string determinism(const std::string& binary) {
    expect(!binary.empty(), "no sleec binary given");
    for (const char* f : kFixtures) {
        const std::string cmd = "'" + binary + "' check --json '" + kRoot + "/" + f + "'";
        const auto first = run(cmd);
        const auto second = run(cmd);
        expect(!first.first.empty(), std::string("no output for ") + f);
        expect(first == second, std::string("output differs for ") + f);
    }
    return std::to_string(std::size(kFixtures)) + " fixtures byte-identical across two runs";
}

}  // namespace

int main(int argc, char** argv) {
    const std::string binary = argc > 1 ? argv[1] : "";
    const std::pair<const char*, std::function<std::string()>> criteria[] = {
        {"r1-r2-conflict-reproduction", r1_r2_reproduction},
        {"almi-fixture", almi_fixture},
        {"oracle-equivalence", oracle_equivalence},
        {"witness-replay", witness_replay},
        {"report-schema-fidelity", schema_fidelity},
        {"suggestion-loop", suggestion_loop},
        {"check-json-determinism", [&] { return determinism(binary); }},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        try {
            std::cout << "PASS " << name << ": " << fn() << std::endl;
        } catch (const std::exception& e) {
            ++failed;
            std::cout << "FAIL " << name << ": " << e.what() << std::endl;
        }
    }
    std::cout << (std::size(criteria) - failed) << "/" << std::size(criteria) << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
