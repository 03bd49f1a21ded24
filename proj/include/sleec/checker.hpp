#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sleec/language.hpp"
#include "sleec/semantics.hpp"

namespace sleec {

struct CheckConfig {
    int horizon_ticks = 8;
    int max_env_events_per_instant = 1;
    int cascade_cap = 16;
    bool elide_tocks = true;
    /// Wall-clock budget for one check; zero means unlimited.
    std::chrono::milliseconds budget{0};
};

enum class VerdictKind { Deadlock, Divergence, Naming, Redundancy };

std::string_view to_string(VerdictKind kind);
std::optional<VerdictKind> verdict_kind_from(std::string_view text);

struct Verdict {
    VerdictKind kind = VerdictKind::Deadlock;
    std::vector<std::string> rules;
    std::optional<Trace> trace;
    /// Measure values observed along the witness.
    std::map<std::string, std::string> scenario;
    std::string message;
};

/// Deadlock, divergence and naming verdicts block a ruleset; redundancy is advisory.
bool is_blocking(const Verdict& v);

struct CheckReport {
    std::vector<Verdict> verdicts;
    std::vector<std::string> warnings;
    /// Set when the time budget ran out before exploration finished.
    bool partial = false;
};

/// Deadlocks: environment behaviours after which no compliant agent response exists.
CheckReport check_consistency(const Spec& spec, const CheckConfig& cfg);

/// Unbounded same-instant cascades of immediate obligations.
CheckReport detect_divergence(const Spec& spec, const CheckConfig& cfg);

/// Rules whose removal leaves the bounded compliant behaviours unchanged.
std::vector<Verdict> detect_redundancy(const Spec& spec, const CheckConfig& cfg);

/// Deadlocks, then divergences, then redundancies, from a single exploration.
CheckReport run_checks(const Spec& spec, const CheckConfig& cfg);

/// `<a, m.v, tock>`; runs of more than three tocks print as `tock, ..., tock` when eliding.
std::string format_trace(const Trace& trace, const CheckConfig& cfg);

/// Naming verdicts for name diagnostics located inside rules.
std::vector<Verdict> naming_verdicts(const Spec& spec, const std::vector<Diagnostic>& diagnostics);

/// parse -> analyze_names -> typecheck -> run_checks, stopping at the first stage with errors.
struct Analysis {
    Spec spec;
    std::vector<Diagnostic> diagnostics;
    CheckReport report;
    bool checked = false;  // false when diagnostics prevented checking
};

Analysis analyze_text(std::string_view text, const CheckConfig& cfg);
Analysis analyze_spec(Spec spec, const CheckConfig& cfg);

}  // namespace sleec
