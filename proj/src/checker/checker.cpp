#include "sleec/checker.hpp"

#include <algorithm>
#include <cctype>

#include "budget.hpp"
#include "explorer.hpp"

namespace sleec {

std::string_view to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::Deadlock: return "deadlock";
        case VerdictKind::Divergence: return "divergence";
        case VerdictKind::Naming: return "naming";
        case VerdictKind::Redundancy: return "redundancy";
    }
    return "deadlock";
}

std::optional<VerdictKind> verdict_kind_from(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (auto k : {VerdictKind::Deadlock, VerdictKind::Divergence, VerdictKind::Naming, VerdictKind::Redundancy})
        if (to_string(k) == lower) return k;
    return std::nullopt;
}

bool is_blocking(const Verdict& v) { return v.kind != VerdictKind::Redundancy; }

std::string format_trace(const Trace& trace, const CheckConfig& cfg) {
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < trace.size();) {
        const auto& e = trace[i];
        if (e.kind == TraceEntry::Kind::Tock) {
            std::size_t j = i;
            while (j < trace.size() && trace[j].kind == TraceEntry::Kind::Tock) ++j;
            const std::size_t run = j - i;
            if (cfg.elide_tocks && run > 3) {
                parts.insert(parts.end(), {"tock", "...", "tock"});
            } else {
                parts.insert(parts.end(), run, "tock");
            }
            i = j;
            continue;
        }
        parts.push_back(e.kind == TraceEntry::Kind::Event ? e.name : e.name + "." + e.value);
        ++i;
    }
    std::string out = "<";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ", ";
        out += parts[i];
    }
    return out + ">";
}

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
    if (ids.empty()) return {};
    if (ids.size() == 1) return ids[0];
    std::string out;
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) out += (i ? ", " : "") + ids[i];
    return out + " and " + ids.back();
}

std::vector<std::string> rule_ids(const Model& model, const std::vector<std::size_t>& rules) {
    std::vector<std::string> out;
    for (auto r : rules) out.push_back(model.rule(r).id);
    return out;
}

std::map<std::string, std::string> scenario_of(const Trace& trace) {
    std::map<std::string, std::string> out;
    for (const auto& e : trace)
        if (e.kind == TraceEntry::Kind::Measure) out[e.name] = e.value;
    return out;
}

Tick count_tocks(const Trace& trace) {
    return std::count_if(trace.begin(), trace.end(), [](const auto& e) { return e.kind == TraceEntry::Kind::Tock; });
}

Verdict deadlock_verdict(const Model& model, const detail::Signature& sig, const detail::Finding& f) {
    Verdict v{VerdictKind::Deadlock, rule_ids(model, sig.rules), f.trace, scenario_of(f.trace), {}};
    std::vector<std::size_t> musts, nots;
    for (auto r : sig.rules) {
        const auto& rule = model.rule(r);
        const bool forbids = rule.response.polarity == Polarity::MustNot ||
                             std::any_of(rule.defeaters.begin(), rule.defeaters.end(), [](const auto& d) {
                                 return d.response && d.response->polarity == Polarity::MustNot;
                             });
        (forbids ? nots : musts).push_back(r);
    }
    const std::string& event = model.event_name(f.event);
    const Tick at = count_tocks(f.trace);
    if (!musts.empty() && !nots.empty()) {
        v.message = join_ids(rule_ids(model, musts)) + " require" + (musts.size() == 1 ? "s " : " ") + event +
                    " by tick " + std::to_string(at) + " while " + join_ids(rule_ids(model, nots)) + " forbid" +
                    (nots.size() == 1 ? "s" : "") + " it";
    } else {
        v.message = join_ids(v.rules) + " cannot be satisfied together: " + event + " is both required and forbidden at tick " +
                    std::to_string(at);
    }
    return v;
}

/// Keeps one unrolled cycle: the final instant is cut just after its first repeated event.
Trace one_cycle(const Trace& trace) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < trace.size(); ++i)
        if (trace[i].kind == TraceEntry::Kind::Tock) start = i + 1;
    std::vector<std::string> seen;
    for (std::size_t i = start; i < trace.size(); ++i) {
        if (trace[i].kind != TraceEntry::Kind::Event) continue;
        if (std::find(seen.begin(), seen.end(), trace[i].name) != seen.end())
            return Trace(trace.begin(), trace.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        seen.push_back(trace[i].name);
    }
    return trace;
}

Verdict divergence_verdict(const Model& model, const detail::Signature& sig, const detail::Finding& f,
                           const CheckConfig& cfg) {
    Trace t = one_cycle(f.trace);
    Verdict v{VerdictKind::Divergence, rule_ids(model, sig.rules), t, scenario_of(t), {}};
    v.message = "immediate obligations of " + join_ids(v.rules) + " keep triggering each other; more than " +
                std::to_string(cfg.cascade_cap) + " events would be needed within one instant";
    return v;
}

void sort_verdicts(std::vector<Verdict>& verdicts) {
    std::stable_sort(verdicts.begin(), verdicts.end(), [](const Verdict& a, const Verdict& b) {
        const auto la = a.trace ? a.trace->size() : 0;
        const auto lb = b.trace ? b.trace->size() : 0;
        return std::tie(a.kind, la, a.rules) < std::tie(b.kind, lb, b.rules);
    });
}

std::vector<std::string> horizon_warnings(const Model& model, const CheckConfig& cfg) {
    Tick longest = 0;
    for (std::size_t r = 0; r < model.rule_count(); ++r) {
        const auto& rule = model.rule(r);
        longest = std::max(longest, rule.response.ticks);
        for (const auto& d : rule.defeaters)
            if (d.response) longest = std::max(longest, d.response->ticks);
    }
    if (longest <= cfg.horizon_ticks) return {};
    return {"horizon of " + std::to_string(cfg.horizon_ticks) + " ticks is shorter than the longest deadline (" +
            std::to_string(longest) + " ticks); conflicts at later deadlines may be missed"};
}

struct Exploration {
    std::vector<Verdict> deadlocks;
    std::vector<Verdict> divergences;
    bool partial = false;
};

Exploration explore_spec(const Model& model, const CheckConfig& cfg, detail::Budget& budget) {
    Exploration out;
    auto result = detail::explore(model, cfg, budget);
    out.partial = result.partial;
    for (const auto& [sig, f] : result.findings) {
        if (sig.kind == VerdictKind::Deadlock) out.deadlocks.push_back(deadlock_verdict(model, sig, f));
        else out.divergences.push_back(divergence_verdict(model, sig, f, cfg));
    }
    sort_verdicts(out.deadlocks);
    sort_verdicts(out.divergences);
    return out;
}

std::vector<Verdict> redundancies(const Model& model, const CheckConfig& cfg, detail::Budget& budget) {
    const std::size_t n = model.rule_count();
    std::vector<bool> kept(n, true);
    std::vector<Verdict> out;
    for (std::size_t i = n; i-- > 0;) {
        std::vector<bool> others = kept;
        others[i] = false;
        if (detail::violation_reachable(model, others, i, cfg, budget)) continue;
        kept[i] = false;
        Verdict v{VerdictKind::Redundancy, {model.rule(i).id}, std::nullopt, {}, {}};
        const std::vector<bool> none(n, false);
        if (!detail::violation_reachable(model, none, i, cfg, budget)) {
            v.message = model.rule(i).id + " can never be violated within the horizon";
        } else {
            std::optional<std::size_t> subsumer;
            for (std::size_t s = 0; s < n && !subsumer; ++s) {
                if (!others[s]) continue;
                std::vector<bool> single(n, false);
                single[s] = true;
                if (!detail::violation_reachable(model, single, i, cfg, budget)) subsumer = s;
            }
            if (subsumer) {
                v.rules.push_back(model.rule(*subsumer).id);
                v.message = model.rule(i).id + " is implied by " + model.rule(*subsumer).id +
                            "; removing it leaves the compliant behaviours unchanged";
            } else {
                v.message = model.rule(i).id +
                            " is implied by the remaining rules; removing it leaves the compliant behaviours unchanged";
            }
        }
        out.push_back(std::move(v));
    }
    sort_verdicts(out);
    return out;
}

}  // namespace

CheckReport check_consistency(const Spec& spec, const CheckConfig& cfg) {
    Model model(spec);
    detail::Budget budget(cfg.budget);
    auto ex = explore_spec(model, cfg, budget);
    return {std::move(ex.deadlocks), horizon_warnings(model, cfg), ex.partial};
}

CheckReport detect_divergence(const Spec& spec, const CheckConfig& cfg) {
    Model model(spec);
    detail::Budget budget(cfg.budget);
    auto ex = explore_spec(model, cfg, budget);
    return {std::move(ex.divergences), {}, ex.partial};
}

std::vector<Verdict> detect_redundancy(const Spec& spec, const CheckConfig& cfg) {
    Model model(spec);
    detail::Budget budget(cfg.budget);
    try {
        return redundancies(model, cfg, budget);
    } catch (const detail::BudgetExceeded&) {
        return {};
    }
}

CheckReport run_checks(const Spec& spec, const CheckConfig& cfg) {
    Model model(spec);
    detail::Budget budget(cfg.budget);
    CheckReport report;
    report.warnings = horizon_warnings(model, cfg);
    auto ex = explore_spec(model, cfg, budget);
    report.partial = ex.partial;
    report.verdicts = std::move(ex.deadlocks);
    report.verdicts.insert(report.verdicts.end(), ex.divergences.begin(), ex.divergences.end());
    if (!report.verdicts.empty() || report.partial) return report;
    try {
        auto red = redundancies(model, cfg, budget);
        report.verdicts.insert(report.verdicts.end(), red.begin(), red.end());
    } catch (const detail::BudgetExceeded&) {
        report.partial = true;
    } catch (const ConfigError& e) {
        report.warnings.push_back(std::string("redundancy analysis skipped: ") + e.what());
    }
    return report;
}

std::vector<Verdict> naming_verdicts(const Spec& spec, const std::vector<Diagnostic>& diagnostics) {
    std::vector<Verdict> out;
    for (const auto& d : diagnostics) {
        if (d.category != DiagnosticCategory::Naming || d.severity != Severity::Error) continue;
        for (const auto& rule : spec.rules) {
            if (d.span.offset < rule.span.offset || d.span.offset >= rule.span.offset + rule.span.length) continue;
            out.push_back(Verdict{VerdictKind::Naming, {rule.id}, std::nullopt, {}, d.message});
            break;
        }
    }
    return out;
}

Analysis analyze_spec(Spec spec, const CheckConfig& cfg) {
    Analysis a;
    a.spec = std::move(spec);
    a.diagnostics = analyze_names(a.spec);
    if (!has_errors(a.diagnostics)) {
        auto types = typecheck(a.spec);
        a.diagnostics.insert(a.diagnostics.end(), types.begin(), types.end());
    }
    if (has_errors(a.diagnostics)) {
        a.report.verdicts = naming_verdicts(a.spec, a.diagnostics);
        return a;
    }
    try {
        a.report = run_checks(a.spec, cfg);
        a.checked = true;
    } catch (const ConfigError& e) {
        a.diagnostics.push_back(Diagnostic{Severity::Error, DiagnosticCategory::Type, {}, e.what(), std::nullopt});
    }
    return a;
}

Analysis analyze_text(std::string_view text, const CheckConfig& cfg) {
    auto parsed = parse(text);
    if (parsed.ok()) return analyze_spec(std::move(parsed.spec), cfg);
    Analysis a;
    a.spec = std::move(parsed.spec);
    a.diagnostics = std::move(parsed.diagnostics);
    auto names = analyze_names(a.spec);
    a.diagnostics.insert(a.diagnostics.end(), names.begin(), names.end());
    a.report.verdicts = naming_verdicts(a.spec, a.diagnostics);
    return a;
}

}  // namespace sleec
