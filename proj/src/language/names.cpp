#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "sleec/language.hpp"

namespace sleec {

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

namespace {

enum class NameKind { Event, Measure, Constant };

std::string_view kind_name(NameKind k) {
    switch (k) {
        case NameKind::Event: return "event";
        case NameKind::Measure: return "measure";
        case NameKind::Constant: return "constant";
    }
    return "name";
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

/// Closest candidate that differs only in case or by one edit. Ties go to the
/// lexicographically smallest name so the result does not depend on declaration order.
std::optional<std::string> near_miss(std::string_view name, const std::set<std::string>& candidates) {
    std::optional<std::string> best;
    int best_rank = 3;
    for (const auto& c : candidates) {
        int rank = 3;
        if (iequals(c, name)) {
            rank = 1;
        } else if (edit_distance(c, name) == 1) {
            rank = 2;
        }
        if (rank < best_rank) {
            best_rank = rank;
            best = c;
        }
    }
    return best;
}

class NameAnalysis {
public:
    explicit NameAnalysis(const Spec& spec) : spec_(spec) {}

    std::vector<Diagnostic> run() {
        collect_definitions();
        std::set<std::string> rule_ids;
        for (const auto& r : spec_.rules) {
            if (!rule_ids.insert(r.id).second) {
                error(r.span, "duplicate rule identifier '" + r.id + "'");
            }
            expect_kind(r.trigger_event, r.trigger_span, NameKind::Event);
            if (r.trigger_condition) check_condition(*r.trigger_condition);
            check_response(r.response);
            for (const auto& d : r.defeaters) {
                check_condition(*d.condition);
                if (d.response) check_response(*d.response);
            }
        }
        std::stable_sort(out_.begin(), out_.end(), [](const Diagnostic& a, const Diagnostic& b) {
            if (a.span.offset != b.span.offset) return a.span.offset < b.span.offset;
            return a.message < b.message;
        });
        return std::move(out_);
    }

private:
    void collect_definitions() {
        auto define = [&](const std::string& name, NameKind kind, SourceSpan span) {
            auto [it, fresh] = kinds_.emplace(name, kind);
            if (!fresh) {
                error(span, "duplicate definition of '" + name + "' (already defined as " +
                                std::string(kind_name(it->second)) + ")");
                return;
            }
            by_kind_[kind].insert(name);
        };
        for (const auto& e : spec_.events) define(e.name, NameKind::Event, e.span);
        for (const auto& m : spec_.measures) {
            define(m.name, NameKind::Measure, m.span);
            for (const auto& lit : m.scale) literals_.insert(lit);
        }
        for (const auto& c : spec_.constants) define(c.name, NameKind::Constant, c.span);
    }

    void check_response(const Response& resp) { expect_kind(resp.event, resp.event_span, NameKind::Event); }

    void check_condition(const Condition& cond) {
        for_each_measure(cond, [&](const std::string& name, SourceSpan span) {
            span.length = std::min(span.length, name.size());
            expect_kind(name, span, NameKind::Measure);
        });
        for_each_comparison(cond, [&](const Comparison& cmp) {
            if (!cmp.rhs.is_identifier()) return;
            const std::string& value = cmp.rhs.identifier();
            auto it = kinds_.find(value);
            if (literals_.count(value) || (it != kinds_.end() && it->second == NameKind::Constant)) return;
            if (it != kinds_.end()) {
                error(cmp.rhs.span, "'" + value + "' is " + std::string(kind_name(it->second)) +
                                        ", not a constant or scale value");
                return;
            }
            std::set<std::string> candidates = literals_;
            candidates.insert(by_kind_[NameKind::Constant].begin(), by_kind_[NameKind::Constant].end());
            undefined(value, cmp.rhs.span, "constant or scale value", candidates);
        });
    }

    void expect_kind(const std::string& name, SourceSpan span, NameKind want) {
        auto it = kinds_.find(name);
        if (it == kinds_.end()) {
            undefined(name, span, std::string(kind_name(want)), by_kind_[want]);
        } else if (it->second != want) {
            error(span, "'" + name + "' is a " + std::string(kind_name(it->second)) + " but is used as " +
                            (want == NameKind::Event ? "an " : "a ") + std::string(kind_name(want)));
        }
    }

    void undefined(const std::string& name, SourceSpan span, const std::string& what,
                   const std::set<std::string>& candidates) {
        auto hint = near_miss(name, candidates);
        if (!hint) {
            std::set<std::string> all;
            for (const auto& [n, k] : kinds_) all.insert(n);
            all.insert(literals_.begin(), literals_.end());
            hint = near_miss(name, all);
        }
        std::string msg = "undefined " + what + " '" + name + "'";
        if (hint) msg += "; did you mean '" + *hint + "'?";
        out_.push_back({Severity::Error, DiagnosticCategory::Naming, span, std::move(msg), hint});
    }

    void error(SourceSpan span, std::string msg) {
        out_.push_back({Severity::Error, DiagnosticCategory::Naming, span, std::move(msg), std::nullopt});
    }

    const Spec& spec_;
    std::map<std::string, NameKind> kinds_;
    std::map<NameKind, std::set<std::string>> by_kind_;
    std::set<std::string> literals_;
    std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> analyze_names(const Spec& spec) { return NameAnalysis(spec).run(); }

}  // namespace sleec
