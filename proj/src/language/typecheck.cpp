#include <algorithm>
#include <set>

#include "sleec/language.hpp"

namespace sleec {

namespace {

class TypeChecker {
public:
    explicit TypeChecker(const Spec& spec) : spec_(spec) {}

    std::vector<Diagnostic> run() {
        for (const auto& m : spec_.measures) {
            if (m.kind != MeasureKind::Scale) continue;
            std::set<std::string> seen;
            for (const auto& lit : m.scale) {
                if (!seen.insert(lit).second)
                    error(m.span, "scale literal '" + lit + "' appears twice in measure '" + m.name + "'");
            }
            if (seen.size() < 2)
                error(m.span, "scale measure '" + m.name + "' needs at least two distinct literals");
        }
        for (const auto& r : spec_.rules) {
            if (r.trigger_condition) check(*r.trigger_condition);
            for (const auto& d : r.defeaters) check(*d.condition);
        }
        return std::move(out_);
    }

private:
    void check(const Condition& cond) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, BoolAtom>) {
                    const MeasureDef* m = spec_.find_measure(n.measure);
                    if (m && m->kind != MeasureKind::Boolean)
                        error(n.span, std::string(m->kind == MeasureKind::Numeric ? "numeric" : "scale") +
                                          " measure '" + n.measure + "' used as a boolean condition");
                } else if constexpr (std::is_same_v<T, Comparison>) {
                    compare(n);
                } else if constexpr (std::is_same_v<T, Negation>) {
                    check(*n.operand);
                } else {
                    check(*n.lhs);
                    check(*n.rhs);
                }
            },
            cond.node());
    }

    void compare(const Comparison& cmp) {
        const MeasureDef* m = spec_.find_measure(cmp.measure);
        if (!m) return;
        switch (m->kind) {
            case MeasureKind::Boolean:
                error(cmp.span, "boolean measure '" + cmp.measure + "' cannot be compared with '" +
                                    std::string(op_text(cmp.op)) + "'; use it directly or with 'not'");
                break;
            case MeasureKind::Numeric:
                if (cmp.rhs.is_identifier() && !spec_.find_constant(cmp.rhs.identifier()))
                    error(cmp.rhs.span, "numeric measure '" + cmp.measure + "' compared with non-numeric '" +
                                            cmp.rhs.identifier() + "'");
                break;
            case MeasureKind::Scale:
                if (!cmp.rhs.is_identifier()) {
                    error(cmp.rhs.span, "scale measure '" + cmp.measure + "' compared with integer " +
                                            std::to_string(cmp.rhs.integer()));
                } else if (std::find(m->scale.begin(), m->scale.end(), cmp.rhs.identifier()) == m->scale.end()) {
                    error(cmp.rhs.span, "'" + cmp.rhs.identifier() + "' is not a value of scale measure '" +
                                            cmp.measure + "'");
                }
                break;
        }
    }

    void error(SourceSpan span, std::string msg) {
        out_.push_back({Severity::Error, DiagnosticCategory::Type, span, std::move(msg), std::nullopt});
    }

    const Spec& spec_;
    std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> typecheck(const Spec& spec) { return TypeChecker(spec).run(); }

}  // namespace sleec
