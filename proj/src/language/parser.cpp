#include <unordered_set>

#include "sleec/language.hpp"

namespace sleec {

namespace {

struct SyntaxError {
    Diagnostic diag;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
        : toks_(std::move(tokens)), diags_(diags) {}

    Spec document() {
        Spec spec;
        try {
            expect(TokenKind::DefStart, "a document must open with 'def_start'");
        } catch (const SyntaxError& e) {
            diags_.push_back(e.diag);
            return spec;
        }
        definitions(spec);
        bool rules_open = true;
        try {
            expect(TokenKind::RuleStart, "expected 'rule_start' after the definitions block");
        } catch (const SyntaxError& e) {
            diags_.push_back(e.diag);
            rules_open = false;
        }
        if (rules_open) rules(spec);
        if (rules_open && !at(TokenKind::End)) {
            diags_.push_back(error_at(peek(), "unexpected " + describe(peek()) + " after 'rule_end'"));
        }
        return spec;
    }

    std::optional<Rule> single_rule() {
        try {
            Rule r = rule();
            if (!at(TokenKind::End)) throw SyntaxError{error_at(peek(), "unexpected " + describe(peek()) + " after rule")};
            return r;
        } catch (const SyntaxError& e) {
            diags_.push_back(e.diag);
            return std::nullopt;
        }
    }

private:
    // --- definitions -------------------------------------------------------

    void definitions(Spec& spec) {
        while (!at(TokenKind::DefEnd)) {
            if (at(TokenKind::End) || at(TokenKind::RuleStart)) {
                diags_.push_back(error_at(peek(), "missing 'def_end' before " + describe(peek())));
                return;
            }
            try {
                definition(spec);
            } catch (const SyntaxError& e) {
                diags_.push_back(e.diag);
                while (!at(TokenKind::Event) && !at(TokenKind::Measure) && !at(TokenKind::Constant) &&
                       !at(TokenKind::DefEnd) && !at(TokenKind::RuleStart) && !at(TokenKind::End))
                    ++pos_;
            }
        }
        ++pos_;  // def_end
    }

    void definition(Spec& spec) {
        const Token& kw = peek();
        switch (kw.kind) {
            case TokenKind::Event: {
                ++pos_;
                const Token& name = expect(TokenKind::Identifier, "expected an event name after 'event'");
                spec.events.push_back({name.text, name.span});
                return;
            }
            case TokenKind::Measure: {
                ++pos_;
                const Token& name = expect(TokenKind::Identifier, "expected a measure name after 'measure'");
                expect(TokenKind::Colon, "expected ':' after measure name '" + name.text + "'");
                MeasureDef m;
                m.name = name.text;
                m.span = name.span;
                if (accept(TokenKind::Boolean)) {
                    m.kind = MeasureKind::Boolean;
                } else if (accept(TokenKind::Numeric)) {
                    m.kind = MeasureKind::Numeric;
                } else if (accept(TokenKind::Scale)) {
                    m.kind = MeasureKind::Scale;
                    expect(TokenKind::LParen, "expected '(' after 'scale'");
                    do {
                        m.scale.push_back(expect(TokenKind::Identifier, "expected a scale literal").text);
                    } while (accept(TokenKind::Comma));
                    expect(TokenKind::RParen, "expected ')' to close the scale literal list");
                } else {
                    throw SyntaxError{error_at(peek(), "expected 'boolean', 'numeric' or 'scale(...)' as the type of measure '" + m.name + "'")};
                }
                spec.measures.push_back(std::move(m));
                return;
            }
            case TokenKind::Constant: {
                ++pos_;
                const Token& name = expect(TokenKind::Identifier, "expected a constant name after 'constant'");
                expect(TokenKind::Equal, "expected '=' after constant name '" + name.text + "'");
                const Token& value = expect(TokenKind::Integer, "expected an integer value for constant '" + name.text + "'");
                spec.constants.push_back({name.text, value.integer, name.span});
                return;
            }
            default:
                throw SyntaxError{error_at(kw, "expected 'event', 'measure' or 'constant' but found " + describe(kw))};
        }
    }

    // --- rules -------------------------------------------------------------

    void rules(Spec& spec) {
        while (!at(TokenKind::RuleEnd)) {
            if (at(TokenKind::End)) {
                diags_.push_back(error_at(peek(), "missing 'rule_end' at end of input"));
                return;
            }
            const std::size_t start = pos_;
            try {
                spec.rules.push_back(rule());
            } catch (const SyntaxError& e) {
                diags_.push_back(e.diag);
                recover_to_rule_boundary(start);
            }
        }
        ++pos_;  // rule_end
    }

    /// Always makes progress past `start`, so a failing rule cannot be retried forever.
    void recover_to_rule_boundary(std::size_t start) {
        if (pos_ == start && !at(TokenKind::End) && !at(TokenKind::RuleEnd)) ++pos_;
        while (!at(TokenKind::End) && !at(TokenKind::RuleEnd) &&
               !(at(TokenKind::Identifier) && peek(1).kind == TokenKind::When))
            ++pos_;
    }

    Rule rule() {
        Rule r;
        const Token& id = expect(TokenKind::Identifier, "expected a rule identifier");
        r.id = id.text;
        r.span = id.span;
        expect(TokenKind::When, "expected 'when' after rule identifier '" + r.id + "'");
        const Token& trig = expect(TokenKind::Identifier, "expected a trigger event after 'when'");
        r.trigger_event = trig.text;
        r.trigger_span = trig.span;
        if (accept(TokenKind::And)) r.trigger_condition = condition();
        expect(TokenKind::Then, "expected 'then' in rule '" + r.id + "'");
        r.response = response();
        while (accept(TokenKind::Unless)) {
            Defeater d;
            d.condition = condition();
            if (accept(TokenKind::Then)) d.response = response();
            r.defeaters.push_back(std::move(d));
        }
        const Token& last = toks_[pos_ - 1];
        r.span.length = last.span.offset + last.span.length - r.span.offset;
        if (at(TokenKind::Unsupported)) unsupported();
        if (!at(TokenKind::RuleEnd) && !at(TokenKind::End) && !at(TokenKind::Identifier)) {
            throw SyntaxError{error_at(peek(), "unexpected " + describe(peek()) + " at end of rule '" + r.id + "'")};
        }
        if (at(TokenKind::Identifier) && peek(1).kind != TokenKind::When) {
            throw SyntaxError{error_at(peek(), "unexpected identifier '" + peek().text + "' after rule '" + r.id +
                                                   "' (expected 'unless', a new rule, or 'rule_end')")};
        }
        return r;
    }

    Response response() {
        Response resp;
        if (accept(TokenKind::Not)) resp.polarity = Polarity::MustNot;
        if (at(TokenKind::Unsupported)) unsupported();
        // `Id when` starts the next rule; the current one lost its response
        if (at(TokenKind::Identifier) && peek(1).kind == TokenKind::When)
            throw SyntaxError{error_at(peek(), "expected a response event before the next rule '" + peek().text + "'")};
        const Token& ev = expect(TokenKind::Identifier, "expected a response event");
        resp.event = ev.text;
        resp.event_span = ev.span;
        if (accept(TokenKind::Within)) {
            const Token& amount = expect(TokenKind::Integer, "expected a positive amount after 'within'");
            if (amount.integer < 1) throw SyntaxError{error_at(amount, "deadline amount must be at least 1")};
            const Token& unit = expect(TokenKind::Unit, "expected a time unit (seconds, minutes, hours, days)");
            resp.deadline = TimeValue{amount.integer, unit.unit};
        } else if (resp.polarity == Polarity::MustNot) {
            throw SyntaxError{error_at(ev, "prohibition 'not " + resp.event + "' needs a 'within' deadline")};
        }
        return resp;
    }

    ConditionPtr condition() {
        ConditionPtr lhs = conjunction();
        while (accept(TokenKind::Or)) lhs = Condition::disjoin(lhs, conjunction());
        return lhs;
    }

    ConditionPtr conjunction() {
        ConditionPtr lhs = unary();
        while (accept(TokenKind::And)) lhs = Condition::conjoin(lhs, unary());
        return lhs;
    }

    ConditionPtr unary() {
        if (accept(TokenKind::Not)) return Condition::negate(unary());
        if (accept(TokenKind::LParen)) {
            ConditionPtr inner = condition();
            expect(TokenKind::RParen, "expected ')' to close the condition");
            return inner;
        }
        if (at(TokenKind::Unsupported)) unsupported();
        const Token& m = expect(TokenKind::Identifier, "expected a measure in condition");
        std::optional<CompareOp> op;
        switch (peek().kind) {
            case TokenKind::Less: op = CompareOp::Lt; break;
            case TokenKind::Greater: op = CompareOp::Gt; break;
            case TokenKind::LessEq: op = CompareOp::Le; break;
            case TokenKind::GreaterEq: op = CompareOp::Ge; break;
            case TokenKind::Equal: op = CompareOp::Eq; break;
            case TokenKind::NotEqual: op = CompareOp::Ne; break;
            default: break;
        }
        if (!op) return Condition::atom(m.text, m.span);
        ++pos_;
        const Token& v = peek();
        Operand rhs;
        if (v.kind == TokenKind::Integer) {
            rhs.value = v.integer;
        } else if (v.kind == TokenKind::Identifier) {
            rhs.value = v.text;
        } else {
            throw SyntaxError{error_at(v, "expected an integer, constant or scale literal after '" +
                                              std::string(op_text(*op)) + "'")};
        }
        rhs.span = v.span;
        ++pos_;
        SourceSpan span = m.span;
        span.length = v.span.offset + v.span.length - m.span.offset;
        return Condition::compare(m.text, *op, std::move(rhs), span);
    }

    [[noreturn]] void unsupported() {
        throw SyntaxError{error_at(peek(), "unsupported construct '" + peek().text + "' (not part of this SLEEC dialect)")};
    }

    // --- token helpers -----------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }
    bool at(TokenKind k) const { return peek().kind == k; }
    bool accept(TokenKind k) {
        if (!at(k)) return false;
        ++pos_;
        return true;
    }
    const Token& expect(TokenKind k, const std::string& message) {
        if (at(TokenKind::Unsupported) && k != TokenKind::Unsupported) unsupported();
        if (!at(k)) throw SyntaxError{error_at(peek(), message + " (found " + describe(peek()) + ")")};
        return toks_[pos_++];
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
            case TokenKind::Identifier: return "identifier '" + t.text + "'";
            case TokenKind::Integer: return "integer " + t.text;
            case TokenKind::Unit: return "time unit '" + t.text + "'";
            case TokenKind::End: return "end of input";
            default: return "'" + t.text + "'";
        }
    }

    static Diagnostic error_at(const Token& t, std::string message) {
        return {Severity::Error, DiagnosticCategory::Syntax, t.span, std::move(message), std::nullopt};
    }

    std::vector<Token> toks_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
};

}  // namespace

ParseResult parse(std::string_view text) {
    LexResult lexed = tokenize(text);
    ParseResult out;
    out.diagnostics = std::move(lexed.diagnostics);
    Parser parser(std::move(lexed.tokens), out.diagnostics);
    out.spec = parser.document();
    return out;
}

RuleParseResult parse_rule(std::string_view text) {
    LexResult lexed = tokenize(text);
    RuleParseResult out;
    out.diagnostics = std::move(lexed.diagnostics);
    Parser parser(std::move(lexed.tokens), out.diagnostics);
    out.rule = parser.single_rule();
    if (has_errors(out.diagnostics)) out.rule.reset();
    return out;
}

}  // namespace sleec
