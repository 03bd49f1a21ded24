#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sleec/ast.hpp"

namespace sleec {

enum class Severity { Error, Warning };
enum class DiagnosticCategory { Syntax, Naming, Type };

struct Diagnostic {
    Severity severity = Severity::Error;
    DiagnosticCategory category = DiagnosticCategory::Syntax;
    SourceSpan span;
    std::string message;
    std::optional<std::string> suggestion;
};

std::string_view to_string(Severity s);
std::string_view to_string(DiagnosticCategory c);

bool has_errors(const std::vector<Diagnostic>& diags);

enum class TokenKind {
    Identifier,
    Integer,
    Unit,
    // keywords
    DefStart,
    DefEnd,
    RuleStart,
    RuleEnd,
    Event,
    Measure,
    Constant,
    When,
    Then,
    Not,
    Unless,
    Within,
    And,
    Or,
    Boolean,
    Numeric,
    Scale,
    /// Keyword from the wider SLEEC language that this grammar does not support.
    Unsupported,
    // punctuation
    Colon,
    Comma,
    LParen,
    RParen,
    Less,
    Greater,
    LessEq,
    GreaterEq,
    Equal,
    NotEqual,
    End,
};

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    SourceSpan span;
    std::int64_t integer = 0;         // Integer
    TimeUnit unit = TimeUnit::Minutes;  // Unit

    friend bool operator==(const Token& a, const Token& b) {
        return a.kind == b.kind && a.text == b.text;
    }
};

struct LexResult {
    std::vector<Token> tokens;  // always terminated by an End token
    std::vector<Diagnostic> diagnostics;
};

/// Splits source text into tokens. `//` comments run to end of line.
/// Unknown characters are reported and skipped.
LexResult tokenize(std::string_view text);

struct ParseResult {
    /// Everything that parsed; rules with syntax errors are dropped.
    Spec spec;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Parses a whole document. The parser resynchronises at rule and
/// definition boundaries so several syntax errors can be reported at once.
ParseResult parse(std::string_view text);

struct RuleParseResult {
    std::optional<Rule> rule;
    std::vector<Diagnostic> diagnostics;
};

/// Parses exactly one rule, as written inside a `rule_start` block.
RuleParseResult parse_rule(std::string_view text);

/// Undefined, duplicated and misspelled identifiers. Empty means name-clean.
std::vector<Diagnostic> analyze_names(const Spec& spec);

/// Type errors in measure declarations and conditions. Assumes a name-clean spec.
std::vector<Diagnostic> typecheck(const Spec& spec);

/// Canonical source rendering. parse(format(s)) is structurally equal to s.
std::string format(const Spec& spec);
std::string format_rule(const Rule& rule);
std::string format_condition(const Condition& cond);
std::string format_response(const Response& response);

/// Levenshtein distance, used for near-miss suggestions.
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace sleec
