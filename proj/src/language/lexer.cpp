#include <cctype>
#include <charconv>
#include <unordered_map>

#include "sleec/language.hpp"

namespace sleec {

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

std::string_view to_string(DiagnosticCategory c) {
    switch (c) {
        case DiagnosticCategory::Syntax: return "syntax";
        case DiagnosticCategory::Naming: return "naming";
        case DiagnosticCategory::Type: return "type";
    }
    return "syntax";
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

std::string_view to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Integer: return "integer";
        case TokenKind::Unit: return "time unit";
        case TokenKind::DefStart: return "'def_start'";
        case TokenKind::DefEnd: return "'def_end'";
        case TokenKind::RuleStart: return "'rule_start'";
        case TokenKind::RuleEnd: return "'rule_end'";
        case TokenKind::Event: return "'event'";
        case TokenKind::Measure: return "'measure'";
        case TokenKind::Constant: return "'constant'";
        case TokenKind::When: return "'when'";
        case TokenKind::Then: return "'then'";
        case TokenKind::Not: return "'not'";
        case TokenKind::Unless: return "'unless'";
        case TokenKind::Within: return "'within'";
        case TokenKind::And: return "'and'";
        case TokenKind::Or: return "'or'";
        case TokenKind::Boolean: return "'boolean'";
        case TokenKind::Numeric: return "'numeric'";
        case TokenKind::Scale: return "'scale'";
        case TokenKind::Unsupported: return "unsupported keyword";
        case TokenKind::Colon: return "':'";
        case TokenKind::Comma: return "','";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::Less: return "'<'";
        case TokenKind::Greater: return "'>'";
        case TokenKind::LessEq: return "'<='";
        case TokenKind::GreaterEq: return "'>='";
        case TokenKind::Equal: return "'='";
        case TokenKind::NotEqual: return "'<>'";
        case TokenKind::End: return "end of input";
    }
    return "token";
}

namespace {

const std::unordered_map<std::string_view, TokenKind>& keywords() {
    static const std::unordered_map<std::string_view, TokenKind> table{
        {"def_start", TokenKind::DefStart}, {"def_end", TokenKind::DefEnd},
        {"rule_start", TokenKind::RuleStart}, {"rule_end", TokenKind::RuleEnd},
        {"event", TokenKind::Event},       {"measure", TokenKind::Measure},
        {"constant", TokenKind::Constant}, {"when", TokenKind::When},
        {"then", TokenKind::Then},         {"not", TokenKind::Not},
        {"unless", TokenKind::Unless},     {"within", TokenKind::Within},
        {"and", TokenKind::And},           {"or", TokenKind::Or},
        {"boolean", TokenKind::Boolean},   {"numeric", TokenKind::Numeric},
        {"scale", TokenKind::Scale},       {"otherwise", TokenKind::Unsupported},
        {"exists", TokenKind::Unsupported}, {"meanwhile", TokenKind::Unsupported},
    };
    return table;
}

std::optional<TimeUnit> unit_keyword(std::string_view word) {
    if (word == "second" || word == "seconds") return TimeUnit::Seconds;
    if (word == "minute" || word == "minutes") return TimeUnit::Minutes;
    if (word == "hour" || word == "hours") return TimeUnit::Hours;
    if (word == "day" || word == "days") return TimeUnit::Days;
    return std::nullopt;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    LexResult run() {
        LexResult out;
        while (true) {
            skip_space_and_comments();
            if (pos_ >= text_.size()) break;
            const std::size_t start = pos_;
            const int line = line_, col = col_;
            const char c = text_[pos_];
            Token tok;
            if (std::isalpha(static_cast<unsigned char>(c))) {
                while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                                text_[pos_] == '_'))
                    advance();
                tok.text = std::string(text_.substr(start, pos_ - start));
                if (auto it = keywords().find(tok.text); it != keywords().end()) {
                    tok.kind = it->second;
                } else if (auto unit = unit_keyword(tok.text)) {
                    tok.kind = TokenKind::Unit;
                    tok.unit = *unit;
                } else {
                    tok.kind = TokenKind::Identifier;
                }
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '-' && pos_ + 1 < text_.size() &&
                        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
                advance();
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
                tok.kind = TokenKind::Integer;
                tok.text = std::string(text_.substr(start, pos_ - start));
                auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.integer);
                if (ec != std::errc{}) {
                    out.diagnostics.push_back({Severity::Error, DiagnosticCategory::Syntax,
                                               {start, pos_ - start, line, col},
                                               "integer literal '" + tok.text + "' is out of 64-bit range",
                                               std::nullopt});
                }
            } else {
                tok.kind = punctuation(c);
                if (tok.kind == TokenKind::End) {
                    advance();
                    out.diagnostics.push_back({Severity::Error, DiagnosticCategory::Syntax,
                                               {start, pos_ - start, line, col},
                                               "unexpected character '" + std::string(text_.substr(start, pos_ - start)) + "'",
                                               std::nullopt});
                    continue;
                }
                tok.text = std::string(text_.substr(start, pos_ - start));
            }
            tok.span = {start, pos_ - start, line, col};
            out.tokens.push_back(std::move(tok));
        }
        Token end;
        end.kind = TokenKind::End;
        end.span = {text_.size(), 0, line_, col_};
        out.tokens.push_back(end);
        return out;
    }

private:
    TokenKind punctuation(char c) {
        auto next = [&](char n) { return pos_ + 1 < text_.size() && text_[pos_ + 1] == n; };
        switch (c) {
            case ':': advance(); return TokenKind::Colon;
            case ',': advance(); return TokenKind::Comma;
            case '(': advance(); return TokenKind::LParen;
            case ')': advance(); return TokenKind::RParen;
            case '=': advance(); return TokenKind::Equal;
            case '<':
                if (next('=')) { advance(); advance(); return TokenKind::LessEq; }
                if (next('>')) { advance(); advance(); return TokenKind::NotEqual; }
                advance();
                return TokenKind::Less;
            case '>':
                if (next('=')) { advance(); advance(); return TokenKind::GreaterEq; }
                advance();
                return TokenKind::Greater;
            default:
                break;
        }
        return TokenKind::End;
    }

    void advance() {
        const auto c = static_cast<unsigned char>(text_[pos_]);
        ++pos_;
        // continuation bytes of a UTF-8 sequence stay on the same column
        while (c >= 0xC0 && pos_ < text_.size() && (static_cast<unsigned char>(text_[pos_]) & 0xC0) == 0x80) ++pos_;
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

LexResult tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace sleec
