#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sleec/checker.hpp"

namespace sleec {

// ---- context and prompt ----------------------------------------------------

/// Rules named by the verdict or sharing an event or measure with its trace,
/// plus the definitions they reference. Source order is preserved.
Spec select_context(const Spec& spec, const Verdict& verdict);

/// One process line per rule, e.g.
/// `R1 = DetectUserFallen -> (emergencyLevel>L4 & CallEmergencySupport) [] CallEmergencySupport within 2 tock`.
/// Defeaters come first, latest first: the leftmost alternative whose guard holds applies.
std::string render_pseudo_csp(const std::vector<Rule>& rules, const TickScale& scale);

/// Byte-identical copies of the files under schema/.
std::string_view conflict_template();
std::string_view redundancy_template();

inline constexpr std::string_view kMissingDescription =
    "No system description was provided. Explain the problem using only the rules and the trace above.";

struct PromptBundle {
    std::string rules;        // (1) DSL source of the selected context
    std::string semantics;    // (2) pseudo-CSP rendering
    std::string traces;       // (3) counterexample trace
    std::string description;  // (4) system description or placeholder
    std::string instructions;
    std::string output_template;
    std::vector<std::string> warnings;

    std::string system_message() const;
    std::string text() const;
};

PromptBundle build_prompt(const Spec& spec, const Verdict& verdict, std::string_view system_description,
                          const CheckConfig& cfg);

// ---- reports ---------------------------------------------------------------

enum class ResolutionKind { AddRule, CombineRule, RemoveRule, ModifyRule };

std::string_view to_string(ResolutionKind kind);
std::optional<ResolutionKind> resolution_kind_from(std::string_view text);

/// Exactly "deadlock", "divergence" or "naming".
bool is_conflict_category(std::string_view text);

struct ReportSuggestion {
    std::string rule;  // target id(s); comma-separated for combine
    std::string text;  // SLEEC rule source
    std::string justification;

    friend bool operator==(const ReportSuggestion&, const ReportSuggestion&) = default;
};

struct ExplanationReport {
    bool redundancy = false;  // "Redundant Rules" rather than "Conflicting Rules"
    std::string rule1;
    std::optional<std::string> rule2;
    std::string scenario;
    std::string category;
    std::string justification;
    ResolutionKind kind = ResolutionKind::ModifyRule;
    ReportSuggestion suggestion1;
    ReportSuggestion suggestion2;

    friend bool operator==(const ExplanationReport&, const ExplanationReport&) = default;
};

/// Serialises in the template's shape.
std::string report_to_json(const ExplanationReport& report, int indent = 2);

class ReportError : public std::runtime_error {
public:
    enum class Kind { Format, Enumeration, Reference };
    ReportError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Strips fences and surrounding prose, then validates the first JSON object.
/// Errors quote the offending excerpt so they can be fed back to the model.
ExplanationReport parse_report(std::string_view raw);

/// Additionally requires every rule named in the error part to exist in `spec`.
void check_references(const ExplanationReport& report, const Spec& spec);

// ---- suggestions -----------------------------------------------------------

struct Suggestion {
    ResolutionKind kind = ResolutionKind::ModifyRule;
    /// Rule to remove or replace; comma-separated ids to combine.
    std::string target_rule_id;
    std::string sleec_text;
    std::optional<Rule> parsed;
};

/// Suggestion 1 or 2 of a report. Rule text is dropped for removals.
Suggestion suggestion_from(const ExplanationReport& report, int which);

struct SuggestionOutcome {
    bool applied = false;
    Spec spec;         // edited spec when applied
    std::string text;  // its canonical source
    std::vector<Diagnostic> diagnostics;
    CheckReport report;
};

/// Applies the edit to a copy of `spec` and re-runs the whole pipeline.
/// Nothing is applied when the suggested text or the edited spec has errors.
SuggestionOutcome validate_suggestion(const Spec& spec, Suggestion s, const CheckConfig& cfg);

// ---- providers -------------------------------------------------------------

struct LlmConfig {
    enum class Provider { Remote, Mock };

    Provider provider = Provider::Mock;
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-4o";
    std::string api_key;
    double temperature = 0.0;
    int max_tokens = 2048;
    int retries = 1;
    std::chrono::seconds timeout{60};
    /// Mock responses, one `{sha256(prompt)}.json` per prompt.
    std::filesystem::path fixtures_dir;

    /// SLEEC_LLM_PROVIDER, SLEEC_LLM_ENDPOINT, SLEEC_LLM_MODEL, SLEEC_LLM_API_KEY,
    /// SLEEC_LLM_TIMEOUT_SECS and SLEEC_LLM_FIXTURES over the defaults.
    static LlmConfig from_env();
};

class LlmError : public std::runtime_error {
public:
    enum class Kind { Transport, Timeout, Auth };
    LlmError(Kind kind, int status, const std::string& message)
        : std::runtime_error(message), kind_(kind), status_(status) {}
    Kind kind() const { return kind_; }
    int status() const { return status_; }

private:
    Kind kind_;
    int status_;
};

class LlmProvider {
public:
    virtual ~LlmProvider() = default;
    virtual std::string complete(const std::string& system, const std::string& user) = 0;
};

std::unique_ptr<LlmProvider> make_provider(const LlmConfig& cfg);

/// Hex SHA-256, the key of mock fixtures and of the response cache.
std::string prompt_hash(std::string_view text);

/// Calls the provider, retrying transport failures `retries` times.
std::string request_explanation(const PromptBundle& bundle, LlmProvider& provider, int retries);

class ReportCache {
public:
    std::optional<ExplanationReport> find(const std::string& key) const;
    void store(const std::string& key, const ExplanationReport& report);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, ExplanationReport> entries_;
};

struct Explanation {
    ExplanationReport report;
    std::vector<std::string> warnings;
    bool cached = false;
    int attempts = 0;  // provider calls made
};

/// build_prompt -> provider -> parse_report, with one repair round that
/// appends the validation errors to the prompt.
class Explainer {
public:
    Explainer(std::shared_ptr<LlmProvider> provider, std::shared_ptr<ReportCache> cache, int retries = 1);

    Explanation explain(const Spec& spec, const Verdict& verdict, std::string_view system_description,
                        const CheckConfig& cfg);

private:
    std::shared_ptr<LlmProvider> provider_;
    std::shared_ptr<ReportCache> cache_;
    int retries_;
};

}  // namespace sleec
