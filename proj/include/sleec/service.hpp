#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sleec/checker.hpp"
#include "sleec/explain.hpp"
#include "sleec/json_io.hpp"

namespace sleec {

using TimePoint = std::chrono::system_clock::time_point;
using ClockFn = std::function<TimePoint()>;

class NotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BadRequest : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Revision {
    std::string text;
    TimePoint submitted_at;
    Json diagnostics = Json::array();
    Json verdicts = Json::array();
    Json warnings = Json::array();
    bool partial = false;
    /// No blocking verdicts and no error diagnostics.
    bool clean = false;
    /// `kind:rule,rule` of each blocking verdict.
    std::vector<std::string> signatures;
};

struct ExplanationRecord {
    std::size_t revision = 0;
    std::size_t verdict = 0;
    Json report;
    TimePoint requested_at;
};

struct Session {
    std::string id;
    TimePoint created_at;
    std::vector<Revision> revisions;
    std::vector<ExplanationRecord> explanations;
    std::optional<TimePoint> resolved_at;
};

struct SessionMetrics {
    std::size_t revisions = 0;
    /// 1-based index of the first clean revision.
    std::optional<std::size_t> iterations;
    /// From the first revision with problems to the first clean one; zero when
    /// the first revision was already clean.
    std::optional<std::chrono::milliseconds> elapsed;
    /// Distinct blocking verdicts that appeared and are gone from the latest considered revision.
    std::size_t resolved_rules = 0;
};

SessionMetrics compute_metrics(const Session& s);

struct SubmitResult {
    std::optional<std::size_t> revision;  // absent when nothing was appended
    std::vector<Diagnostic> diagnostics;
    CheckReport report;
};

struct ServiceOptions {
    std::filesystem::path data_dir = "sleec-data";
    CheckConfig check;
    LlmConfig llm;
    ClockFn clock = [] { return std::chrono::system_clock::now(); };

    /// SLEEC_DATA_DIR plus the LLM variables; checks get a 30 s budget.
    static ServiceOptions from_env();
};

/// Sessions persisted as one JSON-lines log each under `data_dir/sessions`.
/// Operations on one session are serialised; different sessions run independently.
class SessionStore {
public:
    explicit SessionStore(ServiceOptions options);
    /// Uses the given provider instead of building one from `options.llm`.
    SessionStore(ServiceOptions options, std::shared_ptr<LlmProvider> provider);

    std::string create_session();
    SubmitResult submit_ruleset(const std::string& id, const std::string& text);
    Session session(const std::string& id);
    Explanation request_explanation(const std::string& id, std::size_t revision, std::size_t verdict,
                                    const std::string& system_description);
    /// Applies to `revision`, or to the latest one when absent.
    SubmitResult apply_suggestion(const std::string& id, std::optional<std::size_t> revision, const Suggestion& s);
    SessionMetrics metrics(const std::string& id);

    const ServiceOptions& options() const { return options_; }

private:
    struct Entry;

    std::shared_ptr<Entry> entry(const std::string& id);
    void append(Entry& e, const Json& record);
    Revision make_revision(const std::string& text, const std::vector<Diagnostic>& diags, const CheckReport& report);
    SubmitResult record_revision(Entry& e, std::string text, std::vector<Diagnostic> diags, CheckReport report);
    const Analysis& analysis(Entry& e, std::size_t revision);

    ServiceOptions options_;
    std::filesystem::path sessions_dir_;
    std::shared_ptr<ReportCache> cache_;
    std::unique_ptr<Explainer> explainer_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Entry>> entries_;
};

Json to_json(const Session& s);
Json to_json(const SessionMetrics& m);
Json to_json(const SubmitResult& r, const CheckConfig& cfg);

/// JSON API under /api plus static files under `/`.
class HttpService {
public:
    HttpService(SessionStore& store, std::filesystem::path static_dir);
    ~HttpService();

    /// Blocks until stop() is called. Returns false when the port cannot be bound.
    bool listen(const std::string& host, int port);
    /// Binds to a free port and returns it; serve with listen_after_bind().
    int bind_any(const std::string& host);
    bool listen_after_bind();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sleec
