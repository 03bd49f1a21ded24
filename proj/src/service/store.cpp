#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <set>

#include "sleec/service.hpp"

namespace sleec {

namespace {

std::int64_t to_ms(TimePoint t) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

TimePoint from_ms(std::int64_t ms) { return TimePoint(std::chrono::milliseconds(ms)); }

std::string iso8601(TimePoint t) {
    const std::int64_t ms = to_ms(t);
    const std::time_t secs = static_cast<std::time_t>(ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms % 1000));
    return buf;
}

bool valid_id(const std::string& id) {
    return id.size() == 32 &&
           std::all_of(id.begin(), id.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

std::string random_id() {
    std::random_device rd;
    static constexpr char hex[] = "0123456789abcdef";
    std::string id;
    for (int i = 0; i < 4; ++i) {
        std::uint32_t word = rd();
        for (int j = 0; j < 8; ++j, word >>= 4) id += hex[word & 0xF];
    }
    return id;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

void apply_record(Session& s, const Json& rec) {
    const std::string type = rec.at("type");
    if (type == "created") {
        s.created_at = from_ms(rec.at("at"));
    } else if (type == "revision") {
        Revision r;
        r.text = rec.at("text");
        r.submitted_at = from_ms(rec.at("at"));
        r.diagnostics = rec.at("diagnostics");
        r.verdicts = rec.at("verdicts");
        r.warnings = rec.at("warnings");
        r.partial = rec.at("partial");
        r.clean = rec.at("clean");
        r.signatures = rec.at("signatures").get<std::vector<std::string>>();
        if (r.clean && !s.resolved_at) s.resolved_at = r.submitted_at;
        s.revisions.push_back(std::move(r));
    } else if (type == "explanation") {
        s.explanations.push_back(
            {rec.at("revision"), rec.at("verdict"), rec.at("report"), from_ms(rec.at("at"))});
    }
}

}  // namespace

struct SessionStore::Entry {
    std::mutex mutex;
    Session session;
    std::filesystem::path file;
    std::map<std::size_t, Analysis> analyses;
};

ServiceOptions ServiceOptions::from_env() {
    ServiceOptions o;
    if (const char* dir = std::getenv("SLEEC_DATA_DIR"); dir && *dir) o.data_dir = dir;
    o.llm = LlmConfig::from_env();
    o.check.budget = std::chrono::seconds(30);
    return o;
}

SessionMetrics compute_metrics(const Session& s) {
    SessionMetrics m;
    m.revisions = s.revisions.size();
    std::optional<std::size_t> first_problem;
    std::size_t last = s.revisions.empty() ? 0 : s.revisions.size() - 1;
    for (std::size_t i = 0; i < s.revisions.size(); ++i) {
        if (s.revisions[i].clean) {
            m.iterations = i + 1;
            last = i;
            const TimePoint from = first_problem ? s.revisions[*first_problem].submitted_at : s.revisions[i].submitted_at;
            m.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(s.revisions[i].submitted_at - from);
            break;
        }
        if (!first_problem) first_problem = i;
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i <= last && i < s.revisions.size(); ++i)
        seen.insert(s.revisions[i].signatures.begin(), s.revisions[i].signatures.end());
    if (!s.revisions.empty())
        for (const auto& sig : s.revisions[last].signatures) seen.erase(sig);
    m.resolved_rules = seen.size();
    return m;
}

SessionStore::SessionStore(ServiceOptions options)
    : SessionStore(std::move(options), nullptr) {}

SessionStore::SessionStore(ServiceOptions options, std::shared_ptr<LlmProvider> provider)
    : options_(std::move(options)), sessions_dir_(options_.data_dir / "sessions"),
      cache_(std::make_shared<ReportCache>()) {
    std::filesystem::create_directories(sessions_dir_);
    if (!provider) provider = make_provider(options_.llm);
    explainer_ = std::make_unique<Explainer>(std::move(provider), cache_, options_.llm.retries);
}

std::shared_ptr<SessionStore::Entry> SessionStore::entry(const std::string& id) {
    if (!valid_id(id)) throw NotFound("no session '" + id + "'");
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(id); it != entries_.end()) return it->second;
    auto e = std::make_shared<Entry>();
    e->file = sessions_dir_ / (id + ".jsonl");
    std::ifstream in(e->file);
    if (!in) throw NotFound("no session '" + id + "'");
    e->session.id = id;
    for (std::string line; std::getline(in, line);) {
        if (blank(line)) continue;
        auto rec = Json::parse(line, nullptr, false);
        if (rec.is_discarded()) break;  // torn final write
        apply_record(e->session, rec);
    }
    entries_.emplace(id, e);
    return e;
}

void SessionStore::append(Entry& e, const Json& record) {
    std::ofstream out(e.file, std::ios::app);
    out << record.dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error("cannot write session log " + e.file.string());
}

std::string SessionStore::create_session() {
    std::string id;
    do {
        id = random_id();
    } while (std::filesystem::exists(sessions_dir_ / (id + ".jsonl")));
    auto e = std::make_shared<Entry>();
    e->file = sessions_dir_ / (id + ".jsonl");
    e->session.id = id;
    e->session.created_at = options_.clock();
    append(*e, Json{{"type", "created"}, {"id", id}, {"at", to_ms(e->session.created_at)}});
    std::lock_guard lock(mutex_);
    entries_.emplace(id, std::move(e));
    return id;
}

Revision SessionStore::make_revision(const std::string& text, const std::vector<Diagnostic>& diags,
                                     const CheckReport& report) {
    Revision r;
    r.text = text;
    r.submitted_at = options_.clock();
    r.diagnostics = diagnostics_json(diags);
    r.verdicts = verdicts_json(report.verdicts, options_.check);
    r.warnings = report.warnings;
    r.partial = report.partial;
    bool blocking = false;
    for (const auto& v : report.verdicts) {
        if (!is_blocking(v)) continue;
        blocking = true;
        std::string sig = std::string(to_string(v.kind)) + ":";
        for (std::size_t i = 0; i < v.rules.size(); ++i) sig += (i ? "," : "") + v.rules[i];
        r.signatures.push_back(sig);
    }
    r.clean = !blocking && !has_errors(diags) && !report.partial;
    return r;
}

SubmitResult SessionStore::record_revision(Entry& e, std::string text, std::vector<Diagnostic> diags,
                                           CheckReport report) {
    Revision r = make_revision(text, diags, report);
    append(e, Json{{"type", "revision"},
                   {"text", r.text},
                   {"at", to_ms(r.submitted_at)},
                   {"diagnostics", r.diagnostics},
                   {"verdicts", r.verdicts},
                   {"warnings", r.warnings},
                   {"partial", r.partial},
                   {"clean", r.clean},
                   {"signatures", r.signatures}});
    if (r.clean && !e.session.resolved_at) e.session.resolved_at = r.submitted_at;
    e.session.revisions.push_back(std::move(r));
    return {e.session.revisions.size() - 1, std::move(diags), std::move(report)};
}

const Analysis& SessionStore::analysis(Entry& e, std::size_t revision) {
    if (revision >= e.session.revisions.size()) throw NotFound("no revision " + std::to_string(revision));
    auto it = e.analyses.find(revision);
    if (it == e.analyses.end())
        it = e.analyses.emplace(revision, analyze_text(e.session.revisions[revision].text, options_.check)).first;
    return it->second;
}

SubmitResult SessionStore::submit_ruleset(const std::string& id, const std::string& text) {
    auto e = entry(id);
    std::lock_guard lock(e->mutex);
    if (blank(text)) {
        SubmitResult r;
        r.diagnostics.push_back({Severity::Error, DiagnosticCategory::Syntax, {}, "the ruleset is empty", std::nullopt});
        return r;
    }
    Analysis a = analyze_text(text, options_.check);
    auto result = record_revision(*e, text, a.diagnostics, a.report);
    e->analyses.emplace(*result.revision, std::move(a));
    return result;
}

Session SessionStore::session(const std::string& id) {
    auto e = entry(id);
    std::lock_guard lock(e->mutex);
    return e->session;
}

Explanation SessionStore::request_explanation(const std::string& id, std::size_t revision, std::size_t verdict,
                                              const std::string& system_description) {
    auto e = entry(id);
    std::lock_guard lock(e->mutex);
    const Analysis& a = analysis(*e, revision);
    if (verdict >= a.report.verdicts.size())
        throw NotFound("revision " + std::to_string(revision) + " has no verdict " + std::to_string(verdict));
    Explanation ex = explainer_->explain(a.spec, a.report.verdicts[verdict], system_description, options_.check);
    const TimePoint at = options_.clock();
    const Json report = to_json(ex.report);
    append(*e, Json{{"type", "explanation"}, {"revision", revision}, {"verdict", verdict}, {"report", report},
                    {"at", to_ms(at)}});
    e->session.explanations.push_back({revision, verdict, report, at});
    return ex;
}

SubmitResult SessionStore::apply_suggestion(const std::string& id, std::optional<std::size_t> revision,
                                            const Suggestion& s) {
    auto e = entry(id);
    std::lock_guard lock(e->mutex);
    if (e->session.revisions.empty()) throw NotFound("the session has no revision to apply a suggestion to");
    const std::size_t base = revision.value_or(e->session.revisions.size() - 1);
    const Analysis& a = analysis(*e, base);
    SuggestionOutcome out = validate_suggestion(a.spec, s, options_.check);
    if (!out.applied) {
        SubmitResult r;
        r.diagnostics = std::move(out.diagnostics);
        return r;
    }
    auto result = record_revision(*e, out.text, out.diagnostics, out.report);
    return result;
}

SessionMetrics SessionStore::metrics(const std::string& id) {
    auto e = entry(id);
    std::lock_guard lock(e->mutex);
    return compute_metrics(e->session);
}

Json to_json(const Session& s) {
    Json revisions = Json::array();
    for (std::size_t i = 0; i < s.revisions.size(); ++i) {
        const auto& r = s.revisions[i];
        revisions.push_back(Json{{"index", i},
                                 {"text", r.text},
                                 {"submitted_at", iso8601(r.submitted_at)},
                                 {"diagnostics", r.diagnostics},
                                 {"verdicts", r.verdicts},
                                 {"warnings", r.warnings},
                                 {"partial", r.partial},
                                 {"clean", r.clean}});
    }
    Json explanations = Json::array();
    for (const auto& x : s.explanations) {
        explanations.push_back(Json{{"revision", x.revision},
                                    {"verdict", x.verdict},
                                    {"report", x.report},
                                    {"requested_at", iso8601(x.requested_at)}});
    }
    return Json{{"id", s.id},
                {"created_at", iso8601(s.created_at)},
                {"revisions", std::move(revisions)},
                {"explanations", std::move(explanations)},
                {"resolved_at", s.resolved_at ? Json(iso8601(*s.resolved_at)) : Json(nullptr)}};
}

Json to_json(const SessionMetrics& m) {
    return Json{{"revisions", m.revisions},
                {"iterations", m.iterations ? Json(*m.iterations) : Json(nullptr)},
                {"elapsed", m.elapsed ? Json(static_cast<double>(m.elapsed->count()) / 1000.0) : Json(nullptr)},
                {"resolved_rules", m.resolved_rules},
                {"resolved", m.iterations.has_value()}};
}

Json to_json(const SubmitResult& r, const CheckConfig& cfg) {
    Json j = analysis_json(r.diagnostics, r.report, cfg);
    Json out{{"revision", r.revision ? Json(*r.revision) : Json(nullptr)}};
    for (auto& [k, v] : j.items()) out[k] = v;
    return out;
}

}  // namespace sleec
