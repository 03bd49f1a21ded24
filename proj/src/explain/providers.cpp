#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "sleec/explain.hpp"

namespace sleec {

namespace {

std::string env(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

std::string line_after(std::string_view text, std::string_view label) {
    auto at = text.find(label);
    if (at == std::string_view::npos) return {};
    at += label.size();
    return std::string(text.substr(at, text.find('\n', at) - at));
}

std::vector<std::string> comma_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// Offline provider. Serves `{hash}.json` from the fixture directory; without a
/// fixture it proposes removing the rules named in the prompt.
class MockProvider final : public LlmProvider {
public:
    explicit MockProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::string complete(const std::string&, const std::string& user) override {
        if (!dir_.empty()) {
            std::ifstream in(dir_ / (prompt_hash(user) + ".json"), std::ios::binary);
            if (in) {
                std::ostringstream os;
                os << in.rdbuf();
                return os.str();
            }
        }
        return generic(user);
    }

private:
    static std::string generic(const std::string& prompt) {
        const auto rules = comma_list(line_after(prompt, "Rules involved: "));
        std::string category = line_after(prompt, "Category: ");
        ExplanationReport r;
        r.redundancy = category == "redundancy";
        if (!r.redundancy && !is_conflict_category(category)) category = "deadlock";
        r.category = category;
        r.rule1 = rules.empty() ? "" : rules.front();
        if (rules.size() > 1) r.rule2 = rules[1];
        r.scenario = "The counterexample " + line_after(prompt, "## (3) Counterexample\n") +
                     " leads to a state in which the rules cannot all be followed.";
        r.justification = "The rules named above place incompatible demands on the same event.";
        r.kind = ResolutionKind::RemoveRule;
        const std::string last = rules.empty() ? "" : rules.back();
        r.suggestion1 = {last, "", "Without " + last + " the remaining rules no longer clash."};
        r.suggestion2 = {r.rule1, "", "Without " + r.rule1 + " the remaining rules no longer clash."};
        return "```json\n" + report_to_json(r) + "\n```\n";
    }

    std::filesystem::path dir_;
};

/// OpenAI-style chat completion endpoint.
class RemoteProvider final : public LlmProvider {
public:
    explicit RemoteProvider(LlmConfig cfg) : cfg_(std::move(cfg)) {
        const auto scheme_end = cfg_.endpoint.find("://");
        const auto path_at = cfg_.endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
        base_ = cfg_.endpoint.substr(0, path_at);
        path_ = path_at == std::string::npos ? "/" : cfg_.endpoint.substr(path_at);
    }

    std::string complete(const std::string& system, const std::string& user) override {
        httplib::Client client(base_);
        client.set_connection_timeout(cfg_.timeout);
        client.set_read_timeout(cfg_.timeout);
        client.set_write_timeout(cfg_.timeout);
        httplib::Headers headers;
        if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
        const nlohmann::json body{
            {"model", cfg_.model},
            {"temperature", cfg_.temperature},
            {"max_tokens", cfg_.max_tokens},
            {"messages", {{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", user}}}},
        };
        auto res = client.Post(path_, headers, body.dump(), "application/json");
        if (!res) {
            const auto err = res.error();
            const auto kind = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read
                                  ? LlmError::Kind::Timeout
                                  : LlmError::Kind::Transport;
            throw LlmError(kind, 0, "request to " + cfg_.endpoint + " failed: " + httplib::to_string(err));
        }
        if (res->status == 401 || res->status == 403)
            throw LlmError(LlmError::Kind::Auth, res->status, "provider rejected the credentials");
        if (res->status != 200)
            throw LlmError(LlmError::Kind::Transport, res->status,
                           "provider returned status " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
        auto doc = nlohmann::json::parse(res->body, nullptr, false);
        if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty())
            throw LlmError(LlmError::Kind::Transport, res->status, "unexpected provider response: " + res->body.substr(0, 200));
        const auto& content = doc["choices"][0]["message"]["content"];
        if (!content.is_string()) throw LlmError(LlmError::Kind::Transport, res->status, "provider returned no text");
        return content.get<std::string>();
    }

private:
    LlmConfig cfg_;
    std::string base_;
    std::string path_;
};

std::string call(LlmProvider& provider, const std::string& system, const std::string& user, int retries) {
    for (int attempt = 0;; ++attempt) {
        try {
            return provider.complete(system, user);
        } catch (const LlmError& e) {
            if (e.kind() == LlmError::Kind::Auth || attempt >= retries) throw;
        }
    }
}

}  // namespace

LlmConfig LlmConfig::from_env() {
    LlmConfig cfg;
    if (auto p = env("SLEEC_LLM_PROVIDER"); !p.empty()) {
        if (p == "remote") cfg.provider = Provider::Remote;
        else if (p == "mock") cfg.provider = Provider::Mock;
        else throw std::invalid_argument("SLEEC_LLM_PROVIDER must be 'remote' or 'mock', got '" + p + "'");
    }
    if (auto v = env("SLEEC_LLM_ENDPOINT"); !v.empty()) cfg.endpoint = v;
    if (auto v = env("SLEEC_LLM_MODEL"); !v.empty()) cfg.model = v;
    cfg.api_key = env("SLEEC_LLM_API_KEY");
    if (auto v = env("SLEEC_LLM_TIMEOUT_SECS"); !v.empty()) {
        char* end = nullptr;
        const long secs = std::strtol(v.c_str(), &end, 10);
        if (*end != '\0' || secs <= 0) throw std::invalid_argument("SLEEC_LLM_TIMEOUT_SECS must be a positive integer");
        cfg.timeout = std::chrono::seconds(secs);
    }
    if (auto v = env("SLEEC_LLM_FIXTURES"); !v.empty()) cfg.fixtures_dir = v;
    return cfg;
}

std::unique_ptr<LlmProvider> make_provider(const LlmConfig& cfg) {
    if (cfg.provider == LlmConfig::Provider::Mock) return std::make_unique<MockProvider>(cfg.fixtures_dir);
    return std::make_unique<RemoteProvider>(cfg);
}

std::string prompt_hash(std::string_view text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string request_explanation(const PromptBundle& bundle, LlmProvider& provider, int retries) {
    return call(provider, bundle.system_message(), bundle.text(), retries);
}

std::optional<ExplanationReport> ReportCache::find(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ReportCache::store(const std::string& key, const ExplanationReport& report) {
    std::lock_guard lock(mutex_);
    entries_.insert_or_assign(key, report);
}

std::size_t ReportCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

Explainer::Explainer(std::shared_ptr<LlmProvider> provider, std::shared_ptr<ReportCache> cache, int retries)
    : provider_(std::move(provider)), cache_(cache ? std::move(cache) : std::make_shared<ReportCache>()),
      retries_(retries) {}

Explanation Explainer::explain(const Spec& spec, const Verdict& verdict, std::string_view system_description,
                               const CheckConfig& cfg) {
    const PromptBundle bundle = build_prompt(spec, verdict, system_description, cfg);
    const std::string user = bundle.text();
    const std::string key = prompt_hash(user);
    Explanation out;
    out.warnings = bundle.warnings;
    if (auto hit = cache_->find(key)) {
        out.report = *hit;
        out.cached = true;
        return out;
    }
    auto attempt = [&](const std::string& message) {
        ++out.attempts;
        ExplanationReport r = parse_report(call(*provider_, bundle.system_message(), message, retries_));
        check_references(r, spec);
        return r;
    };
    try {
        out.report = attempt(user);
    } catch (const ReportError& e) {
        out.warnings.push_back(std::string("first answer rejected: ") + e.what());
        out.report = attempt(user + "\n\nYour previous answer was rejected: " + e.what() +
                             "\nReply again with one JSON object that follows the template exactly.\n");
    }
    cache_->store(key, out.report);
    return out;
}

}  // namespace sleec
