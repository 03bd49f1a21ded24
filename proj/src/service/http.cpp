#include <httplib.h>

#include "sleec/service.hpp"

namespace sleec {

namespace {

void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message, const std::string& category = {}) {
    Json body{{"error", message}};
    if (!category.empty()) body["category"] = category;
    reply(res, status, body);
}

std::string_view llm_category(LlmError::Kind k) {
    switch (k) {
        case LlmError::Kind::Transport: return "transport";
        case LlmError::Kind::Timeout: return "timeout";
        case LlmError::Kind::Auth: return "auth";
    }
    return "transport";
}

std::string_view report_category(ReportError::Kind k) {
    switch (k) {
        case ReportError::Kind::Format: return "format";
        case ReportError::Kind::Enumeration: return "enumeration";
        case ReportError::Kind::Reference: return "reference";
    }
    return "format";
}

Json body_object(const httplib::Request& req, bool allow_empty) {
    if (allow_empty && req.body.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
    auto j = Json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw BadRequest("request body must be a JSON object");
    return j;
}

std::size_t index_field(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_unsigned()) throw BadRequest(std::string("\"") + key + "\" must be a non-negative integer");
    return it->get<std::size_t>();
}

/// Runs `fn`, mapping the store's exceptions onto HTTP statuses.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const NotFound& e) {
            fail(res, 404, e.what());
        } catch (const BadRequest& e) {
            fail(res, 400, e.what());
        } catch (const std::invalid_argument& e) {
            fail(res, 400, e.what());
        } catch (const LlmError& e) {
            Json body{{"error", e.what()}, {"category", std::string(llm_category(e.kind()))}};
            if (e.status()) body["status"] = e.status();
            reply(res, 502, body);
        } catch (const ReportError& e) {
            fail(res, 502, e.what(), std::string(report_category(e.kind())));
        } catch (const std::exception& e) {
            fail(res, 500, e.what());
        }
    };
}

}  // namespace

struct HttpService::Impl {
    httplib::Server server;
};

HttpService::HttpService(SessionStore& store, std::filesystem::path static_dir) : impl_(std::make_unique<Impl>()) {
    auto& srv = impl_->server;
    SessionStore* s = &store;
    const CheckConfig cfg = store.options().check;

    srv.Get("/api/health", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, Json{{"status", "ok"}}); });

    srv.Post("/api/sessions", guarded([s](const httplib::Request&, httplib::Response& res) {
                 reply(res, 201, Json{{"id", s->create_session()}});
             }));

    srv.Get(R"(/api/sessions/([0-9A-Za-z]+))", guarded([s](const httplib::Request& req, httplib::Response& res) {
                reply(res, 200, to_json(s->session(req.matches[1])));
            }));

    srv.Post(R"(/api/sessions/([0-9A-Za-z]+)/ruleset)",
             guarded([s, cfg](const httplib::Request& req, httplib::Response& res) {
                 const Json body = body_object(req, true);
                 std::string text;
                 if (auto it = body.find("text"); it != body.end()) {
                     if (!it->is_string()) throw BadRequest("\"text\" must be a string");
                     text = it->get<std::string>();
                 }
                 reply(res, 200, to_json(s->submit_ruleset(req.matches[1], text), cfg));
             }));

    srv.Post(R"(/api/sessions/([0-9A-Za-z]+)/explain)",
             guarded([s](const httplib::Request& req, httplib::Response& res) {
                 const Json body = body_object(req, false);
                 std::string description;
                 if (auto it = body.find("system_description"); it != body.end() && !it->is_null()) {
                     if (!it->is_string()) throw BadRequest("\"system_description\" must be a string");
                     description = it->get<std::string>();
                 }
                 Explanation ex = s->request_explanation(req.matches[1], index_field(body, "revision"),
                                                         index_field(body, "verdict"), description);
                 res.set_header("X-Sleec-Cache", ex.cached ? "hit" : "miss");
                 for (const auto& w : ex.warnings) res.set_header("X-Sleec-Warning", w);
                 reply(res, 200, to_json(ex.report));
             }));

    srv.Post(R"(/api/sessions/([0-9A-Za-z]+)/apply)",
             guarded([s, cfg](const httplib::Request& req, httplib::Response& res) {
                 const Json body = body_object(req, false);
                 std::optional<std::size_t> revision;
                 if (body.contains("revision") && !body["revision"].is_null()) revision = index_field(body, "revision");
                 reply(res, 200, to_json(s->apply_suggestion(req.matches[1], revision, suggestion_from_json(body)), cfg));
             }));

    srv.Get(R"(/api/sessions/([0-9A-Za-z]+)/metrics)",
            guarded([s](const httplib::Request& req, httplib::Response& res) {
                reply(res, 200, to_json(s->metrics(req.matches[1])));
            }));

    if (!static_dir.empty() && std::filesystem::is_directory(static_dir)) srv.set_mount_point("/", static_dir.string());
}

HttpService::~HttpService() = default;

bool HttpService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpService::bind_any(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpService::stop() { impl_->server.stop(); }

}  // namespace sleec
