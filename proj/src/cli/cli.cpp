#include "cli.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sleec/json_io.hpp"
#include "sleec/service.hpp"

namespace sleec::cli {

namespace {

struct CheckFlags {
    bool json = false;
    int horizon = CheckConfig{}.horizon_ticks;
    int max_env = CheckConfig{}.max_env_events_per_instant;
    bool no_elide = false;

    CheckConfig config() const {
        CheckConfig c;
        c.horizon_ticks = horizon;
        c.max_env_events_per_instant = max_env;
        c.elide_tocks = !no_elide;
        return c;
    }
};

void add_check_flags(CLI::App* cmd, CheckFlags& f) {
    cmd->add_flag("--json", f.json, "Emit one JSON document on stdout");
    cmd->add_option("--horizon", f.horizon, "Exploration horizon in ticks")->check(CLI::PositiveNumber);
    cmd->add_option("--max-env-events", f.max_env, "Trigger events the environment may fire per instant")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--no-elide-tocks", f.no_elide, "Print every tock in traces");
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return os.str();
}

void print_diagnostics(std::ostream& os, const std::string& path, const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags) {
        os << path << ':' << d.span.line << ':' << d.span.col << ": " << to_string(d.severity) << " ["
           << to_string(d.category) << "] " << d.message << '\n';
    }
}

void print_report(std::ostream& os, const CheckReport& report, const CheckConfig& cfg) {
    for (std::size_t i = 0; i < report.verdicts.size(); ++i) {
        const Verdict& v = report.verdicts[i];
        os << '[' << i << "] " << to_string(v.kind) << ": ";
        for (std::size_t j = 0; j < v.rules.size(); ++j) os << (j ? ", " : "") << v.rules[j];
        os << '\n';
        if (v.trace) os << "    trace: " << format_trace(*v.trace, cfg) << '\n';
        os << "    " << v.message << '\n';
    }
    for (const auto& w : report.warnings) os << "warning: " << w << '\n';
    if (report.partial) os << "warning: time budget exhausted; results are partial\n";
}

int exit_for(const Analysis& a) {
    if (has_errors(a.diagnostics)) return kInvalid;
    for (const auto& v : a.report.verdicts)
        if (is_blocking(v)) return kConflicts;
    return kOk;
}

int cmd_check(const std::string& path, const CheckFlags& f, std::ostream& out, std::ostream& err) {
    auto text = read_file(path);
    if (!text) {
        err << "sleec: cannot read '" << path << "'\n";
        return kNoInput;
    }
    const CheckConfig cfg = f.config();
    const Analysis a = analyze_text(*text, cfg);
    if (f.json) {
        out << analysis_json(a.diagnostics, a.report, cfg).dump(2) << '\n';
    } else {
        print_diagnostics(out, path, a.diagnostics);
        print_report(out, a.report, cfg);
        if (a.checked && a.report.verdicts.empty()) out << "no conflicts found\n";
    }
    return exit_for(a);
}

struct ExplainFlags {
    CheckFlags check;
    bool mock = false;
    std::size_t verdict = 0;
    std::string description_file;
    bool print_prompt = false;
};

int cmd_explain(const std::string& path, const ExplainFlags& f, std::ostream& out, std::ostream& err) {
    auto text = read_file(path);
    if (!text) {
        err << "sleec: cannot read '" << path << "'\n";
        return kNoInput;
    }
    std::string description;
    if (!f.description_file.empty()) {
        auto d = read_file(f.description_file);
        if (!d) {
            err << "sleec: cannot read '" << f.description_file << "'\n";
            return kNoInput;
        }
        description = *d;
    }
    const CheckConfig cfg = f.check.config();
    const Analysis a = analyze_text(*text, cfg);
    print_diagnostics(err, path, a.diagnostics);
    if (a.report.verdicts.empty()) {
        if (has_errors(a.diagnostics)) return kInvalid;
        out << "nothing to explain\n";
        return kOk;
    }
    if (f.verdict >= a.report.verdicts.size()) {
        err << "sleec: --verdict " << f.verdict << " is out of range; there are " << a.report.verdicts.size()
            << " verdicts\n";
        return kBadIndex;
    }
    const Verdict& v = a.report.verdicts[f.verdict];
    if (f.print_prompt) {
        const PromptBundle b = build_prompt(a.spec, v, description, cfg);
        for (const auto& w : b.warnings) err << "warning: " << w << '\n';
        out << b.text();
        err << "prompt hash: " << prompt_hash(b.text()) << '\n';
        return kOk;
    }
    LlmConfig llm = LlmConfig::from_env();
    if (f.mock) llm.provider = LlmConfig::Provider::Mock;
    Explainer explainer(make_provider(llm), nullptr, llm.retries);
    try {
        const Explanation ex = explainer.explain(a.spec, v, description, cfg);
        for (const auto& w : ex.warnings) err << "warning: " << w << '\n';
        out << report_to_json(ex.report) << '\n';
        return kOk;
    } catch (const LlmError& e) {
        err << "sleec: " << e.what() << '\n';
        return kUnavailable;
    } catch (const ReportError& e) {
        err << "sleec: the model's answer was rejected: " << e.what() << '\n';
        return kBadReport;
    }
}

int cmd_fmt(const std::string& path, bool check, bool in_place, std::ostream& out, std::ostream& err) {
    auto text = read_file(path);
    if (!text) {
        err << "sleec: cannot read '" << path << "'\n";
        return kNoInput;
    }
    auto parsed = parse(*text);
    if (!parsed.ok()) {
        print_diagnostics(err, path, parsed.diagnostics);
        return kInvalid;
    }
    const std::string formatted = format(parsed.spec);
    if (check) {
        if (formatted == *text) return kOk;
        err << path << " is not canonically formatted\n";
        return kConflicts;
    }
    if (in_place) {
        if (formatted == *text) return kOk;
        std::ofstream o(path, std::ios::binary | std::ios::trunc);
        o << formatted;
        if (!o) {
            err << "sleec: cannot write '" << path << "'\n";
            return kNoInput;
        }
        return kOk;
    }
    out << formatted;
    return kOk;
}

struct ServeFlags {
    int port = 8080;
    std::string host = "127.0.0.1";
    std::string data_dir;
    std::string static_dir;
    bool mock = false;
};

int cmd_serve(const ServeFlags& f, std::ostream& err) {
    // Route SIGINT/SIGTERM to a dedicated waiter; server threads inherit the mask.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    ServiceOptions opts = ServiceOptions::from_env();
    if (!f.data_dir.empty()) opts.data_dir = f.data_dir;
    if (f.mock) opts.llm.provider = LlmConfig::Provider::Mock;
    SessionStore store(opts);
    HttpService http(store, f.static_dir);

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        http.stop();
    });
    err << "sleec: serving on http://" << f.host << ':' << f.port << '\n';
    const bool ok = http.listen(f.host, f.port);
    if (!ok) {
        err << "sleec: cannot listen on " << f.host << ':' << f.port << '\n';
        pthread_kill(waiter.native_handle(), SIGTERM);
    }
    waiter.join();
    err << "sleec: stopped\n";
    return ok ? kOk : kUnavailable;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Check, explain and format SLEEC rulesets", "sleec"};
    app.require_subcommand(1);

    std::string path;
    CheckFlags check_flags;
    auto* check = app.add_subcommand("check", "Report conflicts, naming errors and redundancies");
    check->add_option("path", path, "Ruleset file")->required();
    add_check_flags(check, check_flags);

    ExplainFlags explain_flags;
    auto* explain = app.add_subcommand("explain", "Explain one verdict and suggest resolutions");
    explain->add_option("path", path, "Ruleset file")->required();
    add_check_flags(explain, explain_flags.check);
    explain->add_flag("--mock", explain_flags.mock, "Use the offline mock provider");
    explain->add_option("--verdict", explain_flags.verdict, "Index of the verdict to explain");
    explain->add_option("--system-description", explain_flags.description_file, "File describing the system");
    explain->add_flag("--print-prompt", explain_flags.print_prompt, "Print the prompt instead of calling a provider");

    bool fmt_check = false, fmt_in_place = false;
    auto* fmt = app.add_subcommand("fmt", "Print the canonical form of a ruleset");
    fmt->add_option("path", path, "Ruleset file")->required();
    fmt->add_flag("--check", fmt_check, "Exit 1 when the file is not canonical");
    fmt->add_flag("-i,--in-place", fmt_in_place, "Rewrite the file");

    ServeFlags serve_flags;
    if (const char* p = std::getenv("SLEEC_PORT"); p && *p) serve_flags.port = std::atoi(p);
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--port", serve_flags.port, "TCP port (SLEEC_PORT)")->check(CLI::Range(0, 65535));
    serve->add_option("--host", serve_flags.host, "Address to bind");
    serve->add_option("--data-dir", serve_flags.data_dir, "Session storage (SLEEC_DATA_DIR)");
    serve->add_option("--static-dir", serve_flags.static_dir, "Files served under /");
    serve->add_flag("--mock", serve_flags.mock, "Use the offline mock provider");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*check) return cmd_check(path, check_flags, out, err);
        if (*explain) return cmd_explain(path, explain_flags, out, err);
        if (*fmt) return cmd_fmt(path, fmt_check, fmt_in_place, out, err);
        if (*serve) {
            if (serve_flags.static_dir.empty()) {
                if (const char* d = std::getenv("SLEEC_STATIC_DIR"); d && *d) serve_flags.static_dir = d;
            }
            return cmd_serve(serve_flags, err);
        }
    } catch (const std::exception& e) {
        err << "sleec: " << e.what() << '\n';
        return kUnavailable;
    }
    return kOk;
}

}  // namespace sleec::cli
