#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "stimrun/assets.hpp"
#include "stimrun/error.hpp"
#include "stimrun/parser.hpp"
#include "stimrun/response_log.hpp"
#include "stimrun/scheduler.hpp"
#include "stimrun/session.hpp"
#include "stimrun/text.hpp"
#include "stimrun/timing.hpp"
#include "stimrun/virtual_io.hpp"

namespace stimrun::cli {

namespace {

std::optional<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        return std::nullopt;
    }
    return buf.str();
}

// Parse + validate. Diagnostics are printed to `diag`; nullopt on errors.
struct Loaded {
    Script script;
    std::vector<Diagnostic> diagnostics;
};

std::optional<Loaded> load_script(const std::string& text, std::ostream& diag) {
    auto parsed = parse_script(decode_text(text));
    auto diags = std::move(parsed.diagnostics);
    if (parsed.script) {
        auto more = validate_script(*parsed.script);
        diags.insert(diags.end(), more.begin(), more.end());
        std::stable_sort(diags.begin(), diags.end(),
            [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    }
    for (const auto& d : diags) {
        diag << d.to_string() << '\n';
    }
    if (!parsed.script || has_errors(diags)) {
        return std::nullopt;
    }
    return Loaded{std::move(*parsed.script), std::move(diags)};
}

// Everything run and serve share: script, group, plans, assets, output.
struct Prepared {
    Script script;
    SettingsGroup group;
    std::uint64_t seed = 0;
    std::vector<RunPlan> plans;
    AssetCache assets;
    std::filesystem::path out_path;
};

struct Failure {
    int code;
};

Prepared prepare(const CliConfig& config, std::ostream& out, std::ostream& err) {
    if (config.subject.empty()) {
        err << "a subject code is required\n";
        throw Failure{exit_usage};
    }
    const auto text = read_file(config.script);
    if (!text) {
        err << "cannot read " << config.script.string() << '\n';
        throw Failure{exit_usage};
    }
    auto loaded = load_script(*text, err);
    if (!loaded) {
        throw Failure{exit_invalid_script};
    }

    Prepared p;
    p.script = std::move(loaded->script);
    if (config.group) {
        const auto* g = p.script.find_group(*config.group);
        if (!g) {
            err << "no settings group named " << *config.group << '\n';
            throw Failure{exit_usage};
        }
        p.group = *g;
    } else {
        p.group = p.script.groups.empty() ? default_group() : p.script.groups.front();
    }

    if (config.seed) {
        p.seed = *config.seed;
    } else {
        std::random_device rd;
        p.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
        out << "seed " << p.seed << '\n';
    }

    try {
        if (config.training) {
            p.plans.push_back(build_run_plan(p.script, p.group, Phase::Training, p.seed));
        }
        p.plans.push_back(build_run_plan(p.script, p.group, Phase::Test, p.seed));
        const auto refs = collect_assets(p.script, p.group, p.plans);
        DirectoryAssetSource source(config.script.parent_path());
        p.assets = preload_assets(source, refs);
    } catch (const Error& e) {
        err << e.what() << '\n';
        throw Failure{exit_runtime};
    }

    const auto default_name = default_response_file_name(config.subject, p.script.title());
    if (!config.out) {
        p.out_path = default_name;
    } else if (std::filesystem::is_directory(*config.out)) {
        p.out_path = *config.out / default_name;
    } else {
        p.out_path = *config.out;
    }
    return p;
}

// Writes rows as outcomes arrive.
class RowSink {
public:
    RowSink(const Prepared& p, const CliConfig& config)
        : prepared_(p)
        , config_(config)
        , writer_(p.out_path, p.group.response_format, config.log_training) {}

    void operator()(const TrialOutcome& outcome) {
        if (outcome.phase == Phase::Training && !config_.log_training) {
            return;
        }
        const auto* trial = prepared_.script.find_trial(outcome.trial_id);
        writer_.append(render_row(outcome, *trial, prepared_.group.response_format, config_.subject), outcome.phase);
    }

    void close() { writer_.close(); }

private:
    const Prepared& prepared_;
    const CliConfig& config_;
    ResponseWriter writer_;
};

int report_abort(const Error& e, std::ostream& err) {
    err << e.what() << '\n';
    switch (e.code()) {
    case ErrorCode::ClientLost:
        return exit_client_lost;
    case ErrorCode::Proto:
        return exit_protocol;
    default:
        return exit_runtime;
    }
}

} // namespace

int cmd_validate(const std::filesystem::path& script, std::ostream& out, std::ostream& err) {
    const auto text = read_file(script);
    if (!text) {
        err << "cannot read " << script.string() << '\n';
        return exit_usage;
    }
    return load_script(*text, out) ? exit_ok : exit_invalid_script;
}

int cmd_run(const CliConfig& config, std::ostream& out, std::ostream& err) {
    try {
        auto p = prepare(config, out, err);

        const auto schedule_text = read_file(config.schedule);
        if (!schedule_text) {
            err << "cannot read schedule " << config.schedule.string() << '\n';
            return exit_runtime;
        }
        SubjectSchedule schedule;
        try {
            schedule = SubjectSchedule::parse(*schedule_text);
        } catch (const Error& e) {
            err << e.what() << '\n';
            return exit_runtime;
        }
        for (int id : schedule.trial_ids()) {
            if (!p.script.find_trial(id)) {
                err << "schedule names TRIAL" << id << ", which the script does not define\n";
                return exit_runtime;
            }
        }

        VirtualIo io(config.latency, Timestamp{}, p.seed);
        io.set_subject(std::move(schedule));
        RowSink sink(p, config);
        bool first = true;
        for (const auto& plan : p.plans) {
            SessionOptions opts;
            opts.show_instructions = first;
            opts.on_outcome = std::ref(sink);
            first = false;
            auto result = run_session(p.script, p.group, plan, p.assets, SessionIo{io, io, io}, opts);
            if (result.aborted) {
                sink.close();
                return report_abort(*result.aborted, err);
            }
        }
        sink.close();
        out << p.out_path.string() << '\n';
        return exit_ok;
    } catch (const Failure& f) {
        return f.code;
    } catch (const Error& e) {
        return report_abort(e, err);
    }
}

int cmd_serve(const CliConfig& config, std::ostream& out, std::ostream& err,
    const std::function<void(std::uint16_t)>& on_listening) {
    try {
        auto p = prepare(config, out, err);
        const auto endpoint = net::Endpoint::parse(config.listen);
        if (!endpoint) {
            err << "bad listen endpoint " << config.listen << '\n';
            return exit_usage;
        }

        ServeOptions options;
        options.accept_timeout = config.accept_timeout;
        options.log = [&err](std::string_view line) { err << line << '\n'; };
        std::optional<SessionServer> server;
        try {
            server.emplace(*endpoint, options);
        } catch (const Error& e) {
            err << e.what() << '\n';
            return e.code() == ErrorCode::Busy ? exit_busy : exit_runtime;
        }
        err << "engine clock resolution " << measure_clock_resolution().count() << " us\n";
        if (on_listening) {
            on_listening(server->port());
        }

        RowSink sink(p, config);
        auto result = server->serve(p.script, p.group, p.plans, p.assets, std::ref(sink));
        sink.close();
        if (auto latency = server->client_output_latency_us()) {
            err << "client audio output latency " << static_cast<double>(*latency) / 1000.0 << " ms\n";
        }
        if (result.aborted) {
            err << result.outcomes.size() << " trials completed before the session ended\n";
            return report_abort(*result.aborted, err);
        }
        out << p.out_path.string() << '\n';
        return exit_ok;
    } catch (const Failure& f) {
        return f.code;
    } catch (const Error& e) {
        return report_abort(e, err);
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Experiment script engine", "stimrun"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "0.3.0");

    std::filesystem::path validate_path;
    auto* validate = app.add_subcommand("validate", "Check a script and list its diagnostics");
    validate->add_option("script,--script", validate_path, "Script file")->required();

    CliConfig config;
    std::uint64_t seed = 0;
    std::string group;
    std::string out_path;
    std::int64_t accept_ms = config.accept_timeout.count();

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--script", config.script, "Script file")->required();
        cmd->add_option("--group", group, "Settings group (default: first)");
        cmd->add_option("--subject", config.subject, "Subject code")->required();
        cmd->add_option("--seed", seed, "Seed for RANDOM trial order (default: generated)");
        cmd->add_option("--out", out_path, "Response file or directory");
        cmd->add_flag("--training", config.training, "Run TRAINING_ORDER before the test trials");
        cmd->add_flag("--log-training", config.log_training, "Write training rows with a PHASE column");
    };

    auto* run = app.add_subcommand("run", "Run a session headless against a simulated subject");
    add_common(run);
    run->add_option("--schedule", config.schedule, "Simulated subject: trial_id, response_code, latency_ms")
        ->required();
    run->add_option("--play-latency", config.latency.play_latency_ms, "Simulated sound onset latency (ms)");
    run->add_option("--display-latency", config.latency.display_latency_ms, "Simulated display latency (ms)");
    run->add_option("--poll-jitter", config.latency.input_poll_jitter_ms, "Simulated input poll jitter (ms)");

    auto* serve = app.add_subcommand("serve", "Serve a session to one presentation client");
    add_common(serve);
    serve->add_option("--listen", config.listen, "host:port to listen on")->capture_default_str();
    serve->add_option("--connect-timeout", accept_ms, "How long to wait for the client (ms)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (*validate) {
        return cmd_validate(validate_path, out, err);
    }
    if (app.get_subcommands().front()->count("--group")) {
        config.group = group;
    }
    if (app.get_subcommands().front()->count("--seed")) {
        config.seed = seed;
    }
    if (!out_path.empty()) {
        config.out = out_path;
    }
    config.accept_timeout = std::chrono::milliseconds(accept_ms);
    if (*run) {
        return cmd_run(config, out, err);
    }
    return cmd_serve(config, out, err);
}

} // namespace stimrun::cli
