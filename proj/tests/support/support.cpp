#include "support.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <unistd.h>

#include "stimrun/response_log.hpp"

#ifndef STIMRUN_TEST_DATA_DIR
#error "STIMRUN_TEST_DATA_DIR must be defined"
#endif

namespace stimrun::test {

std::filesystem::path data_path(const std::string& relative) {
    return std::filesystem::path(STIMRUN_TEST_DATA_DIR) / relative;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    return {text.begin(), text.end()};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path()
        / ("stimrun-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

Script parse_ok(const std::string& text) {
    auto result = parse_script(text);
    if (!result.script) {
        std::string all;
        for (const auto& d : result.diagnostics) {
            all += d.to_string() + "\n";
        }
        throw std::runtime_error("script has errors:\n" + all);
    }
    return std::move(*result.script);
}

PcmAudio tone(std::uint32_t rate, std::int64_t frames, int channels) {
    PcmAudio a;
    a.sample_rate = rate;
    a.channels = channels;
    a.samples.reserve(static_cast<std::size_t>(frames * channels));
    for (std::int64_t i = 0; i < frames; ++i) {
        const auto v = static_cast<std::int16_t>(
            std::lround(12000.0 * std::sin(2.0 * std::numbers::pi * 440.0 * static_cast<double>(i) / rate)));
        for (int c = 0; c < channels; ++c) {
            a.samples.push_back(v);
        }
    }
    return a;
}

double oracle_gain(double db) {
    using Dec = boost::multiprecision::cpp_dec_float_50;
    const Dec exponent = Dec(db) / Dec(20);
    return static_cast<double>(boost::multiprecision::pow(Dec(10), exponent));
}

std::int64_t oracle_frames_at(std::uint32_t rate, std::int64_t t_us) {
    // Frame k starts at k / rate seconds; count frames whose start time is
    // reached, i.e. k * 1e6 <= rate * t_us, by stepping through them.
    const __int128 limit = static_cast<__int128>(rate) * t_us;
    std::int64_t k = 0;
    __int128 at = 1'000'000;
    while (at <= limit) {
        ++k;
        at += 1'000'000;
    }
    return k;
}

SessionFixture load_fixture(const std::filesystem::path& script_path, std::uint64_t seed, bool training) {
    SessionFixture f;
    f.script = parse_ok(read_text_file(script_path));
    f.group = f.script.groups.empty() ? default_group() : f.script.groups.front();
    if (training) {
        f.plans.push_back(build_run_plan(f.script, f.group, Phase::Training, seed));
    }
    f.plans.push_back(build_run_plan(f.script, f.group, Phase::Test, seed));
    DirectoryAssetSource source(script_path.parent_path());
    const auto refs = collect_assets(f.script, f.group, f.plans);
    f.assets = preload_assets(source, refs);
    return f;
}

namespace {

std::string render_tsv(const SessionFixture& f, const std::vector<TrialOutcome>& outcomes) {
    TempDir dir;
    const auto path = dir / "out.tsv";
    {
        ResponseWriter writer(path, f.group.response_format, f.log_training);
        for (const auto& o : outcomes) {
            if (o.phase == Phase::Training && !f.log_training) {
                continue;
            }
            writer.append(render_row(o, *f.script.find_trial(o.trial_id), f.group.response_format, f.subject),
                o.phase);
        }
    }
    return read_text_file(path);
}

} // namespace

std::string run_headless_tsv(const SessionFixture& f, const SubjectSchedule& schedule, LatencyProfile latency,
    std::vector<TrialOutcome>* outcomes) {
    VirtualIo io(latency);
    io.set_subject(schedule);
    std::vector<TrialOutcome> all;
    bool first = true;
    for (const auto& plan : f.plans) {
        SessionOptions opts;
        opts.show_instructions = first;
        first = false;
        auto result = run_session(f.script, f.group, plan, f.assets, SessionIo{io, io, io}, opts);
        if (result.aborted) {
            throw *result.aborted;
        }
        all.insert(all.end(), result.outcomes.begin(), result.outcomes.end());
    }
    if (outcomes) {
        *outcomes = all;
    }
    return render_tsv(f, all);
}

WireRun run_wire_tsv(const SessionFixture& f, const SimulatedClientOptions& client, ServeOptions serve) {
    SessionServer server(net::Endpoint{"127.0.0.1", 0}, serve);
    const net::Endpoint endpoint{"127.0.0.1", server.port()};
    WireRun run;
    std::exception_ptr client_error;
    std::thread client_thread([&] {
        try {
            run.client = run_simulated_client(endpoint, client);
        } catch (...) {
            client_error = std::current_exception();
        }
    });
    run.result = server.serve(f.script, f.group, f.plans, f.assets);
    client_thread.join();
    if (client_error) {
        std::rethrow_exception(client_error);
    }
    run.tsv = render_tsv(f, run.result.outcomes);
    return run;
}

SubjectSchedule golden_schedule() {
    return SubjectSchedule::parse(read_text_file(data_path("minimal_pairs/schedule.txt")));
}

} // namespace stimrun::test
