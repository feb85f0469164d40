#include "stimrun/session.hpp"

#include <sys/socket.h>
#include <sys/time.h>

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include "stimrun/error.hpp"
#include "stimrun/parser.hpp"
#include "stimrun/text.hpp"

namespace stimrun {

namespace {

using EngineClock = std::chrono::steady_clock;

struct OnsetRecord {
    Timestamp client_ts;
    EngineClock::time_point arrival;
};

struct QueuedInput {
    InputEvent event;
    EngineClock::time_point arrival;
};

// Presentation client behind a frame channel, seen as the engine's io ports.
// A receive thread files Onset echoes by cue and keeps Input events ordered
// by client timestamp. All presentation time is client time.
class WireIo final : public Clock, public StimulusPort, public InputPort {
public:
    WireIo(net::FrameChannel& channel, std::chrono::milliseconds onset_grace, std::chrono::milliseconds slack)
        : channel_(channel)
        , onset_grace_(onset_grace)
        , slack_(slack) {
        receiver_ = std::thread([this] { receive_loop(); });
    }

    ~WireIo() override { stop(); }

    void stop() {
        channel_.shutdown();
        if (receiver_.joinable()) {
            receiver_.join();
        }
    }

    void send(const wire::Message& msg) {
        channel_.send(encode_message(msg));
    }

    /// Blocks for the client's Ready. Throws on timeout, loss or refusal.
    int wait_ready(std::chrono::milliseconds timeout) {
        std::unique_lock lock(mutex_);
        const bool done = cv_.wait_for(lock, timeout, [this] { return ready_version_ || failure_; });
        if (!done) {
            throw Error(ErrorCode::ClientLost, "client did not finish preloading in time");
        }
        throw_if_failed();
        return *ready_version_;
    }

    /// Waits up to `timeout` for Bye or a disconnect.
    void wait_bye(std::chrono::milliseconds timeout) {
        std::unique_lock lock(mutex_);
        cv_.wait_for(lock, timeout, [this] { return bye_ || failure_; });
    }

    std::optional<std::int64_t> output_latency_us() {
        std::lock_guard lock(mutex_);
        return output_latency_us_;
    }

    Timestamp now() override {
        const auto cue = next_cue_++;
        send(wire::Mark{cue});
        return await_onset(cue);
    }

    void pause(Duration d) override {
        if (d.count() > 0) {
            std::this_thread::sleep_for(d);
        }
    }

    void begin_instructions() override { send(wire::TrialStart{0, Phase::Test}); }
    void begin_trial(int trial_id, Phase phase) override { send(wire::TrialStart{trial_id, phase}); }
    void end_trial() override { send(wire::TrialEnd{}); }

    Timestamp show_text(std::string_view text, const TextFormat& format) override {
        const auto cue = next_cue_++;
        send(wire::PresentText{cue, std::string(text), format});
        return await_onset(cue);
    }

    Timestamp show_image(const Stimulus& image) override {
        const auto cue = next_cue_++;
        send(wire::PresentImage{cue, image.id.value});
        return await_onset(cue);
    }

    Timestamp play_sound(const Stimulus& sound, double gain, SampleRange range) override {
        const auto cue = next_cue_++;
        send(wire::Play{cue, sound.id.value, gain, range.first, range.last});
        return await_onset(cue);
    }

    void open_window(int window_id, std::optional<Duration> delay) override {
        window_ = window_id;
        std::optional<std::int64_t> delay_ms;
        if (delay) {
            delay_ms = (delay->count() + 999) / 1000;
        }
        send(wire::OpenWindow{window_id, delay_ms});
    }

    void close_window() override { send(wire::CloseWindow{window_}); }

    std::optional<InputEvent> next_input(std::optional<Timestamp> not_after) override {
        std::unique_lock lock(mutex_);
        std::optional<EngineClock::time_point> give_up;
        if (not_after) {
            // Map the client-clock deadline onto engine time through the
            // arrival of the last onset echo.
            const auto remaining = *not_after - last_onset_.client_ts;
            give_up = last_onset_.arrival + std::max(remaining, Duration(0)) + slack_;
        }
        for (;;) {
            if (!inputs_.empty()) {
                const auto& front = inputs_.front();
                if (not_after && front.event.ts > *not_after) {
                    return std::nullopt; // stamps are monotonic, nothing earlier can follow
                }
                auto event = std::move(inputs_.front().event);
                inputs_.pop_front();
                return event;
            }
            throw_if_failed();
            if (give_up) {
                if (cv_.wait_until(lock, *give_up) == std::cv_status::timeout && inputs_.empty() && !failure_) {
                    return std::nullopt;
                }
            } else {
                cv_.wait(lock);
            }
        }
    }

private:
    Timestamp await_onset(std::uint32_t cue) {
        std::unique_lock lock(mutex_);
        const bool arrived = cv_.wait_for(lock, onset_grace_, [&] { return onsets_.count(cue) || failure_; });
        if (auto it = onsets_.find(cue); it != onsets_.end()) {
            last_onset_ = it->second;
            onsets_.erase(it);
            return last_onset_.client_ts;
        }
        throw_if_failed();
        if (!arrived) {
            throw Error(ErrorCode::ClientLost, "no onset reported for cue " + std::to_string(cue));
        }
        throw Error(ErrorCode::ClientLost, "client gone");
    }

    void throw_if_failed() {
        if (failure_) {
            throw *failure_;
        }
    }

    void fail(Error e) {
        std::lock_guard lock(mutex_);
        if (!failure_) {
            failure_ = std::move(e);
        }
        cv_.notify_all();
    }

    void receive_loop() {
        try {
            while (auto frame = channel_.receive()) {
                dispatch(wire::decode_message(*frame));
            }
            fail(Error(ErrorCode::ClientLost, bye_ ? "client closed the session" : "client disconnected"));
        } catch (const Error& e) {
            fail(e.code() == ErrorCode::Proto ? e : Error(ErrorCode::ClientLost, e.what()));
        }
    }

    void dispatch(wire::Message msg) {
        const auto arrival = EngineClock::now();
        std::lock_guard lock(mutex_);
        if (const auto* onset = std::get_if<wire::Onset>(&msg)) {
            onsets_[onset->cue] = OnsetRecord{Timestamp::from_us(onset->client_ts), arrival};
        } else if (auto* input = std::get_if<wire::Input>(&msg)) {
            QueuedInput q{InputEvent{input->device, std::move(input->code), Timestamp::from_us(input->client_ts)},
                arrival};
            auto pos = std::upper_bound(inputs_.begin(), inputs_.end(), q.event.ts,
                [](Timestamp ts, const QueuedInput& e) { return ts < e.event.ts; });
            inputs_.insert(pos, std::move(q));
        } else if (const auto* ready = std::get_if<wire::Ready>(&msg)) {
            ready_version_ = ready->version;
        } else if (std::holds_alternative<wire::Bye>(msg)) {
            bye_ = true;
        } else if (const auto* fault = std::get_if<wire::Fault>(&msg)) {
            if (!failure_) {
                failure_ = Error(ErrorCode::Proto, "client fault " + fault->code + ": " + fault->detail);
            }
        } else if (const auto* cal = std::get_if<wire::Calibration>(&msg)) {
            output_latency_us_ = cal->output_latency_us;
        } else if (!failure_) {
            failure_ = Error(ErrorCode::Proto, "unexpected " + std::string(wire::message_type(msg)) + " from client");
        }
        cv_.notify_all();
    }

    net::FrameChannel& channel_;
    std::chrono::milliseconds onset_grace_;
    std::chrono::milliseconds slack_;
    std::thread receiver_;
    std::uint32_t next_cue_ = 1;
    int window_ = 0;

    std::mutex mutex_;
    std::condition_variable cv_;
    std::map<std::uint32_t, OnsetRecord> onsets_;
    std::deque<QueuedInput> inputs_;
    OnsetRecord last_onset_{Timestamp{}, EngineClock::now()};
    std::optional<int> ready_version_;
    std::optional<std::int64_t> output_latency_us_;
    bool bye_ = false;
    std::optional<Error> failure_;
};

std::chrono::milliseconds longest_window(const Script& script, std::span<const RunPlan> plans) {
    std::int64_t longest_us = 0;
    for (const auto& plan : plans) {
        for (int id : plan.trial_ids) {
            const auto* trial = script.find_trial(id);
            if (!trial) {
                continue;
            }
            for (const auto& step : script.events) {
                const auto* get = std::get_if<step::GetInput>(&step.command);
                if (!get || !get->delay) {
                    continue;
                }
                if (auto us = parse_millis_as_micros(resolve_arg(*get->delay, *trial))) {
                    longest_us = std::max(longest_us, *us);
                }
            }
        }
    }
    return std::chrono::milliseconds((longest_us + 999) / 1000);
}

void set_receive_timeout(const net::Socket& socket, std::chrono::milliseconds timeout) {
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
    ::setsockopt(socket.fd(), SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

} // namespace

SessionServer::SessionServer(const net::Endpoint& endpoint, ServeOptions options)
    : listener_(endpoint)
    , options_(std::move(options)) {}

SessionServer::~SessionServer() {
    serving_ = false;
    listener_.close();
}

void SessionServer::refuse_loop() {
    while (serving_) {
        auto socket = listener_.accept(std::chrono::milliseconds(50));
        if (!socket) {
            continue;
        }
        try {
            set_receive_timeout(*socket, std::chrono::milliseconds(1000));
            auto channel = net::FrameChannel::accept(std::move(*socket));
            channel.send(wire::encode_message(wire::Refuse{"busy"}));
            channel.shutdown();
        } catch (const Error&) {
        }
        ++refused_;
        if (options_.log) {
            options_.log("refused a second client");
        }
    }
}

SessionResult SessionServer::serve(const Script& script, const SettingsGroup& group, std::span<const RunPlan> plans,
    const AssetCache& assets, OutcomeSink on_outcome) {
    SessionResult result;
    auto log = [this](const std::string& line) {
        if (options_.log) {
            options_.log(line);
        }
    };

    log("listening on port " + std::to_string(port()));
    auto socket = listener_.accept(options_.accept_timeout);
    if (!socket) {
        result.aborted = Error(ErrorCode::ClientLost, "no client connected within "
                + std::to_string(options_.accept_timeout.count()) + " ms");
        return result;
    }

    std::optional<net::FrameChannel> channel;
    try {
        set_receive_timeout(*socket, options_.handshake_timeout);
        channel.emplace(net::FrameChannel::accept(std::move(*socket)));
        channel->set_receive_timeout(std::chrono::milliseconds(0));
    } catch (const Error& e) {
        result.aborted = e.code() == ErrorCode::Proto ? e : Error(ErrorCode::ClientLost, e.what());
        return result;
    }
    log(channel->mode() == net::FrameChannel::Mode::WebSocket ? "client connected (websocket)"
                                                               : "client connected");

    serving_ = true;
    std::thread refuser([this] { refuse_loop(); });
    struct StopRefuser {
        std::atomic<bool>& flag;
        std::thread& thread;
        ~StopRefuser() {
            flag = false;
            thread.join();
        }
    } stop_refuser{serving_, refuser};

    const auto grace = std::max(options_.min_onset_grace, 2 * longest_window(script, plans));
    WireIo io(*channel, grace, options_.transport_slack);
    try {
        const auto& all = assets.all();
        io.send(wire::Hello{wire::protocol_version, static_cast<std::uint32_t>(all.size())});
        for (const auto& s : all) {
            io.send(wire::Preload{s->id.value, s->kind, s->name, s->bytes});
        }
        const int version = io.wait_ready(options_.handshake_timeout);
        if (version != wire::protocol_version) {
            io.send(wire::Refuse{"protocol version " + std::to_string(version) + " not supported"});
            throw Error(ErrorCode::Proto, "client speaks protocol version " + std::to_string(version) + ", engine "
                    + std::to_string(wire::protocol_version));
        }
    } catch (const Error& e) {
        result.aborted = e;
        io.stop();
        return result;
    }
    log("client ready, " + std::to_string(assets.all().size()) + " assets preloaded");

    SessionIo session_io{io, io, io};
    bool first = true;
    for (const auto& plan : plans) {
        SessionOptions opts;
        opts.show_instructions = first;
        opts.on_outcome = on_outcome;
        first = false;
        auto part = run_session(script, group, plan, assets, session_io, opts);
        for (auto& o : part.outcomes) {
            result.outcomes.push_back(std::move(o));
        }
        if (part.aborted) {
            result.aborted = std::move(part.aborted);
            break;
        }
    }

    if (!result.aborted || result.aborted->code() != ErrorCode::ClientLost) {
        try {
            io.send(wire::SessionEnd{result.aborted ? std::string(error_code_name(result.aborted->code())) : "done"});
            io.wait_bye(std::chrono::milliseconds(2000));
        } catch (const Error&) {
        }
    }
    output_latency_us_ = io.output_latency_us();
    io.stop();
    return result;
}

SimulatedClientReport run_simulated_client(const net::Endpoint& endpoint, const SimulatedClientOptions& options) {
    SimulatedClientReport report;
    auto channel = net::FrameChannel::connect(net::connect_to(endpoint), options.mode, endpoint.host);
    auto send = [&](const wire::Message& msg) { channel.send(wire::encode_message(msg)); };

    Timestamp now = Timestamp{} + options.clock_origin;
    Timestamp last_onset = now;
    std::optional<InputEvent> armed;
    int trial = 0;
    bool instructions = false;
    bool responded = false;

    auto present = [&](std::uint32_t cue, double latency_ms, bool arms) {
        now += millis_to_duration(latency_ms);
        last_onset = now;
        if (arms && !responded) {
            if (instructions) {
                armed = InputEvent{InputDevice::Keyboard, std::string(VirtualIo::ack_key), now};
            } else if (const auto* r = options.schedule.find(trial); r && r->key) {
                armed = input_for_key(*r->key, now + r->latency);
            }
        }
        send(wire::Onset{cue, now.us()});
    };

    while (auto frame = channel.receive()) {
        auto msg = wire::decode_message(*frame);
        report.message_types.emplace_back(wire::message_type(msg));
        if (const auto* hello = std::get_if<wire::Hello>(&msg)) {
            if (options.report_latency_us) {
                send(wire::Calibration{*options.report_latency_us});
            }
            while (report.assets_received < hello->asset_count) {
                auto next = channel.receive();
                if (!next) {
                    return report;
                }
                auto preload = wire::decode_message(*next);
                report.message_types.emplace_back(wire::message_type(preload));
                if (!std::holds_alternative<wire::Preload>(preload)) {
                    throw Error(ErrorCode::Proto, "expected Preload");
                }
                ++report.assets_received;
            }
            send(wire::Ready{options.version});
        } else if (const auto* start = std::get_if<wire::TrialStart>(&msg)) {
            trial = start->trial;
            instructions = start->trial == 0;
            responded = false;
            armed.reset();
            if (!instructions) {
                ++report.trials_started;
                if (options.disconnect_at_trial && report.trials_started == *options.disconnect_at_trial) {
                    channel.shutdown();
                    return report;
                }
            }
        } else if (std::holds_alternative<wire::TrialEnd>(msg)) {
            armed.reset();
            responded = true;
        } else if (const auto* text = std::get_if<wire::PresentText>(&msg)) {
            present(text->cue, options.latency.display_latency_ms, true);
        } else if (const auto* image = std::get_if<wire::PresentImage>(&msg)) {
            present(image->cue, options.latency.display_latency_ms, true);
        } else if (const auto* play = std::get_if<wire::Play>(&msg)) {
            report.plays.push_back(*play);
            present(play->cue, options.latency.play_latency_ms, true);
        } else if (const auto* mark = std::get_if<wire::Mark>(&msg)) {
            send(wire::Onset{mark->cue, now.us()});
            last_onset = now;
        } else if (const auto* open = std::get_if<wire::OpenWindow>(&msg)) {
            std::optional<Timestamp> deadline;
            if (open->delay_ms) {
                deadline = last_onset + std::chrono::milliseconds(*open->delay_ms);
            }
            if (armed && (!deadline || armed->ts <= *deadline)) {
                now = std::max(now, armed->ts);
                send(wire::Input{armed->device, armed->code, armed->ts.us()});
                armed.reset();
                responded = true;
            } else if (deadline) {
                now = std::max(now, *deadline);
            }
        } else if (std::holds_alternative<wire::SessionEnd>(msg)) {
            report.completed = true;
            send(wire::Bye{});
            break;
        } else if (const auto* refuse = std::get_if<wire::Refuse>(&msg)) {
            report.refused = refuse->reason;
            break;
        }
    }
    channel.shutdown();
    return report;
}

} // namespace stimrun
