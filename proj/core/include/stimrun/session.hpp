#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stimrun/protocol.hpp"
#include "stimrun/scheduler.hpp"
#include "stimrun/transport.hpp"
#include "stimrun/virtual_io.hpp"

namespace stimrun {

struct ServeOptions {
    std::chrono::milliseconds accept_timeout{60'000};
    std::chrono::milliseconds handshake_timeout{30'000};
    // How long to wait for an Onset echo before declaring the client lost;
    // raised to twice the longest response window of the session.
    std::chrono::milliseconds min_onset_grace{2'000};
    // Extra engine-side wait past a window's end for inputs still in flight.
    std::chrono::milliseconds transport_slack{50};
    std::function<void(std::string_view)> log;
};

// Serves one session to one presentation client. Further connections are
// refused while the session runs.
class SessionServer {
public:
    /// Binds immediately. Throws Error(Busy) if the endpoint is taken.
    explicit SessionServer(const net::Endpoint& endpoint, ServeOptions options = {});
    ~SessionServer();

    std::uint16_t port() const { return listener_.port(); }

    /// Waits for a client, preloads every asset in `assets` to it, then runs
    /// `plans` in order (instructions before the first). An absent client, a
    /// disconnect or a protocol violation ends the session with `aborted`
    /// set; outcomes produced so far are kept.
    SessionResult serve(const Script& script, const SettingsGroup& group, std::span<const RunPlan> plans,
        const AssetCache& assets, OutcomeSink on_outcome = {});

    /// Client-reported audio output latency, if it sent one.
    std::optional<std::int64_t> client_output_latency_us() const { return output_latency_us_; }
    int refused_connections() const { return refused_.load(); }

private:
    void refuse_loop();

    net::Listener listener_;
    ServeOptions options_;
    std::atomic<bool> serving_{false};
    std::atomic<int> refused_{0};
    std::optional<std::int64_t> output_latency_us_;
};

// Scripted presentation client speaking the wire protocol, for tests and
// headless/wire equivalence checks. Its clock is virtual: onsets happen
// at the current client time plus the simulated latency, and a scheduled
// response is stamped `latency` after the latest onset of the trial.
struct SimulatedClientOptions {
    SubjectSchedule schedule;
    Duration clock_origin = std::chrono::seconds(3);
    LatencyProfile latency;
    net::FrameChannel::Mode mode = net::FrameChannel::Mode::LengthPrefixed;
    int version = wire::protocol_version;
    std::optional<int> disconnect_at_trial; // drop the connection on this TrialStart
    std::optional<std::int64_t> report_latency_us;
};

struct SimulatedClientReport {
    bool completed = false; // SessionEnd received
    std::optional<std::string> refused;
    int trials_started = 0;
    std::uint32_t assets_received = 0;
    std::vector<std::string> message_types;
    std::vector<wire::Play> plays;
};

SimulatedClientReport run_simulated_client(const net::Endpoint& endpoint, const SimulatedClientOptions& options);

} // namespace stimrun
