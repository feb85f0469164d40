#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "stimrun/timing.hpp"

namespace stimrun::cli {

// Process exit codes.
enum Exit : int {
    exit_ok = 0,
    exit_invalid_script = 1,
    exit_usage = 2, // unreadable input or bad invocation
    exit_runtime = 3, // schedule, asset or execution error
    exit_busy = 4,
    exit_client_lost = 5,
    exit_protocol = 6,
};

struct CliConfig {
    std::filesystem::path script;
    std::optional<std::string> group; // default: first group
    std::string subject;
    std::optional<std::uint64_t> seed; // default: generated and printed
    std::optional<std::filesystem::path> out; // file, or directory for the default name
    bool training = false; // run TRAINING_ORDER before the test phase
    bool log_training = false; // write training rows, with a PHASE column
    std::filesystem::path schedule; // run only
    LatencyProfile latency; // run only
    std::string listen = "127.0.0.1:7341"; // serve only
    std::chrono::milliseconds accept_timeout{60'000}; // serve only
};

/// Parses and validates a script; diagnostics go to `out`.
int cmd_validate(const std::filesystem::path& script, std::ostream& out, std::ostream& err);

/// Headless run against the simulated subject in `config.schedule`.
int cmd_run(const CliConfig& config, std::ostream& out, std::ostream& err);

/// Serves one presentation client. `on_listening` is called with the bound
/// port before waiting for the client.
int cmd_serve(const CliConfig& config, std::ostream& out, std::ostream& err,
    const std::function<void(std::uint16_t)>& on_listening = {});

/// Full command line entry point.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace stimrun::cli
