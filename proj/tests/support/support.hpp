#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stimrun/assets.hpp"
#include "stimrun/parser.hpp"
#include "stimrun/scheduler.hpp"
#include "stimrun/session.hpp"
#include "stimrun/virtual_io.hpp"

namespace stimrun::test {

std::filesystem::path data_path(const std::string& relative);
std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Parses a script that must be free of errors.
Script parse_ok(const std::string& text);

/// Sine wave, 16-bit.
PcmAudio tone(std::uint32_t rate, std::int64_t frames, int channels = 1);

// Independent oracles.

/// 10^(dB/20) evaluated in 50-digit decimal arithmetic.
double oracle_gain(double db);

/// floor(rate * t_us / 1e6) by counting whole frames that fit, no division.
std::int64_t oracle_frames_at(std::uint32_t rate, std::int64_t t_us);

// Session drivers shared by the unit and acceptance suites.

struct SessionFixture {
    Script script;
    SettingsGroup group;
    std::vector<RunPlan> plans;
    AssetCache assets;
    std::string subject = "ca";
    bool log_training = false;
};

/// Loads a script from disk, picks its first group, builds plans and
/// preloads assets from the script's directory.
SessionFixture load_fixture(const std::filesystem::path& script, std::uint64_t seed, bool training = false);

/// Response file text of a headless run.
std::string run_headless_tsv(const SessionFixture& f, const SubjectSchedule& schedule, LatencyProfile latency = {},
    std::vector<TrialOutcome>* outcomes = nullptr);

struct WireRun {
    std::string tsv;
    SessionResult result;
    SimulatedClientReport client;
};

/// Response file text of the same session served over the wire protocol to
/// a simulated client on a loopback port.
WireRun run_wire_tsv(const SessionFixture& f, const SimulatedClientOptions& client, ServeOptions serve = {});

/// Golden-run subject: responses and latencies per trial, trial 8 unanswered.
SubjectSchedule golden_schedule();

inline constexpr std::uint64_t golden_seed = 9841;

} // namespace stimrun::test
