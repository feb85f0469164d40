#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace stimrun {

using Duration = std::chrono::microseconds;

// A point on the presentation clock, in microseconds. Which physical clock
// that is depends on the io backend (the virtual clock in simulation, the
// client's monotonic clock over the wire); reaction times are only ever
// computed between two Timestamps from the same backend.
class Timestamp {
public:
    constexpr Timestamp() = default;
    static constexpr Timestamp from_us(std::int64_t us) { return Timestamp(us); }
    static constexpr Timestamp from_ms(std::int64_t ms) { return Timestamp(ms * 1000); }

    constexpr std::int64_t us() const { return us_; }

    constexpr auto operator<=>(const Timestamp&) const = default;

    constexpr Timestamp operator+(Duration d) const { return Timestamp(us_ + d.count()); }
    constexpr Timestamp operator-(Duration d) const { return Timestamp(us_ - d.count()); }
    constexpr Duration operator-(Timestamp other) const { return Duration(us_ - other.us_); }
    constexpr Timestamp& operator+=(Duration d) {
        us_ += d.count();
        return *this;
    }

private:
    constexpr explicit Timestamp(std::int64_t us)
        : us_(us) {}

    std::int64_t us_ = 0;
};

// Engine-side time keeping used by the scheduler between steps.
class Clock {
public:
    virtual ~Clock() = default;

    virtual Timestamp now() = 0;
    virtual void pause(Duration d) = 0;
};

// Monotonic wall clock, immune to system time adjustments.
class SteadyClock final : public Clock {
public:
    SteadyClock();

    Timestamp now() override;
    void pause(Duration d) override;

private:
    std::chrono::steady_clock::time_point origin_;
};

/// Smallest observed non-zero increment of the steady clock.
Duration measure_clock_resolution(int samples = 2000);

/// Reaction time in whole milliseconds, rounded half-up. `onset` must be the
/// actual stimulus onset reported by the presentation layer.
/// Throws Error(ClockOrder) if response precedes onset.
std::int64_t compute_rtime(Timestamp onset, Timestamp response);

/// 10^(dB/20).
double gain_from_db(double volume_db);

struct SampleRange {
    std::int64_t first = 0;
    std::int64_t last = 0; // exclusive

    std::int64_t size() const { return last - first; }
    bool operator==(const SampleRange&) const = default;
};

/// Sample-frame range selected by TIME_BEGIN/TIME_END (given in microseconds
/// of the source file): first = floor(rate*begin), last = min(count,
/// floor(rate*end)). Throws Error(GateRange) when the window is empty, starts
/// past the end, or end <= begin.
SampleRange gate_bounds(std::uint32_t sample_rate, std::int64_t sample_count,
    std::int64_t time_begin_us, std::optional<std::int64_t> time_end_us);

/// Scales interleaved 16-bit PCM frames in `range` by `gain`, clamping to the
/// sample range instead of wrapping.
std::vector<std::int16_t> apply_gain(std::span<const std::int16_t> interleaved, int channels,
    SampleRange range, double gain);

// Simulated presentation latencies. Values in milliseconds, all >= 0.
struct LatencyProfile {
    double play_latency_ms = 0.0;
    double display_latency_ms = 0.0;
    double input_poll_jitter_ms = 0.0;

    bool valid() const { return play_latency_ms >= 0 && display_latency_ms >= 0 && input_poll_jitter_ms >= 0; }
};

Duration millis_to_duration(double ms);

} // namespace stimrun
