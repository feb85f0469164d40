#include "stimrun/timing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "stimrun/error.hpp"

namespace stimrun {

SteadyClock::SteadyClock()
    : origin_(std::chrono::steady_clock::now()) {
}

Timestamp SteadyClock::now() {
    const auto elapsed = std::chrono::steady_clock::now() - origin_;
    return Timestamp::from_us(std::chrono::duration_cast<Duration>(elapsed).count());
}

void SteadyClock::pause(Duration d) {
    if (d.count() > 0) {
        std::this_thread::sleep_for(d);
    }
}

Duration measure_clock_resolution(int samples) {
    using clock = std::chrono::steady_clock;
    auto best = clock::duration::max();
    for (int i = 0; i < samples; ++i) {
        const auto a = clock::now();
        auto b = clock::now();
        while (b == a) {
            b = clock::now();
        }
        best = std::min(best, b - a);
    }
    return std::max(Duration(1), std::chrono::duration_cast<Duration>(best));
}

std::int64_t compute_rtime(Timestamp onset, Timestamp response) {
    if (response < onset) {
        throw Error(ErrorCode::ClockOrder, "response at " + std::to_string(response.us())
                + " us precedes onset at " + std::to_string(onset.us()) + " us");
    }
    const auto us = (response - onset).count();
    return (us + 500) / 1000;
}

double gain_from_db(double volume_db) {
    return std::pow(10.0, volume_db / 20.0);
}

namespace {

// floor(rate * us / 1e6) without overflow for realistic inputs.
std::int64_t frames_at(std::uint32_t rate, std::int64_t us) {
    const std::int64_t whole = us / 1'000'000;
    const std::int64_t rest = us % 1'000'000;
    return whole * rate + (rest * static_cast<std::int64_t>(rate)) / 1'000'000;
}

} // namespace

SampleRange gate_bounds(std::uint32_t sample_rate, std::int64_t sample_count,
    std::int64_t time_begin_us, std::optional<std::int64_t> time_end_us) {
    if (time_begin_us < 0) {
        throw Error(ErrorCode::GateRange, "TIME_BEGIN is negative");
    }
    if (time_end_us && *time_end_us <= time_begin_us) {
        throw Error(ErrorCode::GateRange, "TIME_END must be after TIME_BEGIN");
    }
    SampleRange range;
    range.first = frames_at(sample_rate, time_begin_us);
    range.last = time_end_us ? std::min(sample_count, frames_at(sample_rate, *time_end_us)) : sample_count;
    if (range.first >= sample_count) {
        throw Error(ErrorCode::GateRange, "TIME_BEGIN is at or past the end of the sound ("
                + std::to_string(range.first) + " >= " + std::to_string(sample_count) + " frames)");
    }
    return range;
}

std::vector<std::int16_t> apply_gain(std::span<const std::int16_t> interleaved, int channels,
    SampleRange range, double gain) {
    const auto ch = static_cast<std::size_t>(std::max(channels, 1));
    const auto first = static_cast<std::size_t>(std::max<std::int64_t>(range.first, 0)) * ch;
    const auto last = std::min(static_cast<std::size_t>(std::max<std::int64_t>(range.last, 0)) * ch, interleaved.size());
    std::vector<std::int16_t> out;
    if (first >= last) {
        return out;
    }
    out.reserve(last - first);
    constexpr double lo = std::numeric_limits<std::int16_t>::min();
    constexpr double hi = std::numeric_limits<std::int16_t>::max();
    for (std::size_t i = first; i < last; ++i) {
        const double v = std::round(static_cast<double>(interleaved[i]) * gain);
        out.push_back(static_cast<std::int16_t>(std::clamp(v, lo, hi)));
    }
    return out;
}

Duration millis_to_duration(double ms) {
    return Duration(std::llround(ms * 1000.0));
}

} // namespace stimrun
