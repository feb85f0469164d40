#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "stimrun/ports.hpp"

namespace stimrun {

// What a simulated subject does in one trial: press `key` `latency` after the
// latest stimulus onset, or nothing.
struct ScriptedResponse {
    std::optional<KeyCode> key;
    Duration latency{0};

    bool operator==(const ScriptedResponse&) const = default;
};

// Per-trial responses of a simulated subject.
//
// Text form, one entry per line:
//     trial_id, response_code, latency_ms
// where response_code is a key code (CK_2, VK_NUMPAD1, BK_01) or `-` for no
// response. Blank lines and lines starting with '#' are ignored. Trials not
// listed get no response.
class SubjectSchedule {
public:
    void set(int trial_id, ScriptedResponse response);
    const ScriptedResponse* find(int trial_id) const;
    std::vector<int> trial_ids() const;

    /// Throws Error(BadValue) naming the offending line.
    static SubjectSchedule parse(std::string_view text);

private:
    std::map<int, ScriptedResponse> responses_;
};

// Deterministic io backend: a virtual clock plus a scripted subject.
// Stimulus onsets lag their command by the LatencyProfile; the executor
// proceeds at the onset. Inputs carry their capture time and are seen by
// the executor after the poll jitter.
class VirtualIo final : public Clock, public StimulusPort, public InputPort {
public:
    struct Presentation {
        enum class Kind { Text, Image, Sound };
        Kind kind = Kind::Text;
        int trial_id = 0; // 0 for instructions
        std::string name; // text shown or asset name
        double gain = 1.0;
        SampleRange range;
        Timestamp commanded;
        Timestamp onset;
    };

    explicit VirtualIo(LatencyProfile latency = {}, Timestamp origin = Timestamp{}, std::uint64_t jitter_seed = 0);

    void set_subject(SubjectSchedule schedule) { subject_ = std::move(schedule); }

    /// Queues an event at an absolute time, independent of any trial.
    void inject(InputEvent event);

    /// Key the subject presses to dismiss the instruction screen.
    static constexpr std::string_view ack_key = "VK_RETURN";

    const std::vector<Presentation>& presentations() const { return log_; }

    Timestamp now() override { return now_; }
    void pause(Duration d) override;

    void begin_instructions() override;
    void begin_trial(int trial_id, Phase phase) override;
    void end_trial() override;
    Timestamp show_text(std::string_view text, const TextFormat& format) override;
    Timestamp show_image(const Stimulus& image) override;
    Timestamp play_sound(const Stimulus& sound, double gain, SampleRange range) override;

    std::optional<InputEvent> next_input(std::optional<Timestamp> not_after) override;

private:
    Timestamp present(Presentation p, Duration latency);
    Duration poll_jitter();

    LatencyProfile latency_;
    Timestamp now_;
    std::mt19937_64 rng_;
    SubjectSchedule subject_;
    std::vector<InputEvent> scripted_; // sorted by ts
    std::optional<InputEvent> armed_;  // subject's pending reaction
    int trial_id_ = 0;
    bool in_instructions_ = false;
    bool responded_ = false;
    std::vector<Presentation> log_;
};

} // namespace stimrun
