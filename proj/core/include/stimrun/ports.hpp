#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "stimrun/assets.hpp"
#include "stimrun/script.hpp"
#include "stimrun/timing.hpp"

namespace stimrun {

enum class InputDevice { Keyboard, ButtonBox };

std::string_view input_device_name(InputDevice device);
std::optional<InputDevice> parse_input_device(std::string_view name);

// A device event stamped at the capture site. `code` is a key-code name
// ("CK_1", "VK_NUMPAD2", "BK_01"); a bare name is accepted and qualified by
// match_input (see scheduler.hpp).
struct InputEvent {
    InputDevice device = InputDevice::Keyboard;
    std::string code;
    Timestamp ts;

    bool operator==(const InputEvent&) const = default;
};

/// InputEvent for a script key code: CK_/VK_ map to the keyboard, BK_ to the
/// button box.
InputEvent input_for_key(const KeyCode& key, Timestamp ts);

enum class Phase { Training, Test };

std::string_view phase_name(Phase phase);

// The presentation side of a session. Each method triggers a preloaded
// stimulus and returns its actual onset on the presentation clock.
class StimulusPort {
public:
    virtual ~StimulusPort() = default;

    virtual void begin_instructions() {}
    virtual void begin_trial(int /*trial_id*/, Phase /*phase*/) {}
    virtual void end_trial() {}

    virtual Timestamp show_text(std::string_view text, const TextFormat& format) = 0;
    virtual Timestamp show_image(const Stimulus& image) = 0;
    virtual Timestamp play_sound(const Stimulus& sound, double gain, SampleRange range) = 0;
};

// Time-ordered input queue. The scheduler is its only consumer.
class InputPort {
public:
    virtual ~InputPort() = default;

    virtual void open_window(int /*window_id*/, std::optional<Duration> /*delay*/) {}
    virtual void close_window() {}

    /// Next queued event stamped at or before `not_after` (any event when
    /// unbounded), waiting for it if needed. Returns nullopt once no such
    /// event can arrive any more.
    virtual std::optional<InputEvent> next_input(std::optional<Timestamp> not_after) = 0;
};

struct SessionIo {
    Clock& clock;
    StimulusPort& stimuli;
    InputPort& input;
};

} // namespace stimrun
