#include "stimrun/virtual_io.hpp"

#include <algorithm>

#include "stimrun/error.hpp"
#include "stimrun/text.hpp"

namespace stimrun {

std::string_view input_device_name(InputDevice device) {
    return device == InputDevice::Keyboard ? "Keyboard" : "ButtonBox";
}

std::optional<InputDevice> parse_input_device(std::string_view name) {
    if (name == "Keyboard") return InputDevice::Keyboard;
    if (name == "ButtonBox") return InputDevice::ButtonBox;
    return std::nullopt;
}

InputEvent input_for_key(const KeyCode& key, Timestamp ts) {
    return InputEvent{key.device == KeyDevice::ButtonBox ? InputDevice::ButtonBox : InputDevice::Keyboard,
        key.name(), ts};
}

std::string_view phase_name(Phase phase) {
    return phase == Phase::Training ? "training" : "test";
}

void SubjectSchedule::set(int trial_id, ScriptedResponse response) {
    responses_[trial_id] = std::move(response);
}

const ScriptedResponse* SubjectSchedule::find(int trial_id) const {
    auto it = responses_.find(trial_id);
    return it == responses_.end() ? nullptr : &it->second;
}

std::vector<int> SubjectSchedule::trial_ids() const {
    std::vector<int> ids;
    for (const auto& [id, _] : responses_) {
        ids.push_back(id);
    }
    return ids;
}

SubjectSchedule SubjectSchedule::parse(std::string_view text) {
    SubjectSchedule schedule;
    const auto decoded = decode_text(text);
    const auto lines = split_lines(decoded);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto where = "schedule line " + std::to_string(i + 1) + ": ";
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (start <= line.size()) {
            auto comma = line.find(',', start);
            if (comma == std::string_view::npos) {
                comma = line.size();
            }
            fields.push_back(trim(line.substr(start, comma - start)));
            start = comma + 1;
        }
        if (fields.size() == 1) {
            fields = split_words(line);
        }
        if (fields.size() != 3) {
            throw Error(ErrorCode::BadValue, where + "expected trial_id, response_code, latency_ms");
        }
        const auto id = parse_int(fields[0]);
        if (!id || *id < 1 || *id > 1'000'000'000) {
            throw Error(ErrorCode::BadValue, where + "bad trial id '" + std::string(fields[0]) + "'");
        }
        if (schedule.find(static_cast<int>(*id))) {
            throw Error(ErrorCode::BadValue, where + "trial " + std::to_string(*id) + " is listed twice");
        }
        ScriptedResponse response;
        if (fields[1] != "-") {
            response.key = KeyCode::parse(fields[1]);
            if (!response.key) {
                throw Error(ErrorCode::BadValue, where + "'" + std::string(fields[1]) + "' is not a key code");
            }
            const auto us = parse_millis_as_micros(fields[2]);
            if (!us) {
                throw Error(ErrorCode::BadValue, where + "bad latency '" + std::string(fields[2]) + "'");
            }
            response.latency = Duration(*us);
        }
        schedule.set(static_cast<int>(*id), std::move(response));
    }
    return schedule;
}

VirtualIo::VirtualIo(LatencyProfile latency, Timestamp origin, std::uint64_t jitter_seed)
    : latency_(latency)
    , now_(origin)
    , rng_(jitter_seed) {
    if (!latency_.valid()) {
        throw Error(ErrorCode::BadValue, "latency profile values must be non-negative");
    }
}

void VirtualIo::inject(InputEvent event) {
    auto pos = std::upper_bound(scripted_.begin(), scripted_.end(), event.ts,
        [](Timestamp ts, const InputEvent& e) { return ts < e.ts; });
    scripted_.insert(pos, std::move(event));
}

void VirtualIo::pause(Duration d) {
    if (d.count() > 0) {
        now_ += d;
    }
}

void VirtualIo::begin_instructions() {
    in_instructions_ = true;
    trial_id_ = 0;
    responded_ = false;
    armed_.reset();
}

void VirtualIo::begin_trial(int trial_id, Phase) {
    in_instructions_ = false;
    trial_id_ = trial_id;
    responded_ = false;
    armed_.reset();
}

void VirtualIo::end_trial() {
    armed_.reset();
    responded_ = true;
}

Timestamp VirtualIo::present(Presentation p, Duration latency) {
    p.trial_id = trial_id_;
    p.commanded = now_;
    p.onset = now_ + latency;
    now_ = p.onset;
    if (!responded_) {
        if (in_instructions_) {
            armed_ = InputEvent{InputDevice::Keyboard, std::string(ack_key), p.onset};
        } else if (const auto* r = subject_.find(trial_id_); r && r->key) {
            armed_ = input_for_key(*r->key, p.onset + r->latency);
        }
    }
    log_.push_back(std::move(p));
    return now_;
}

Timestamp VirtualIo::show_text(std::string_view text, const TextFormat&) {
    Presentation p;
    p.kind = Presentation::Kind::Text;
    p.name = std::string(text);
    return present(std::move(p), millis_to_duration(latency_.display_latency_ms));
}

Timestamp VirtualIo::show_image(const Stimulus& image) {
    Presentation p;
    p.kind = Presentation::Kind::Image;
    p.name = image.name;
    return present(std::move(p), millis_to_duration(latency_.display_latency_ms));
}

Timestamp VirtualIo::play_sound(const Stimulus& sound, double gain, SampleRange range) {
    Presentation p;
    p.kind = Presentation::Kind::Sound;
    p.name = sound.name;
    p.gain = gain;
    p.range = range;
    return present(std::move(p), millis_to_duration(latency_.play_latency_ms));
}

Duration VirtualIo::poll_jitter() {
    const auto max_us = millis_to_duration(latency_.input_poll_jitter_ms).count();
    if (max_us <= 0) {
        return Duration(0);
    }
    return Duration(static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(max_us + 1)));
}

std::optional<InputEvent> VirtualIo::next_input(std::optional<Timestamp> not_after) {
    const InputEvent* next = nullptr;
    bool from_armed = false;
    if (!scripted_.empty()) {
        next = &scripted_.front();
    }
    if (armed_ && (!next || armed_->ts < next->ts)) {
        next = &*armed_;
        from_armed = true;
    }
    if (!next || (not_after && next->ts > *not_after)) {
        if (not_after) {
            now_ = std::max(now_, *not_after);
        }
        return std::nullopt;
    }
    InputEvent event = *next;
    if (from_armed) {
        armed_.reset();
        responded_ = true;
    } else {
        scripted_.erase(scripted_.begin());
    }
    now_ = std::max(now_, event.ts + poll_jitter());
    return event;
}

} // namespace stimrun
