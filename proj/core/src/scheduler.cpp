#include "stimrun/scheduler.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "stimrun/parser.hpp"
#include "stimrun/text.hpp"

namespace stimrun {

namespace {

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    // Reject the low (2^64 mod n) values so every residue is equally likely.
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t x = 0;
    do {
        x = rng();
    } while (x < threshold);
    return x % n;
}

double resolve_number(const Arg& arg, const TrialRow& trial, const char* what) {
    const auto text = resolve_arg(arg, trial);
    const auto value = parse_decimal(text);
    if (!value) {
        throw Error(ErrorCode::BadValue, std::string(what) + " of TRIAL" + std::to_string(trial.id) + " is '" + text
                + "', not a number");
    }
    return *value;
}

std::int64_t resolve_micros(const Arg& arg, const TrialRow& trial, const char* what) {
    const auto text = resolve_arg(arg, trial);
    const auto us = parse_millis_as_micros(text);
    if (!us) {
        throw Error(ErrorCode::BadValue, std::string(what) + " of TRIAL" + std::to_string(trial.id) + " is '" + text
                + "', not a non-negative number of milliseconds");
    }
    return *us;
}

std::string qualified_code(const InputEvent& event) {
    const auto& code = event.code;
    if (code.size() > 3 && code[2] == '_'
        && (code.starts_with("CK") || code.starts_with("VK") || code.starts_with("BK"))) {
        return code;
    }
    if (event.device == InputDevice::ButtonBox) {
        return "BK_" + code;
    }
    return (code.size() == 1 ? "CK_" : "VK_") + code;
}

} // namespace

SettingsGroup default_group() {
    SettingsGroup g;
    g.name = "DEFAULT";
    return g;
}

void deterministic_shuffle(std::vector<int>& ids, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = ids.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(bounded(rng, i));
        std::swap(ids[i - 1], ids[j]);
    }
}

RunPlan build_run_plan(const Script& script, const SettingsGroup& group, Phase phase, std::uint64_t seed) {
    RunPlan plan;
    plan.phase = phase;
    if (phase == Phase::Training) {
        if (!group.training_order) {
            throw Error(ErrorCode::NoTraining, "group " + group.name + " has no TRAINING_ORDER");
        }
        plan.trial_ids = *group.training_order;
        return plan;
    }
    for (const auto& t : script.trials) {
        plan.trial_ids.push_back(t.id);
    }
    if (group.trial_order == TrialOrder::Random) {
        plan.seed = seed;
        deterministic_shuffle(plan.trial_ids, seed);
    }
    return plan;
}

std::optional<std::string> match_input(const InputEvent& event, std::span<const InputMapping> input_map) {
    const auto code = qualified_code(event);
    const bool button = code.starts_with("BK_");
    if (button != (event.device == InputDevice::ButtonBox)) {
        return std::nullopt;
    }
    for (const auto& mapping : input_map) {
        for (const auto& key : mapping.codes) {
            if (key.name() == code) {
                return mapping.label;
            }
        }
    }
    return std::nullopt;
}

Correctness evaluate_correctness(const std::optional<std::string>& response, const TrialRow& trial,
    const SettingsGroup& group) {
    if (!group.correct) {
        return Correctness::NotApplicable;
    }
    if (!response) {
        return Correctness::NoResponse;
    }
    return *response == resolve_arg(*group.correct, trial) ? Correctness::Ok : Correctness::Err;
}

TrialOutcome execute_trial(const TrialRow& trial, std::span<const EventStep> events, const SettingsGroup& group,
    const AssetCache& assets, SessionIo io, Phase phase) {
    TrialOutcome outcome;
    outcome.trial_id = trial.id;
    outcome.phase = phase;
    outcome.resolved_columns = trial.columns;

    std::optional<Timestamp> latest_onset;
    bool closed = false;
    bool window_opened = false;

    io.stimuli.begin_trial(trial.id, phase);
    for (const auto& step : events) {
        if (closed || std::holds_alternative<step::End>(step.command)) {
            break;
        }
        if (const auto* text = std::get_if<step::DisplayText>(&step.command)) {
            latest_onset = io.stimuli.show_text(resolve_arg(text->text, trial), group.text_format);
        } else if (const auto* image = std::get_if<step::DisplayImageFile>(&step.command)) {
            const auto handle = assets.find(resolve_arg(image->path, trial), AssetKind::Image);
            latest_onset = io.stimuli.show_image(*handle);
        } else if (const auto* play = std::get_if<step::PlaySound>(&step.command)) {
            const auto handle = assets.find(resolve_arg(play->source, trial), AssetKind::Audio);
            const auto& pcm = *handle->audio;
            const double gain = play->volume ? gain_from_db(resolve_number(*play->volume, trial, "VOLUME")) : 1.0;
            const auto begin_us = play->time_begin ? resolve_micros(*play->time_begin, trial, "TIME_BEGIN") : 0;
            std::optional<std::int64_t> end_us;
            if (play->time_end) {
                end_us = resolve_micros(*play->time_end, trial, "TIME_END");
            }
            const auto range = gate_bounds(pcm.sample_rate, pcm.frames(), begin_us, end_us);
            latest_onset = io.stimuli.play_sound(*handle, gain, range);
        } else if (const auto* get = std::get_if<step::GetInput>(&step.command)) {
            std::optional<Duration> delay;
            if (get->delay) {
                delay = Duration(resolve_micros(*get->delay, trial, "DELAY"));
            }
            const Timestamp anchor = latest_onset ? *latest_onset : io.clock.now();
            std::optional<Timestamp> deadline;
            if (delay) {
                deadline = anchor + *delay;
            }
            outcome.stimulus_onset = anchor;
            window_opened = true;
            io.input.open_window(step.label, delay);
            while (auto event = io.input.next_input(deadline)) {
                if (event->ts < anchor) {
                    continue; // typed before the window opened
                }
                if (auto label = match_input(*event, group.input_map)) {
                    outcome.response = std::move(label);
                    outcome.response_time = event->ts;
                    break;
                }
            }
            io.input.close_window();
            closed = outcome.response.has_value();
        }
    }
    if (!window_opened && latest_onset) {
        outcome.stimulus_onset = *latest_onset;
    }

    outcome.correctness = evaluate_correctness(outcome.response, trial, group);
    outcome.rtime_ms = outcome.response_time ? compute_rtime(outcome.stimulus_onset, *outcome.response_time) : 0;

    if (group.sound_feedback
        && (outcome.correctness == Correctness::Ok || outcome.correctness == Correctness::Err)) {
        const auto& name = outcome.correctness == Correctness::Ok ? group.sound_feedback->positive
                                                                  : group.sound_feedback->negative;
        const auto handle = assets.find(name, AssetKind::Audio);
        io.stimuli.play_sound(*handle, 1.0, SampleRange{0, handle->audio->frames()});
    }
    io.stimuli.end_trial();
    io.clock.pause(std::chrono::milliseconds(group.pause_ms));
    return outcome;
}

SessionResult run_session(const Script& script, const SettingsGroup& group, const RunPlan& plan,
    const AssetCache& assets, SessionIo io, const SessionOptions& options) {
    SessionResult result;
    try {
        if (options.show_instructions && group.instruction_file) {
            const auto handle = assets.find(*group.instruction_file, AssetKind::Text);
            io.stimuli.begin_instructions();
            const auto onset = io.stimuli.show_text(handle->text, group.text_format);
            io.input.open_window(0, std::nullopt);
            while (auto event = io.input.next_input(std::nullopt)) {
                if (event->ts >= onset) {
                    break;
                }
            }
            io.input.close_window();
            io.stimuli.end_trial();
        }
        for (int id : plan.trial_ids) {
            const auto* trial = script.find_trial(id);
            if (!trial) {
                throw Error(ErrorCode::BadValue, "plan names TRIAL" + std::to_string(id) + ", which is not defined");
            }
            auto outcome = execute_trial(*trial, script.events, group, assets, io, plan.phase);
            if (options.on_outcome) {
                options.on_outcome(outcome);
            }
            result.outcomes.push_back(std::move(outcome));
        }
    } catch (const Error& e) {
        result.aborted = e;
    }
    return result;
}

std::vector<AssetRef> collect_assets(const Script& script, const SettingsGroup& group, std::span<const RunPlan> plans) {
    std::vector<AssetRef> refs;
    auto add = [&](std::string name, AssetKind kind) {
        AssetRef ref{std::move(name), kind};
        if (std::find(refs.begin(), refs.end(), ref) == refs.end()) {
            refs.push_back(std::move(ref));
        }
    };
    if (group.instruction_file) {
        add(*group.instruction_file, AssetKind::Text);
    }
    for (const auto& plan : plans) {
        for (int id : plan.trial_ids) {
            const auto* trial = script.find_trial(id);
            if (!trial) {
                throw Error(ErrorCode::BadValue, "plan names TRIAL" + std::to_string(id) + ", which is not defined");
            }
            for (const auto& step : script.events) {
                if (const auto* image = std::get_if<step::DisplayImageFile>(&step.command)) {
                    add(resolve_arg(image->path, *trial), AssetKind::Image);
                } else if (const auto* play = std::get_if<step::PlaySound>(&step.command)) {
                    add(resolve_arg(play->source, *trial), AssetKind::Audio);
                }
            }
        }
    }
    if (group.sound_feedback) {
        add(group.sound_feedback->positive, AssetKind::Audio);
        add(group.sound_feedback->negative, AssetKind::Audio);
    }
    return refs;
}

AssetCache preload_assets(AssetSource& source, std::span<const AssetRef> refs) {
    AssetCache cache;
    for (const auto& ref : refs) {
        cache.load(source, ref.name, ref.kind);
    }
    cache.seal();
    return cache;
}

} // namespace stimrun
