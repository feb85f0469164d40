#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stimrun/assets.hpp"
#include "stimrun/error.hpp"
#include "stimrun/ports.hpp"
#include "stimrun/script.hpp"

namespace stimrun {

struct RunPlan {
    Phase phase = Phase::Test;
    std::vector<int> trial_ids;
    std::optional<std::uint64_t> seed;

    bool operator==(const RunPlan&) const = default;
};

/// Training plans repeat TRAINING_ORDER verbatim (Error(NoTraining) if it is
/// absent). Test plans list the script's trials in file order, shuffled by
/// `seed` when the group asks for RANDOM order.
RunPlan build_run_plan(const Script& script, const SettingsGroup& group, Phase phase, std::uint64_t seed);

/// Seeded Fisher-Yates shuffle on mt19937_64 with rejection sampling, so a
/// seed gives the same permutation on every platform and standard library.
void deterministic_shuffle(std::vector<int>& ids, std::uint64_t seed);

enum class Correctness { Ok, Err, NoResponse, NotApplicable };

struct TrialOutcome {
    int trial_id = 0;
    Phase phase = Phase::Test;
    std::vector<std::string> resolved_columns;
    std::optional<std::string> response; // nullopt = no response
    Correctness correctness = Correctness::NotApplicable;
    std::int64_t rtime_ms = 0;
    Timestamp stimulus_onset;
    std::optional<Timestamp> response_time;

    bool operator==(const TrialOutcome&) const = default;
};

/// Label whose key codes contain the event, or nullopt (unmapped).
std::optional<std::string> match_input(const InputEvent& event, std::span<const InputMapping> input_map);

Correctness evaluate_correctness(const std::optional<std::string>& response, const TrialRow& trial,
    const SettingsGroup& group);

/// Runs one trial of the event program. Steps execute in label order; a
/// GET_INPUT window is anchored at the latest stimulus onset (or at the
/// moment GET_INPUT runs when nothing has been presented) and closes on the
/// first mapped input stamped no later than anchor + DELAY. A response ends
/// the trial; feedback (when configured and applicable) follows, then PAUSE.
TrialOutcome execute_trial(const TrialRow& trial, std::span<const EventStep> events, const SettingsGroup& group,
    const AssetCache& assets, SessionIo io, Phase phase = Phase::Test);

struct SessionResult {
    std::vector<TrialOutcome> outcomes;
    std::optional<Error> aborted; // io failure that cut the session short
};

using OutcomeSink = std::function<void(const TrialOutcome&)>;

struct SessionOptions {
    bool show_instructions = true;
    OutcomeSink on_outcome;
};

/// Shows the instruction file (if any) and runs every planned trial,
/// returning outcomes in execution order. An io failure ends the session
/// early; outcomes produced so far are kept.
SessionResult run_session(const Script& script, const SettingsGroup& group, const RunPlan& plan,
    const AssetCache& assets, SessionIo io, const SessionOptions& options = {});

struct AssetRef {
    std::string name;
    AssetKind kind;
    bool operator==(const AssetRef&) const = default;
};

/// Every file a session over `plans` will present, in first-use order:
/// instructions, then per trial its images and sounds, then feedback sounds.
std::vector<AssetRef> collect_assets(const Script& script, const SettingsGroup& group, std::span<const RunPlan> plans);

/// Loads `refs` into a new cache and seals it.
AssetCache preload_assets(AssetSource& source, std::span<const AssetRef> refs);

/// Settings used when a script has no [SETTINGS_...] section.
SettingsGroup default_group();

} // namespace stimrun
