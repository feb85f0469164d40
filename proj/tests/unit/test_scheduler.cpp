#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "stimrun/error.hpp"
#include "stimrun/scheduler.hpp"
#include "stimrun/virtual_io.hpp"
#include "stimrun/wave.hpp"
#include "support.hpp"

namespace stimrun {
namespace {

const char* const window_script = R"([TRIAL_DATA]
TRIAL1=<a.wav><Choix1>
[TRIAL_EVENTS]
X10=BEGIN
X20=PLAY_SOUND<#1>
X30=GET_INPUT<DELAY 2000>
X40=END
[SETTINGS_G]
INPUT=<Choix1 CK_1 BK_01><Choix2 CK_2 VK_NUMPAD2>
CORRECT=<#2>
)";

struct WindowRig {
    Script script = test::parse_ok(window_script);
    AssetCache assets;
    VirtualIo io;

    explicit WindowRig(LatencyProfile latency = {})
        : io(latency) {
        MemoryAssetSource source;
        source.add("a.wav", encode_wave(test::tone(8000, 800)));
        assets.load(source, "a.wav", AssetKind::Audio);
        assets.seal();
    }

    TrialOutcome run() {
        return execute_trial(script.trials[0], script.events, script.groups[0], assets, SessionIo{io, io, io});
    }

    void press(const std::string& code, std::int64_t at_us, InputDevice device = InputDevice::Keyboard) {
        io.inject(InputEvent{device, code, Timestamp::from_us(at_us)});
    }
};

TEST(Window, EventAtDeadlineIsAccepted) {
    WindowRig rig;
    rig.press("CK_1", 2'000'000);
    const auto o = rig.run();
    ASSERT_TRUE(o.response);
    EXPECT_EQ(*o.response, "Choix1");
    EXPECT_EQ(o.correctness, Correctness::Ok);
    EXPECT_EQ(o.rtime_ms, 2000);
}

TEST(Window, EventOneMillisecondLateIsRejected) {
    WindowRig rig;
    rig.press("CK_1", 2'001'000);
    const auto o = rig.run();
    EXPECT_FALSE(o.response);
    EXPECT_EQ(o.correctness, Correctness::NoResponse);
    EXPECT_EQ(o.rtime_ms, 0);
}

TEST(Window, PreWindowEventsAreIgnored) {
    WindowRig rig(LatencyProfile{100, 0, 0});
    rig.press("CK_1", 50'000);
    const auto o = rig.run();
    EXPECT_FALSE(o.response);
    EXPECT_EQ(o.stimulus_onset, Timestamp::from_ms(100));
}

TEST(Window, OnlyFirstMappedEventCounts) {
    WindowRig rig(LatencyProfile{100, 0, 0});
    rig.press("CK_9", 300'000);
    rig.press("NUMPAD2", 400'000);
    rig.press("CK_1", 500'000);
    const auto o = rig.run();
    ASSERT_TRUE(o.response);
    EXPECT_EQ(*o.response, "Choix2");
    EXPECT_EQ(o.correctness, Correctness::Err);
    EXPECT_EQ(o.rtime_ms, 300);
}

TEST(WindowProperty, RandomBoundaries) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        const double latency = std::uniform_int_distribution<int>(0, 2000)(rng) / 10.0;
        WindowRig rig(LatencyProfile{latency, 0, 0});
        const auto onset = millis_to_duration(latency).count();
        const auto offset = std::uniform_int_distribution<std::int64_t>(-500'000, 2'500'000)(rng);
        rig.press("CK_2", onset + offset);
        const auto o = rig.run();
        const bool inside = offset >= 0 && offset <= 2'000'000;
        EXPECT_EQ(o.response.has_value(), inside) << latency << " " << offset;
        if (inside) {
            EXPECT_EQ(o.rtime_ms, (offset + 500) / 1000);
        }
    }
}

TEST(Scheduler, MatchInput) {
    const std::vector<InputMapping> map{
        {"Choix1", {KeyCode{KeyDevice::CharacterKey, "1"}, KeyCode{KeyDevice::ButtonBox, "01"}}},
        {"Choix2", {KeyCode{KeyDevice::VirtualKey, "NUMPAD2"}}}};
    auto ev = [](InputDevice d, std::string code) { return InputEvent{d, std::move(code), Timestamp{}}; };
    EXPECT_EQ(match_input(ev(InputDevice::Keyboard, "CK_1"), map), "Choix1");
    EXPECT_EQ(match_input(ev(InputDevice::Keyboard, "1"), map), "Choix1");
    EXPECT_EQ(match_input(ev(InputDevice::ButtonBox, "01"), map), "Choix1");
    EXPECT_EQ(match_input(ev(InputDevice::ButtonBox, "BK_01"), map), "Choix1");
    EXPECT_EQ(match_input(ev(InputDevice::Keyboard, "NUMPAD2"), map), "Choix2");
    EXPECT_FALSE(match_input(ev(InputDevice::Keyboard, "BK_01"), map));
    EXPECT_FALSE(match_input(ev(InputDevice::Keyboard, "CK_3"), map));
}

TEST(Scheduler, NoCorrectSettingMeansNotApplicable) {
    SettingsGroup g;
    TrialRow t{1, {"x"}};
    EXPECT_EQ(evaluate_correctness(std::string("A"), t, g), Correctness::NotApplicable);
    EXPECT_EQ(evaluate_correctness(std::nullopt, t, g), Correctness::NotApplicable);
}

TEST(Scheduler, UnboundedWindowWaitsForInput) {
    auto script = test::parse_ok("[TRIAL_DATA]\nTRIAL1=<x>\n[TRIAL_EVENTS]\nX10=BEGIN\nX20=DISPLAY_TEXT<#1>\n"
                                 "X30=GET_INPUT\nX40=END\n[SETTINGS_G]\nINPUT=<A CK_A>\n");
    VirtualIo io(LatencyProfile{0, 16, 0});
    io.inject(InputEvent{InputDevice::Keyboard, "CK_A", Timestamp::from_ms(60'016)});
    AssetCache none;
    const auto o = execute_trial(script.trials[0], script.events, script.groups[0], none, SessionIo{io, io, io});
    EXPECT_EQ(o.response, "A");
    EXPECT_EQ(o.rtime_ms, 60'000);
}

TEST(Scheduler, WindowWithoutStimulusAnchorsAtNow) {
    auto script = test::parse_ok("[TRIAL_DATA]\nTRIAL1=<x>\n[TRIAL_EVENTS]\nX10=BEGIN\nX20=GET_INPUT<DELAY 500>\n"
                                 "X30=END\n[SETTINGS_G]\nINPUT=<A CK_A>\n");
    VirtualIo io({}, Timestamp::from_ms(1000));
    io.inject(InputEvent{InputDevice::Keyboard, "CK_A", Timestamp::from_ms(1200)});
    AssetCache none;
    const auto o = execute_trial(script.trials[0], script.events, script.groups[0], none, SessionIo{io, io, io});
    EXPECT_EQ(o.stimulus_onset, Timestamp::from_ms(1000));
    EXPECT_EQ(o.rtime_ms, 200);
}

TEST(Scheduler, StepsAfterResponseAreSkippedButFeedbackPlays) {
    const auto fixture = test::load_fixture(test::data_path("feedback/feedback.stim"), 0);
    VirtualIo io;
    io.set_subject(SubjectSchedule::parse(test::read_text_file(test::data_path("feedback/schedule.txt"))));
    const auto result = run_session(fixture.script, fixture.group, fixture.plans.front(), fixture.assets,
        SessionIo{io, io, io});
    ASSERT_FALSE(result.aborted);
    ASSERT_EQ(result.outcomes.size(), 4u);
    EXPECT_EQ(result.outcomes[0].correctness, Correctness::Ok);
    EXPECT_EQ(result.outcomes[1].correctness, Correctness::Err);
    EXPECT_EQ(result.outcomes[3].correctness, Correctness::NoResponse);

    std::vector<std::string> sounds;
    for (const auto& p : io.presentations()) {
        if (p.kind == VirtualIo::Presentation::Kind::Sound) {
            sounds.push_back(p.name);
        }
    }
    EXPECT_EQ(sounds, (std::vector<std::string>{"clap.wav", "glass.wav", "clap.wav"}));
}

TEST(Scheduler, VolumeAndGatingReachThePort) {
    const auto vol = test::load_fixture(test::data_path("volume/volume.stim"), 0);
    VirtualIo io;
    for (int id = 1; id <= 3; ++id) {
        io.inject(InputEvent{InputDevice::Keyboard, "CK_1", Timestamp::from_ms(id * 10'000)});
    }
    auto result = run_session(vol.script, vol.group, vol.plans.front(), vol.assets, SessionIo{io, io, io});
    ASSERT_FALSE(result.aborted);
    std::vector<double> gains;
    for (const auto& p : io.presentations()) {
        if (p.kind == VirtualIo::Presentation::Kind::Sound) {
            gains.push_back(p.gain);
        }
    }
    ASSERT_EQ(gains.size(), 3u);
    EXPECT_DOUBLE_EQ(gains[0], 1.0);
    EXPECT_NEAR(gains[1], test::oracle_gain(-3), 1e-12);
    EXPECT_NEAR(gains[2], test::oracle_gain(-6), 1e-12);

    const auto gate = test::load_fixture(test::data_path("gating/gating.stim"), 0);
    VirtualIo gio;
    result = run_session(gate.script, gate.group, gate.plans.front(), gate.assets, SessionIo{gio, gio, gio});
    ASSERT_FALSE(result.aborted);
    std::vector<std::int64_t> lengths;
    for (const auto& p : gio.presentations()) {
        if (p.kind == VirtualIo::Presentation::Kind::Sound) {
            EXPECT_EQ(p.range.first, 0);
            lengths.push_back(p.range.last);
        }
    }
    EXPECT_EQ(lengths, (std::vector<std::int64_t>{8820, 11025, 12127, 8820, 11025}));
}

TEST(Scheduler, RuntimeErrorsAbortWithPartialOutcomes) {
    auto script = test::parse_ok("[TRIAL_DATA]\nTRIAL1=<a.wav>\nTRIAL2=<b.wav>\n[TRIAL_EVENTS]\nX10=BEGIN\n"
                                 "X20=PLAY_SOUND<#1>\nX30=END\n");
    MemoryAssetSource source;
    source.add("a.wav", encode_wave(test::tone(8000, 10)));
    AssetCache cache;
    cache.load(source, "a.wav", AssetKind::Audio);
    VirtualIo io;
    const auto result = run_session(script, default_group(), RunPlan{Phase::Test, {1, 2}, {}}, cache,
        SessionIo{io, io, io});
    ASSERT_TRUE(result.aborted);
    EXPECT_EQ(result.aborted->code(), ErrorCode::AssetMissing);
    EXPECT_EQ(result.outcomes.size(), 1u);
}

TEST(Scheduler, InstructionsShownFirstAndDismissed) {
    const auto f = test::load_fixture(test::data_path("minimal_pairs/minimal_pairs.stim"), test::golden_seed);
    VirtualIo io;
    io.set_subject(test::golden_schedule());
    const auto result = run_session(f.script, f.group, f.plans.front(), f.assets, SessionIo{io, io, io});
    ASSERT_FALSE(result.aborted);
    ASSERT_FALSE(io.presentations().empty());
    EXPECT_EQ(io.presentations().front().trial_id, 0);
    EXPECT_NE(io.presentations().front().name.find("Appuyez"), std::string::npos);
}

TEST(Plan, TrainingRepeatsOrderVerbatim) {
    const auto script = test::parse_ok(test::read_text_file(test::data_path("pairs_reference.stim")));
    const auto plan = build_run_plan(script, script.groups[0], Phase::Training, 99);
    EXPECT_EQ(plan.trial_ids, (std::vector<int>{1, 3, 4, 6}));
    auto no_training = script.groups[0];
    no_training.training_order.reset();
    try {
        build_run_plan(script, no_training, Phase::Training, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoTraining);
    }
}

TEST(Plan, FixedOrderIsFileOrder) {
    auto script = test::parse_ok(test::read_text_file(test::data_path("pairs_reference.stim")));
    auto group = script.groups[0];
    group.trial_order = TrialOrder::Fixed;
    EXPECT_EQ(build_run_plan(script, group, Phase::Test, 7).trial_ids, (std::vector<int>{1, 2, 3, 4}));
}

TEST(Plan, GoldenSeedGivesGoldenOrder) {
    const auto script = test::parse_ok(test::read_text_file(test::data_path("minimal_pairs/minimal_pairs.stim")));
    EXPECT_EQ(build_run_plan(script, script.groups[0], Phase::Test, test::golden_seed).trial_ids,
        (std::vector<int>{4, 1, 14, 17, 20, 12, 8}));
}

TEST(ShuffleProperty, PermutationAndDeterminism) {
    std::vector<int> base(20);
    std::iota(base.begin(), base.end(), 1);
    std::set<std::vector<int>> distinct;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto a = base;
        auto b = base;
        deterministic_shuffle(a, seed);
        deterministic_shuffle(b, seed);
        EXPECT_EQ(a, b);
        EXPECT_TRUE(std::is_permutation(a.begin(), a.end(), base.begin()));
        distinct.insert(a);
    }
    EXPECT_EQ(distinct.size(), 200u);
}

TEST(ShuffleProperty, PositionsAreRoughlyUniform) {
    // Chi-square on where element 0 lands among 8 slots.
    constexpr int n = 8;
    constexpr int runs = 16000;
    std::vector<int> counts(n, 0);
    for (int seed = 0; seed < runs; ++seed) {
        std::vector<int> v(n);
        std::iota(v.begin(), v.end(), 0);
        deterministic_shuffle(v, static_cast<std::uint64_t>(seed));
        ++counts[static_cast<std::size_t>(std::find(v.begin(), v.end(), 0) - v.begin())];
    }
    double chi = 0;
    for (int c : counts) {
        const double expected = static_cast<double>(runs) / n;
        chi += (c - expected) * (c - expected) / expected;
    }
    EXPECT_LT(chi, 24.3); // p = 0.001 at 7 degrees of freedom
}

// Expected permutations computed by a separate MT19937-64 implementation.
TEST(Shuffle, KnownVectorIsStable) {
    std::vector<int> v(10);
    std::iota(v.begin(), v.end(), 1);
    auto w = v;
    deterministic_shuffle(v, 0);
    EXPECT_EQ(v, (std::vector<int>{8, 3, 1, 9, 4, 10, 7, 2, 6, 5}));
    deterministic_shuffle(w, 12345);
    EXPECT_EQ(w, (std::vector<int>{4, 2, 8, 5, 10, 3, 1, 9, 6, 7}));
    std::vector<int> one{42};
    deterministic_shuffle(one, 5);
    EXPECT_EQ(one, std::vector<int>{42});
}

} // namespace
} // namespace stimrun
