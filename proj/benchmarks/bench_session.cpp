#include <benchmark/benchmark.h>

#include <cmath>
#include <string>

#include "stimrun/parser.hpp"
#include "stimrun/scheduler.hpp"
#include "stimrun/virtual_io.hpp"
#include "stimrun/wave.hpp"

namespace {

using namespace stimrun;

struct Setup {
    Script script;
    AssetCache assets;
    SubjectSchedule subject;
};

Setup make_setup(int trials) {
    std::string text = "[TRIAL_DATA]\n";
    for (int i = 1; i <= trials; ++i) {
        text += "TRIAL" + std::to_string(i) + "=<s.wav> <Choix1>\n";
    }
    text += "[TRIAL_EVENTS]\nX10=BEGIN\nX20=PLAY_SOUND<#1><VOLUME -6>\nX30=GET_INPUT<DELAY 2000>\nX40=END\n"
            "[SETTINGS_G]\nTRIAL_ORDER=<RANDOM>\nINPUT=<Choix1 CK_1><Choix2 CK_2>\nCORRECT=<#2>\n";
    Setup s{*parse_script(text).script, {}, {}};
    PcmAudio audio{22050, 1, 16, std::vector<std::int16_t>(8820)};
    for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        audio.samples[i] = static_cast<std::int16_t>(8000 * std::sin(0.05 * static_cast<double>(i)));
    }
    MemoryAssetSource source;
    source.add("s.wav", encode_wave(audio));
    s.assets.load(source, "s.wav", AssetKind::Audio);
    s.assets.seal();
    for (int i = 1; i <= trials; ++i) {
        s.subject.set(i, ScriptedResponse{KeyCode::parse(i % 2 ? "CK_1" : "CK_2"), Duration(400'000 + 1000 * i)});
    }
    return s;
}

void BM_HeadlessTrial(benchmark::State& state) {
    auto s = make_setup(1);
    VirtualIo io(LatencyProfile{10, 0, 0});
    io.set_subject(s.subject);
    for (auto _ : state) {
        auto o = execute_trial(s.script.trials[0], s.script.events, s.script.groups[0], s.assets, SessionIo{io, io, io});
        benchmark::DoNotOptimize(o);
    }
}
BENCHMARK(BM_HeadlessTrial);

void BM_HeadlessSession(benchmark::State& state) {
    auto s = make_setup(static_cast<int>(state.range(0)));
    const auto plan = build_run_plan(s.script, s.script.groups[0], Phase::Test, 7);
    for (auto _ : state) {
        VirtualIo io(LatencyProfile{10, 0, 0});
        io.set_subject(s.subject);
        auto result = run_session(s.script, s.script.groups[0], plan, s.assets, SessionIo{io, io, io});
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HeadlessSession)->Arg(100);

} // namespace
