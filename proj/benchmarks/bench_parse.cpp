#include <benchmark/benchmark.h>

#include <string>

#include "stimrun/parser.hpp"

namespace {

std::string make_script(int trials) {
    std::string text = "[INFORMATION]\nTITLE=bench\n[TRIAL_DATA]\n";
    for (int i = 1; i <= trials; ++i) {
        const auto n = std::to_string(i);
        text += "TRIAL" + n + "=<1)mot" + n + " 2)autre>  <s" + n + ".wav>  <Choix1>  <+x>  <aa>\n";
    }
    text += "[TRIAL_EVENTS]\nX10=BEGIN\nX20=DISPLAY_TEXT<#1>\nX30=PLAY_SOUND<#2><VOLUME -3><TIME_END 250>\n"
            "X40=GET_INPUT<DELAY 2000>\nX50=END\n"
            "[SETTINGS_G]\nTRIAL_ORDER=<RANDOM>\nINPUT=<Choix1 CK_1 BK_01><Choix2 CK_2 BK_02>\nCORRECT=<#3>\n";
    return text;
}

void BM_ParseScript(benchmark::State& state) {
    const auto text = make_script(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto result = stimrun::parse_script(text);
        benchmark::DoNotOptimize(result);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseScript)->Arg(10)->Arg(100)->Arg(1000);

void BM_ParseAndValidate(benchmark::State& state) {
    const auto text = make_script(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto result = stimrun::parse_script(text);
        auto diags = stimrun::validate_script(*result.script);
        benchmark::DoNotOptimize(diags);
    }
}
BENCHMARK(BM_ParseAndValidate)->Arg(100);

} // namespace
