#include <benchmark/benchmark.h>

#include <vector>

#include "stimrun/protocol.hpp"

namespace {

using namespace stimrun::wire;

void BM_EncodeInput(benchmark::State& state) {
    const Message msg = Input{stimrun::InputDevice::ButtonBox, "BK_02", 123'456'789};
    for (auto _ : state) {
        auto bytes = encode_message(msg);
        benchmark::DoNotOptimize(bytes);
    }
}
BENCHMARK(BM_EncodeInput);

void BM_DecodeInput(benchmark::State& state) {
    const auto bytes = encode_message(Input{stimrun::InputDevice::Keyboard, "CK_1", 987'654'321});
    for (auto _ : state) {
        auto msg = decode_message(bytes);
        benchmark::DoNotOptimize(msg);
    }
}
BENCHMARK(BM_DecodeInput);

void BM_PreloadRoundTrip(benchmark::State& state) {
    Preload p;
    p.asset = 1;
    p.name = "s.wav";
    p.data.resize(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < p.data.size(); ++i) {
        p.data[i] = static_cast<std::uint8_t>(i * 31);
    }
    for (auto _ : state) {
        auto msg = decode_message(encode_message(p));
        benchmark::DoNotOptimize(msg);
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PreloadRoundTrip)->Arg(1 << 10)->Arg(1 << 16)->Arg(1 << 20);

} // namespace
