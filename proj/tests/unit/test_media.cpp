#include <gtest/gtest.h>

#include "stimrun/error.hpp"
#include "stimrun/image.hpp"
#include "stimrun/wave.hpp"
#include "support.hpp"

namespace stimrun {
namespace {

// Hand-assembled RIFF file, independent of encode_wave.
std::vector<std::uint8_t> riff(std::uint16_t channels, std::uint32_t rate, std::uint16_t bits,
    const std::vector<std::uint8_t>& data, bool extra_chunk = false) {
    std::vector<std::uint8_t> out;
    auto tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
    auto u32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    auto u16 = [&](std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    tag("RIFF");
    u32(0);
    tag("WAVE");
    if (extra_chunk) {
        tag("LIST");
        u32(4);
        tag("INFO");
    }
    tag("fmt ");
    u32(16);
    u16(1);
    u16(channels);
    u32(rate);
    u32(rate * channels * bits / 8);
    u16(static_cast<std::uint16_t>(channels * bits / 8));
    u16(bits);
    tag("data");
    u32(static_cast<std::uint32_t>(data.size()));
    out.insert(out.end(), data.begin(), data.end());
    const auto riff_size = static_cast<std::uint32_t>(out.size() - 8);
    for (int i = 0; i < 4; ++i) out[4 + i] = static_cast<std::uint8_t>(riff_size >> (8 * i));
    return out;
}

TEST(Wave, Decodes16BitStereo) {
    const auto bytes = riff(2, 44100, 16, {0x01, 0x00, 0xFF, 0xFF, 0x00, 0x80, 0xFF, 0x7F}, true);
    const auto audio = decode_wave(bytes);
    EXPECT_EQ(audio.sample_rate, 44100u);
    EXPECT_EQ(audio.channels, 2);
    EXPECT_EQ(audio.frames(), 2);
    EXPECT_EQ(audio.samples, (std::vector<std::int16_t>{1, -1, -32768, 32767}));
}

TEST(Wave, Widens8BitSamples) {
    const auto audio = decode_wave(riff(1, 8000, 8, {0x80, 0x00, 0xFF}));
    EXPECT_EQ(audio.source_bits, 8);
    EXPECT_EQ(audio.samples, (std::vector<std::int16_t>{0, -32768, 32512}));
}

TEST(Wave, RejectsUnsupported) {
    EXPECT_THROW(decode_wave(riff(1, 8000, 24, {0, 0, 0})), Error);
    EXPECT_THROW(decode_wave(riff(3, 8000, 16, {0, 0, 0, 0, 0, 0})), Error);
    std::vector<std::uint8_t> junk{'R', 'I', 'F', 'F'};
    EXPECT_THROW(decode_wave(junk), Error);
    auto truncated = riff(1, 8000, 16, {1, 0, 2, 0});
    truncated.resize(truncated.size() - 3);
    try {
        decode_wave(truncated);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Decode);
    }
}

TEST(Wave, EncodeDecodeRoundTrip) {
    const auto audio = test::tone(22050, 1000, 2);
    const auto back = decode_wave(encode_wave(audio));
    EXPECT_EQ(back.sample_rate, audio.sample_rate);
    EXPECT_EQ(back.channels, audio.channels);
    EXPECT_EQ(back.samples, audio.samples);
}

TEST(Wave, FixtureFilesDecode) {
    const auto audio = decode_wave(test::read_binary_file(test::data_path("gating/bele.wav")));
    EXPECT_EQ(audio.sample_rate, 44100u);
    EXPECT_EQ(audio.frames(), 44100 * 420 / 1000);
}

void expect_grid(const RasterImage& img) {
    ASSERT_EQ(img.width, 3);
    ASSERT_EQ(img.height, 2);
    ASSERT_EQ(img.rgba.size(), 24u);
    auto px = [&](int x, int y) {
        const auto* p = &img.rgba[static_cast<std::size_t>((y * 3 + x) * 4)];
        return std::vector<int>{p[0], p[1], p[2]};
    };
    EXPECT_EQ(px(0, 0), (std::vector<int>{255, 0, 0}));
    EXPECT_EQ(px(1, 0), (std::vector<int>{0, 255, 0}));
    EXPECT_EQ(px(2, 0), (std::vector<int>{0, 0, 255}));
    EXPECT_EQ(px(2, 1), (std::vector<int>{255, 0, 0}));
}

TEST(Image, Decodes8BitBmp) {
    expect_grid(decode_image(test::read_binary_file(test::data_path("media/grid8.bmp"))));
}

TEST(Image, Decodes24BitBmp) {
    expect_grid(decode_image(test::read_binary_file(test::data_path("media/grid24.bmp"))));
}

TEST(Image, DecodesPngWithAlpha) {
    const auto img = decode_image(test::read_binary_file(test::data_path("media/grid.png")));
    ASSERT_EQ(img.width, 3);
    ASSERT_EQ(img.height, 2);
    EXPECT_EQ(img.rgba[0], 255);
    EXPECT_EQ(img.rgba[3], 255);
    EXPECT_EQ(img.rgba[12 + 0], 10);
    EXPECT_EQ(img.rgba[12 + 3], 128);
}

TEST(Image, EncodeBmpRoundTrip) {
    RasterImage img;
    img.width = 5;
    img.height = 3;
    for (int i = 0; i < 15; ++i) {
        img.rgba.insert(img.rgba.end(), {static_cast<std::uint8_t>(i * 10), static_cast<std::uint8_t>(i), 7, 255});
    }
    const auto back = decode_bmp(encode_bmp(img));
    EXPECT_EQ(back.width, 5);
    EXPECT_EQ(back.height, 3);
    EXPECT_EQ(back.rgba, img.rgba);
}

TEST(Image, RejectsGarbage) {
    std::vector<std::uint8_t> junk(64, 0x42);
    EXPECT_THROW(decode_image(junk), Error);
    std::vector<std::uint8_t> fake_png{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n', 0, 0};
    EXPECT_THROW(decode_png(fake_png), Error);
}

} // namespace
} // namespace stimrun
