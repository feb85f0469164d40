#include "stimrun/wave.hpp"

#include <cstring>
#include <string>

#include "stimrun/error.hpp"

namespace stimrun {

namespace {

std::uint32_t le32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8)
        | (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

[[noreturn]] void bad(const std::string& why) {
    throw Error(ErrorCode::Decode, "wave: " + why);
}

} // namespace

PcmAudio decode_wave(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0
        || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        bad("not a RIFF/WAVE file");
    }
    PcmAudio audio;
    bool have_fmt = false;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const auto* chunk = bytes.data() + pos;
        const std::uint32_t size = le32(chunk + 4);
        const std::size_t body = pos + 8;
        if (size > bytes.size() - body) {
            bad("truncated chunk");
        }
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16) {
                bad("short fmt chunk");
            }
            const auto* f = bytes.data() + body;
            const auto format = le16(f);
            audio.channels = le16(f + 2);
            audio.sample_rate = le32(f + 4);
            audio.source_bits = le16(f + 14);
            if (format != 1) {
                bad("only PCM (format 1) is supported");
            }
            if (audio.channels != 1 && audio.channels != 2) {
                bad("only mono or stereo is supported");
            }
            if (audio.source_bits != 8 && audio.source_bits != 16) {
                bad("only 8- or 16-bit samples are supported");
            }
            if (audio.sample_rate == 0) {
                bad("sample rate is zero");
            }
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            if (!have_fmt) {
                bad("data chunk before fmt chunk");
            }
            const auto* d = bytes.data() + body;
            const std::size_t width = audio.source_bits / 8;
            const std::size_t count = size / width;
            audio.samples.resize(count - count % static_cast<std::size_t>(audio.channels));
            for (std::size_t i = 0; i < audio.samples.size(); ++i) {
                if (width == 1) {
                    audio.samples[i] = static_cast<std::int16_t>((static_cast<int>(d[i]) - 128) << 8);
                } else {
                    audio.samples[i] = static_cast<std::int16_t>(le16(d + 2 * i));
                }
            }
            return audio;
        }
        pos = body + size + (size & 1);
    }
    bad(have_fmt ? "no data chunk" : "no fmt chunk");
}

std::vector<std::uint8_t> encode_wave(const PcmAudio& audio, int bits) {
    if (bits != 8 && bits != 16) {
        throw Error(ErrorCode::BadValue, "wave: bits must be 8 or 16");
    }
    const auto width = static_cast<std::uint32_t>(bits / 8);
    const auto data_size = static_cast<std::uint32_t>(audio.samples.size()) * width;
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);
    put_tag(out, "RIFF");
    put32(out, 36 + data_size);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put32(out, 16);
    put16(out, 1);
    put16(out, static_cast<std::uint16_t>(audio.channels));
    put32(out, audio.sample_rate);
    put32(out, audio.sample_rate * static_cast<std::uint32_t>(audio.channels) * width);
    put16(out, static_cast<std::uint16_t>(audio.channels * static_cast<int>(width)));
    put16(out, static_cast<std::uint16_t>(bits));
    put_tag(out, "data");
    put32(out, data_size);
    for (auto s : audio.samples) {
        if (bits == 8) {
            out.push_back(static_cast<std::uint8_t>((s >> 8) + 128));
        } else {
            put16(out, static_cast<std::uint16_t>(s));
        }
    }
    return out;
}

} // namespace stimrun
