#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace stimrun {

// Decoded PCM audio, always widened to signed 16-bit interleaved samples.
struct PcmAudio {
    std::uint32_t sample_rate = 0;
    int channels = 0;
    int source_bits = 16; // 8 or 16, as stored in the file
    std::vector<std::int16_t> samples;

    std::int64_t frames() const {
        return channels > 0 ? static_cast<std::int64_t>(samples.size()) / channels : 0;
    }
};

/// Decodes a RIFF/WAVE file holding 8- or 16-bit PCM, mono or stereo.
/// Throws Error(Decode) on anything else.
PcmAudio decode_wave(std::span<const std::uint8_t> bytes);

/// Writes a canonical 44-byte-header PCM wave file at `bits` (8 or 16).
std::vector<std::uint8_t> encode_wave(const PcmAudio& audio, int bits = 16);

} // namespace stimrun
