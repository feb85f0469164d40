#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace stimrun {

struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgba; // row-major, top row first
};

/// Uncompressed BMP: 8-bit palettized, 24-bit or 32-bit. Throws Error(Decode).
RasterImage decode_bmp(std::span<const std::uint8_t> bytes);

/// PNG via libpng. Throws Error(Decode).
RasterImage decode_png(std::span<const std::uint8_t> bytes);

/// Dispatches on the file signature.
RasterImage decode_image(std::span<const std::uint8_t> bytes);

/// 24-bit bottom-up BMP.
std::vector<std::uint8_t> encode_bmp(const RasterImage& image);

} // namespace stimrun
