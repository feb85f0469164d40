#include "stimrun/image.hpp"

#include <png.h>

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

[[noreturn]] void bad(const std::string& why) {
    throw Error(ErrorCode::Decode, "image: " + why);
}

constexpr std::uint8_t png_signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

} // namespace

RasterImage decode_bmp(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 54 || bytes[0] != 'B' || bytes[1] != 'M') {
        bad("not a BMP file");
    }
    const auto* p = bytes.data();
    const std::uint32_t pixel_offset = le32(p + 10);
    const std::uint32_t header_size = le32(p + 14);
    if (header_size < 40) {
        bad("unsupported BMP header");
    }
    const auto width = static_cast<std::int32_t>(le32(p + 18));
    auto height = static_cast<std::int32_t>(le32(p + 22));
    const int bpp = le16(p + 28);
    const std::uint32_t compression = le32(p + 30);
    std::uint32_t palette_size = le32(p + 46);
    const bool top_down = height < 0;
    if (top_down) {
        height = -height;
    }
    if (width <= 0 || height <= 0 || width > 1 << 15 || height > 1 << 15) {
        bad("bad dimensions");
    }
    if (compression != 0 && !(compression == 3 && bpp == 32)) {
        bad("compressed BMP is not supported");
    }
    if (bpp != 8 && bpp != 24 && bpp != 32) {
        bad("unsupported bit depth " + std::to_string(bpp));
    }
    if (bpp == 8 && palette_size == 0) {
        palette_size = 256;
    }
    const std::size_t palette_at = 14 + header_size;
    if (bpp == 8 && palette_at + palette_size * 4 > bytes.size()) {
        bad("truncated palette");
    }
    const std::size_t stride = ((static_cast<std::size_t>(width) * bpp + 31) / 32) * 4;
    if (pixel_offset > bytes.size() || stride * static_cast<std::size_t>(height) > bytes.size() - pixel_offset) {
        bad("truncated pixel data");
    }
    RasterImage img;
    img.width = width;
    img.height = height;
    img.rgba.resize(static_cast<std::size_t>(width) * height * 4);
    for (int y = 0; y < height; ++y) {
        const int src_row = top_down ? y : height - 1 - y;
        const auto* row = p + pixel_offset + stride * static_cast<std::size_t>(src_row);
        for (int x = 0; x < width; ++x) {
            auto* px = img.rgba.data() + (static_cast<std::size_t>(y) * width + x) * 4;
            if (bpp == 8) {
                const std::uint8_t index = row[x];
                if (index >= palette_size) {
                    bad("palette index out of range");
                }
                const auto* entry = p + palette_at + index * 4u;
                px[0] = entry[2];
                px[1] = entry[1];
                px[2] = entry[0];
                px[3] = 255;
            } else {
                const auto* s = row + x * (bpp / 8);
                px[0] = s[2];
                px[1] = s[1];
                px[2] = s[0];
                px[3] = bpp == 32 ? s[3] : 255;
            }
        }
    }
    return img;
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        bad(std::string("png: ") + image.message);
    }
    image.format = PNG_FORMAT_RGBA;
    RasterImage img;
    img.width = static_cast<int>(image.width);
    img.height = static_cast<int>(image.height);
    img.rgba.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, img.rgba.data(), 0, nullptr)) {
        const std::string message = image.message;
        png_image_free(&image);
        bad("png: " + message);
    }
    return img;
}

RasterImage decode_image(std::span<const std::uint8_t> bytes) {
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_signature, 8) == 0) {
        return decode_png(bytes);
    }
    return decode_bmp(bytes);
}

std::vector<std::uint8_t> encode_bmp(const RasterImage& image) {
    const std::size_t stride = ((static_cast<std::size_t>(image.width) * 24 + 31) / 32) * 4;
    const auto pixel_bytes = static_cast<std::uint32_t>(stride * image.height);
    std::vector<std::uint8_t> out;
    out.reserve(54 + pixel_bytes);
    out.push_back('B');
    out.push_back('M');
    put32(out, 54 + pixel_bytes);
    put32(out, 0);
    put32(out, 54);
    put32(out, 40);
    put32(out, static_cast<std::uint32_t>(image.width));
    put32(out, static_cast<std::uint32_t>(image.height));
    put16(out, 1);
    put16(out, 24);
    put32(out, 0);
    put32(out, pixel_bytes);
    put32(out, 2835);
    put32(out, 2835);
    put32(out, 0);
    put32(out, 0);
    for (int y = image.height - 1; y >= 0; --y) {
        std::size_t written = 0;
        for (int x = 0; x < image.width; ++x) {
            const auto* px = image.rgba.data() + (static_cast<std::size_t>(y) * image.width + x) * 4;
            out.push_back(px[2]);
            out.push_back(px[1]);
            out.push_back(px[0]);
            written += 3;
        }
        out.insert(out.end(), stride - written, 0);
    }
    return out;
}

} // namespace stimrun
