#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ferbench::io {

// Interleaved 8-bit image, 1 (gray) or 3 (RGB) channels.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;  // row-major, interleaved

    static Image make(int w, int h, int c, std::uint8_t fill = 0);

    std::uint8_t& at(int x, int y, int c = 0);
    std::uint8_t at(int x, int y, int c = 0) const;
    bool empty() const { return pixels.empty(); }
};

// PNG support covers what the framework writes and reads back: 8-bit
// grayscale / RGB / RGBA (alpha dropped), non-interlaced.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);

// Reads only the IHDR header; cheap dimension probe for validation.
struct PngHeader {
    int width = 0;
    int height = 0;
};
PngHeader read_png_header(const std::filesystem::path& path);

}  // namespace ferbench::io
