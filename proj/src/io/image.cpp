#include "ferbench/io/image.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "ferbench/common.hpp"

namespace ferbench::io {

namespace {

constexpr std::uint8_t kPngSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t n,
                       std::uint32_t seed = 0) {
    return static_cast<std::uint32_t>(
        ::crc32(seed, reinterpret_cast<const Bytef*>(data),
                static_cast<uInt>(n)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    put_u32(out, crc32_of(out.data() + crc_start, out.size() - crc_start));
}

std::vector<std::uint8_t> zlib_deflate(const std::vector<std::uint8_t>& in) {
    uLongf bound = ::compressBound(static_cast<uLong>(in.size()));
    std::vector<std::uint8_t> out(bound);
    if (::compress2(out.data(), &bound, in.data(),
                    static_cast<uLong>(in.size()), 6) != Z_OK)
        throw InputError("png: deflate failed");
    out.resize(bound);
    return out;
}

std::vector<std::uint8_t> zlib_inflate(const std::uint8_t* in, std::size_t n,
                                       std::size_t expected) {
    std::vector<std::uint8_t> out(expected);
    uLongf out_len = static_cast<uLongf>(expected);
    if (::uncompress(out.data(), &out_len, in, static_cast<uLong>(n)) != Z_OK ||
        out_len != expected)
        throw InputError("png: inflate failed or size mismatch");
    return out;
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a);
    const int pb = std::abs(p - b);
    const int pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return data;
}

}  // namespace

Image Image::make(int w, int h, int c, std::uint8_t fill) {
    if (w <= 0 || h <= 0 || (c != 1 && c != 3))
        throw ContractError("image: invalid dimensions or channel count");
    Image img;
    img.width = w;
    img.height = h;
    img.channels = c;
    img.pixels.assign(static_cast<std::size_t>(w) * h * c, fill);
    return img;
}

std::uint8_t& Image::at(int x, int y, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
}

std::uint8_t Image::at(int x, int y, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
}

void write_png(const std::filesystem::path& path, const Image& img) {
    if (img.empty()) throw ContractError("write_png: empty image");
    const int bpp = img.channels;

    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(img.height) * (1 + img.width * bpp));
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0);  // filter type none
        const std::uint8_t* row =
            img.pixels.data() + static_cast<std::size_t>(y) * img.width * bpp;
        raw.insert(raw.end(), row, row + static_cast<std::size_t>(img.width) * bpp);
    }

    std::vector<std::uint8_t> out(kPngSignature, kPngSignature + 8);

    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(img.width));
    put_u32(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr.push_back(8);                                   // bit depth
    ihdr.push_back(img.channels == 1 ? 0 : 2);           // gray / truecolor
    ihdr.push_back(0);                                   // compression
    ihdr.push_back(0);                                   // filter
    ihdr.push_back(0);                                   // no interlace
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", zlib_deflate(raw));
    append_chunk(out, "IEND", {});

    std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write file: " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
    if (!f) throw InputError("short write: " + path.string());
}

Image read_png(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> data = read_file(path);
    if (data.size() < 8 || std::memcmp(data.data(), kPngSignature, 8) != 0)
        throw InputError("not a png file: " + path.string());

    int width = 0, height = 0, color_type = -1, bit_depth = 0;
    std::vector<std::uint8_t> idat;

    std::size_t pos = 8;
    while (pos + 8 <= data.size()) {
        const std::uint32_t len = get_u32(data.data() + pos);
        if (pos + 12 + len > data.size())
            throw InputError("png: truncated chunk in " + path.string());
        const char* type = reinterpret_cast<const char*>(data.data() + pos + 4);
        const std::uint8_t* payload = data.data() + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            width = static_cast<int>(get_u32(payload));
            height = static_cast<int>(get_u32(payload + 4));
            bit_depth = payload[8];
            color_type = payload[9];
            if (payload[12] != 0)
                throw InputError("png: interlaced images unsupported: " + path.string());
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;
    }

    if (width <= 0 || height <= 0) throw InputError("png: missing IHDR: " + path.string());
    if (bit_depth != 8)
        throw InputError("png: only 8-bit depth supported: " + path.string());
    int src_ch = 0;
    switch (color_type) {
        case 0: src_ch = 1; break;  // gray
        case 2: src_ch = 3; break;  // rgb
        case 6: src_ch = 4; break;  // rgba
        default:
            throw InputError("png: unsupported color type " +
                             std::to_string(color_type) + ": " + path.string());
    }

    const std::size_t stride = static_cast<std::size_t>(width) * src_ch;
    const std::size_t expected = static_cast<std::size_t>(height) * (stride + 1);
    std::vector<std::uint8_t> raw = zlib_inflate(idat.data(), idat.size(), expected);

    // Undo per-scanline filters in place.
    std::vector<std::uint8_t> prev(stride, 0);
    Image img = Image::make(width, height, src_ch == 1 ? 1 : 3);
    for (int y = 0; y < height; ++y) {
        std::uint8_t* line = raw.data() + static_cast<std::size_t>(y) * (stride + 1);
        const int filter = line[0];
        std::uint8_t* cur = line + 1;
        for (std::size_t i = 0; i < stride; ++i) {
            const int a = i >= static_cast<std::size_t>(src_ch) ? cur[i - src_ch] : 0;
            const int b = prev[i];
            const int c = i >= static_cast<std::size_t>(src_ch) ? prev[i - src_ch] : 0;
            int v = cur[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default:
                    throw InputError("png: bad filter byte: " + path.string());
            }
            cur[i] = static_cast<std::uint8_t>(v & 0xFF);
        }
        std::memcpy(prev.data(), cur, stride);
        std::uint8_t* dst =
            img.pixels.data() + static_cast<std::size_t>(y) * width * img.channels;
        if (src_ch == 4) {
            for (int x = 0; x < width; ++x) {
                dst[3 * x + 0] = cur[4 * x + 0];
                dst[3 * x + 1] = cur[4 * x + 1];
                dst[3 * x + 2] = cur[4 * x + 2];
            }
        } else {
            std::memcpy(dst, cur, stride);
        }
    }
    return img;
}

PngHeader read_png_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path.string());
    std::uint8_t buf[33];
    in.read(reinterpret_cast<char*>(buf), sizeof(buf));
    if (in.gcount() < 33 || std::memcmp(buf, kPngSignature, 8) != 0 ||
        std::memcmp(buf + 12, "IHDR", 4) != 0)
        throw InputError("not a png file: " + path.string());
    PngHeader h;
    h.width = static_cast<int>(get_u32(buf + 16));
    h.height = static_cast<int>(get_u32(buf + 20));
    return h;
}

}  // namespace ferbench::io
