#include <doctest.h>

#include <filesystem>

#include "ferbench/io/files.hpp"
#include "ferbench/io/image.hpp"
#include "ferbench/rng.hpp"

using namespace ferbench;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("ferbench_io_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("png round trip preserves pixels for gray and rgb") {
    const fs::path dir = temp_dir("png");
    Rng rng(21);
    for (int channels : {1, 3}) {
        io::Image img = io::Image::make(61, 47, channels);
        for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(256));
        const fs::path path = dir / ("img_" + std::to_string(channels) + ".png");
        io::write_png(path, img);
        const io::Image back = io::read_png(path);
        CHECK(back.width == img.width);
        CHECK(back.height == img.height);
        CHECK(back.channels == img.channels);
        CHECK(back.pixels == img.pixels);
    }
}

TEST_CASE("png header probe reads dimensions without decoding") {
    const fs::path dir = temp_dir("hdr");
    io::write_png(dir / "probe.png", io::Image::make(123, 45, 1, 7));
    const auto hdr = io::read_png_header(dir / "probe.png");
    CHECK(hdr.width == 123);
    CHECK(hdr.height == 45);
}

TEST_CASE("png reader rejects non-png input") {
    const fs::path dir = temp_dir("bad");
    io::atomic_write(dir / "not.png", "definitely not a png");
    CHECK_THROWS_AS(io::read_png(dir / "not.png"), InputError);
    CHECK_THROWS_AS(io::read_png_header(dir / "not.png"), InputError);
    CHECK_THROWS_AS(io::read_png(dir / "missing.png"), InputError);
}

TEST_CASE("csv escaping round-trips awkward fields") {
    const std::vector<std::string> fields = {"plain", "with,comma", "with\"quote",
                                             "multi\nline", ""};
    const std::string row = io::csv_row(fields);
    auto parsed = io::csv_parse_row(row.substr(0, row.size() - 1));
    CHECK(parsed == fields);
}

TEST_CASE("atomic write leaves no temp files behind") {
    const fs::path dir = temp_dir("atomic");
    io::atomic_write(dir / "a.txt", "hello");
    CHECK(io::read_text(dir / "a.txt") == "hello");
    io::atomic_write(dir / "a.txt", "replaced");
    CHECK(io::read_text(dir / "a.txt") == "replaced");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
    CHECK(entries == 1);
}

TEST_CASE("sample ids are flattened into safe file names") {
    CHECK(io::safe_file_stem("clip01#3") == "clip01#3");
    CHECK(io::safe_file_stem("a/b\\c") == "a_b_c");
    const auto p = io::processed_image_path("root", "ds", "clip#1");
    CHECK(p == fs::path("root") / "ds" / "clip#1.png");
}
