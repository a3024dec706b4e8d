#include "stripscreen/ppm.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>

#include "stripscreen/error.hpp"
#include "stripscreen/text.hpp"

namespace stripscreen::data {

namespace {

// Skips whitespace and '#' comment lines between header tokens.
std::size_t skip_separators(const std::string& data, std::size_t pos) {
    while (pos < data.size()) {
        if (std::isspace(static_cast<unsigned char>(data[pos]))) {
            ++pos;
        } else if (data[pos] == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    return pos;
}

int read_header_int(const std::string& data, std::size_t& pos, const char* what) {
    pos = skip_separators(data, pos);
    std::size_t end = pos;
    while (end < data.size() && std::isdigit(static_cast<unsigned char>(data[end]))) ++end;
    if (end == pos) throw DataError(std::string("ppm: missing ") + what);
    const int value = std::stoi(data.substr(pos, end - pos));
    pos = end;
    return value;
}

}  // namespace

PadPatch read_ppm(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    if (data.size() < 2 || data[0] != 'P' || (data[1] != '3' && data[1] != '6'))
        throw DataError(path.string() + ": not a P3/P6 portable pixmap");
    const bool binary = data[1] == '6';

    std::size_t pos = 2;
    PadPatch patch;
    patch.width = read_header_int(data, pos, "width");
    patch.height = read_header_int(data, pos, "height");
    const int maxval = read_header_int(data, pos, "maxval");
    if (patch.width <= 0 || patch.height <= 0)
        throw DataError(path.string() + ": empty image");
    if (maxval != 255)
        throw DataError(path.string() + ": unsupported maxval " + std::to_string(maxval));

    const std::size_t n = static_cast<std::size_t>(patch.width) * patch.height;
    patch.pixels.reserve(n);
    if (binary) {
        if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
            throw DataError(path.string() + ": malformed P6 header");
        ++pos;  // single whitespace byte before raster
        if (data.size() - pos < 3 * n)
            throw DataError(path.string() + ": truncated pixel data");
        for (std::size_t i = 0; i < n; ++i) {
            patch.pixels.push_back(Rgb24{static_cast<std::uint8_t>(data[pos + 3 * i]),
                                         static_cast<std::uint8_t>(data[pos + 3 * i + 1]),
                                         static_cast<std::uint8_t>(data[pos + 3 * i + 2])});
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            int rgb[3];
            for (int c = 0; c < 3; ++c) {
                rgb[c] = read_header_int(data, pos, "pixel value");
                if (rgb[c] < 0 || rgb[c] > 255)
                    throw DataError(path.string() + ": pixel value out of range");
            }
            patch.pixels.push_back(Rgb24{static_cast<std::uint8_t>(rgb[0]),
                                         static_cast<std::uint8_t>(rgb[1]),
                                         static_cast<std::uint8_t>(rgb[2])});
        }
    }
    return patch;
}

Rgb24 mean_pad_color(std::span<const Rgb24> pixels) {
    if (pixels.empty()) throw DataError("mean_pad_color: empty patch");
    std::uint64_t sum[3] = {0, 0, 0};
    for (const auto& px : pixels) {
        sum[0] += px.r;
        sum[1] += px.g;
        sum[2] += px.b;
    }
    const double n = static_cast<double>(pixels.size());
    auto round_half_up = [n](std::uint64_t s) {
        return static_cast<std::uint8_t>(std::floor(static_cast<double>(s) / n + 0.5));
    };
    return Rgb24{round_half_up(sum[0]), round_half_up(sum[1]), round_half_up(sum[2])};
}

Rgb24 mean_pad_color(const PadPatch& patch) {
    return mean_pad_color(std::span<const Rgb24>(patch.pixels));
}

}  // namespace stripscreen::data
