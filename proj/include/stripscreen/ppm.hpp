#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "stripscreen/dataset.hpp"

namespace stripscreen::data {

struct PadPatch {
    int width = 0;
    int height = 0;
    std::vector<Rgb24> pixels;  // row-major
};

// Plain portable pixmap, P3 (ASCII) or P6 (binary), maxval 255.
PadPatch read_ppm(const std::filesystem::path& path);

// Per-channel arithmetic mean, rounded half-up. Throws DataError on an empty
// patch.
Rgb24 mean_pad_color(std::span<const Rgb24> pixels);
Rgb24 mean_pad_color(const PadPatch& patch);

}  // namespace stripscreen::data
