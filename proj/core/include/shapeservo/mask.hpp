#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "shapeservo/geometry.hpp"

namespace shapeservo {

/// Binary image, row-major, 0 = background, 255 = rod.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    Mask() = default;
    Mask(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h, 0) {}

    std::uint8_t& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    int count_set() const;
};

/// Mapping between world coordinates (meters, y up) and pixel coordinates
/// (origin top-left, y down). The world origin lands at the image center.
struct ImageFrame {
    int width = 640;
    int height = 480;
    double scale = 400.0;  // pixels per meter

    Vec2 to_pixel(const Vec2& world) const {
        return {0.5 * width + world.x() * scale, 0.5 * height - world.y() * scale};
    }
    Vec2 to_world(const Vec2& pixel) const {
        return {(pixel.x() - 0.5 * width) / scale, (0.5 * height - pixel.y()) / scale};
    }
};

// Plain (ASCII, P2) PGM read/write.
Mask read_pgm(const std::filesystem::path& path);
void write_pgm(const Mask& mask, const std::filesystem::path& path);

}  // namespace shapeservo
