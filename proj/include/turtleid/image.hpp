#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace turtleid {

// 8-bit interleaved RGB raster, as decoded from disk.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, 3 bytes per pixel

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t* px(int x, int y) { return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
    const std::uint8_t* px(int x, int y) const {
        return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
};

// Single-channel raster, the unit of all image processing. Values are
// 8-bit on load and stay in [0, 255] through filtering; stored as double
// so repeated filtering composes without quantization.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // row-major

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    // Edge-replicated access, the border policy used across the pipeline.
    double at_clamped(int x, int y) const {
        x = std::clamp(x, 0, width - 1);
        y = std::clamp(y, 0, height - 1);
        return at(x, y);
    }

    bool same_size(const GrayImage& o) const { return width == o.width && height == o.height; }
};

}  // namespace turtleid
