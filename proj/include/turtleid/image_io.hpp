#pragma once

#include <filesystem>

#include "turtleid/image.hpp"

namespace turtleid {

// Decodes PNG or binary PGM (P5), dispatching on file content.
// Grayscale sources are replicated into all three channels.
RgbImage load_image(const std::filesystem::path& path);

GrayImage load_pgm(const std::filesystem::path& path);

// Writes binary PGM with maxval 255; pixels are rounded and clamped.
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

}  // namespace turtleid
