#pragma once

#include <vector>

#include "turtleid/dataset.hpp"
#include "turtleid/image.hpp"

namespace turtleid {

// Square convolution kernel. `anchor` is the kernel index aligned with
// the output pixel, so the window for output x covers source columns
// [x - anchor, x - anchor + size). Even sizes have no center pixel; the
// default anchor (size-1)/2 puts a 4x4 window at [x-1 .. x+2].
struct Kernel {
    int size = 0;
    int anchor = 0;
    std::vector<double> weights;  // size*size, row-major

    double at(int kx, int ky) const { return weights[static_cast<std::size_t>(ky) * size + kx]; }
};

// Samples a 2-D Gaussian at offsets centered on the window (for size 4:
// {-1.5, -0.5, +0.5, +1.5} per axis) and normalizes to sum 1.
Kernel gaussian_kernel(int size, double sigma);

// ITU-R BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
GrayImage to_grayscale(const RgbImage& img);

// Rotates about the image center, counterclockwise as viewed on screen.
// The canvas expands to bound the rotated content; pixels that fall
// outside the source read as 0; bilinear sampling. Angles within 1e-12
// of a multiple of 90 degrees resolve exactly.
GrayImage rotate(const GrayImage& img, double deg);

GrayImage crop_roi(const GrayImage& img, const RoiRect& roi);

// 2-D convolution with edge replication; output has the source size.
// Requires a normalized kernel (weights sum to 1 within 1e-9).
GrayImage gaussian_smooth(const GrayImage& img, const Kernel& kernel);

// Bilinear resampling on the half-pixel grid: output pixel x samples the
// source at (x + 0.5) * w_in / w_out - 0.5, taps edge-replicated.
GrayImage resize(const GrayImage& img, int out_w, int out_h);

}  // namespace turtleid
