#pragma once

#include <filesystem>
#include <vector>

#include "turtleid/image.hpp"

#include "json.hpp"

namespace turtleid {

// Template descriptor geometry. Defaults give the 96x128 window with
// 8x8-pixel cells, 2x2-cell blocks at 1-cell stride and 9 unsigned
// orientation bins over 0-180 degrees, i.e. descriptor length 5940.
struct HogParams {
    int window_w = 96;
    int window_h = 128;
    int cell = 8;          // pixels per cell side
    int block = 2;         // cells per block side
    int block_stride = 1;  // cells
    int bins = 9;

    bool operator==(const HogParams&) const = default;
};

// Additive term in the block norm, applied to raw vote energies after
// pixel intensities are scaled to [0, 1].
inline constexpr double kBlockNormEpsilon = 1e-3;

int descriptor_len(const HogParams& params);

// Per-pixel gradient magnitude and unsigned orientation in [0, 180).
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> magnitude;
    std::vector<double> orientation;

    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

// Centered differences, halved so a unit ramp has unit gradient; borders
// use edge replication. Orientation folds atan2 into [0, 180).
GradientField compute_gradients(const GrayImage& img);

// Grid of per-cell orientation histograms, cells_x * cells_y * bins,
// cell-major row order.
struct CellGrid {
    int cells_x = 0;
    int cells_y = 0;
    int bins = 0;
    std::vector<double> histograms;

    double at(int cx, int cy, int bin) const {
        return histograms[(static_cast<std::size_t>(cy) * cells_x + cx) * bins + bin];
    }
};

// Each pixel votes its magnitude into the two nearest bin centers
// (centers at 10, 30, ..., 170 degrees, circular over 180). No spatial
// interpolation across cells.
CellGrid cell_histograms(const GradientField& grad, const HogParams& params);

struct HogDescriptor {
    HogParams params;
    std::vector<float> values;
};

// Slides a block over the cell grid, concatenates its cell histograms
// and L2-normalizes each block: v / sqrt(|v|^2 + eps^2). Blocks are
// emitted in row-major block order.
HogDescriptor block_normalize(const CellGrid& cells, const HogParams& params);

// Full pipeline over an image already at window resolution. Intensities
// are scaled to [0, 1] before gradients so the norm epsilon has a fixed
// meaning.
HogDescriptor compute_hog(const GrayImage& img, const HogParams& params = {});

// Euclidean distance between value vectors.
double hog_distance(const HogDescriptor& a, const HogDescriptor& b);

// Binary cache format: 8-byte magic, u32 version, u32 count (little
// endian), then count float32 values, little endian.
void save_descriptor(const HogDescriptor& desc, const std::filesystem::path& path);
HogDescriptor load_descriptor(const std::filesystem::path& path, const HogParams& params = {});

nlohmann::ordered_json descriptor_to_json(const HogDescriptor& desc);

}  // namespace turtleid
