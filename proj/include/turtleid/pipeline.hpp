#pragma once

#include <filesystem>

#include "turtleid/evaluation.hpp"
#include "turtleid/hog.hpp"
#include "turtleid/imgproc.hpp"

namespace turtleid {

enum class DescriptorKind { Hog, Keypoint };

struct PipelineConfig {
    DescriptorKind kind = DescriptorKind::Hog;
    HogParams hog;
    int smooth_size = 4;
    double smooth_sigma = 1.0;
    // keypoint baseline
    double acceptance_threshold = 0.8;
    double fast_threshold = 20.0;
    int max_keypoints = 500;
};

// Fixed preprocessing order: grayscale -> rotate -> crop ROI -> Gaussian
// smooth -> resize to the descriptor window. Smoothing applies to the
// cropped ROI, not the full frame.
GrayImage preprocess_roi(const RgbImage& img, double rotation_deg, const RoiRect& roi,
                         const PipelineConfig& cfg);

struct PreprocessedDataset {
    std::vector<SampleRecord> records;
    std::vector<SampleKey> keys;
    std::vector<GrayImage> rois;
};

// Loads every manifest image and runs the preprocessing chain. Errors
// surface for the lowest failing row index regardless of `jobs`.
PreprocessedDataset load_and_preprocess(const std::filesystem::path& manifest,
                                        const PipelineConfig& cfg, int jobs);

// HOG: L2 distances between descriptors. Keypoint: positive match counts
// bridged into a distance as 1 / (1 + count), so more matches means
// closer. Deterministic for any `jobs`.
DistanceMatrix build_distance_matrix(const std::vector<GrayImage>& rois,
                                     std::vector<SampleKey> keys, const PipelineConfig& cfg,
                                     int jobs);

}  // namespace turtleid
