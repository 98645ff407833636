#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "turtleid/image.hpp"

namespace turtleid {

// Keypoints keep a 16-pixel margin from the image border so the
// description patch always fits.
inline constexpr int kKeypointMargin = 16;

struct Keypoint {
    float x = 0.f;
    float y = 0.f;
    double response = 0.0;    // corner score
    double orientation = 0.0; // degrees in [0, 360)
};

struct BinaryDescriptor {
    std::array<std::uint64_t, 4> bits{};

    bool operator==(const BinaryDescriptor&) const = default;
};

int hamming_distance(const BinaryDescriptor& a, const BinaryDescriptor& b);

// FAST-9 segment test on the 16-pixel Bresenham circle with non-maximal
// suppression, strongest `max_keypoints` kept. Orientation comes from
// the intensity centroid of a radius-15 disc. Images smaller than the
// margin allows yield no keypoints.
std::vector<Keypoint> detect_fast(const GrayImage& img, double threshold = 20.0,
                                  int max_keypoints = 500);

// 256 pixel-pair comparisons in a 31x31 patch, pattern rotated by the
// keypoint orientation snapped to 12-degree steps. The caller is
// expected to pass a Gaussian-smoothed image. Ties compare to 0.
BinaryDescriptor describe_brief(const GrayImage& img, const Keypoint& kp);

struct KeypointMatch {
    int query_index = 0;
    int gallery_index = 0;
    int distance = 0;
};

struct KeypointMatchResult {
    std::vector<KeypointMatch> matches;  // each query index at most once
    int positive_match_count = 0;
};

// Lowe-style ratio test on Hamming distances: a query keeps its nearest
// gallery match iff nearest/second-nearest < acceptance_threshold.
KeypointMatchResult match_keypoints(const std::vector<BinaryDescriptor>& query,
                                    const std::vector<BinaryDescriptor>& gallery,
                                    double acceptance_threshold);

// detect -> describe -> match; returns the positive match count as an
// image-pair similarity. Both images get the default 4x4 Gaussian before
// detection and description (pipeline ROIs are thus smoothed twice,
// which matches BRIEF's own smoothing step). Degenerate inputs (no query
// keypoints, fewer than two gallery keypoints) score 0.
int keypoint_image_score(const GrayImage& query_img, const GrayImage& gallery_img,
                         double acceptance_threshold, double fast_threshold = 20.0,
                         int max_keypoints = 500);

}  // namespace turtleid
